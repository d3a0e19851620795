#include "fastdiff/ratefit.hpp"

#include <cmath>
#include <sstream>

#include "fastdiff/error.hpp"

namespace fastdiff {

std::string WindowPolicy::describe() const {
  std::ostringstream os;
  os << "values in [" << value_lo << ", " << value_hi << "]";
  if (t_min > -1e299 || t_max < 1e299) os << ", t in [" << t_min << ", " << t_max << "]";
  os << ", >= " << min_samples << " samples";
  return os.str();
}

RateFit fit_rate(const std::vector<double>& times, const std::vector<double>& values,
                 const WindowPolicy& policy) {
  if (times.size() != values.size()) throw ValidationError("fit_rate: times and values differ in length");
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double v = values[i];
    if (times[i] < policy.t_min || times[i] > policy.t_max) continue;
    if (!(v >= policy.value_lo && v <= policy.value_hi)) continue;
    if (!(v > 0.0)) throw ValidationError("fit_rate: non-positive value in window");
    ts.push_back(times[i]);
    ys.push_back(std::log(v));
  }
  if (static_cast<int>(ts.size()) < policy.min_samples) {
    std::ostringstream os;
    os << "fit_rate: window holds " << ts.size() << " samples (" << policy.describe() << ")";
    throw ValidationError(os.str());
  }
  const double k = static_cast<double>(ts.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= k;
  my /= k;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (stt <= 0.0) throw ValidationError("fit_rate: window has a single time");
  RateFit fit;
  fit.slope = sty / stt;
  fit.intercept = my - fit.slope * mt;
  fit.r_squared = syy > 0.0 ? std::min(1.0, sty * sty / (stt * syy)) : 1.0;
  fit.t_lo = ts.front();
  fit.t_hi = ts.back();
  fit.samples = static_cast<int>(ts.size());
  return fit;
}

}  // namespace fastdiff
