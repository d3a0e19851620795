#pragma once
// Least-squares decay-rate fits on (t, log value).

#include <string>
#include <vector>

namespace fastdiff {

struct WindowPolicy {
  double value_lo = 1e-8;
  double value_hi = 1e-2;
  double t_min = -1e300;  // optional time restriction
  double t_max = 1e300;
  int min_samples = 10;

  std::string describe() const;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int samples = 0;
};

RateFit fit_rate(const std::vector<double>& times, const std::vector<double>& values,
                 const WindowPolicy& policy = {});

}  // namespace fastdiff
