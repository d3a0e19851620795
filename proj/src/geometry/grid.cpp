#include <cmath>
#include <sstream>

#include "fastdiff/error.hpp"
#include "fastdiff/geometry.hpp"

namespace fastdiff {

double s_of_r(double r) { return std::asinh(r); }
double r_of_s(double s) { return std::sinh(s); }
double volume_weight(double s, int n) { return std::pow(std::tanh(s), n - 1); }

RadialGrid make_grid(double s_max, int count) {
  if (!(s_max > 0.0) || !std::isfinite(s_max)) throw ValidationError("grid s_max must be > 0");
  if (count < 16) {
    std::ostringstream os;
    os << "grid count must be >= 16 (got " << count << ")";
    throw ValidationError(os.str());
  }
  return {s_max, count};
}

RadialGrid refine(const RadialGrid& g) { return {g.s_max, 2 * g.count}; }

GridFunction zero_function(const RadialGrid& grid, int ell) {
  return {grid, ell, std::vector<double>(static_cast<std::size_t>(grid.size()), 0.0)};
}

GridFunction sample(const RadialGrid& grid, int ell, const std::function<double(double)>& f) {
  GridFunction out = zero_function(grid, ell);
  for (int i = 0; i < grid.size(); ++i) out.values[static_cast<std::size_t>(i)] = f(grid.node(i));
  if (ell >= 1) out.values[0] = 0.0;
  return out;
}

GridFunction sample_eigenfunction(const RadialGrid& grid, const ModeIndex& mode, double eta,
                                  const ModelParams& P) {
  const PsiPolynomial poly = psi_polynomial(mode, P);
  const double sb = std::sqrt(P.B);
  return sample(grid, mode.ell, [&](double s) {
    const double c = std::cosh(s);
    return eval_psi(poly, sb * std::sinh(s), P) / (P.B * c * c) * std::pow(c, -eta);
  });
}

void validate(const GridFunction& f) {
  if (f.values.size() != static_cast<std::size_t>(f.grid.size()))
    throw ValidationError("grid function size does not match its grid");
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (!std::isfinite(f.values[i])) {
      std::ostringstream os;
      os << "non-finite value at node " << i;
      throw ValidationError(os.str());
    }
  }
  if (f.ell >= 1 && f.values[0] != 0.0) throw ValidationError("ell >= 1 profile must vanish at s = 0");
}

}  // namespace fastdiff
