#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

#include "fastdiff/closedform.hpp"
#include "fastdiff/error.hpp"

namespace fastdiff {

namespace {

__extension__ typedef __int128 i128;

i128 iabs(i128 v) { return v < 0 ? -v : v; }

i128 igcd(i128 a, i128 b) {
  a = iabs(a);
  b = iabs(b);
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// p as P/Q with small Q, if it is one to double precision.
bool rational_approx(double x, std::int64_t& num, std::int64_t& den) {
  constexpr std::int64_t kMaxDen = 100000;
  double frac = x;
  std::int64_t h0 = 1, h1 = 0, k0 = 0, k1 = 1;
  for (int it = 0; it < 40; ++it) {
    const double a = std::floor(frac);
    if (std::abs(a) > 1e9) return false;
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t h2 = ai * h0 + h1, k2 = ai * k0 + k1;
    if (k2 > kMaxDen) return false;
    h1 = h0;
    h0 = h2;
    k1 = k0;
    k0 = k2;
    if (std::abs(static_cast<double>(h0) / static_cast<double>(k0) - x) <=
        1e-12 * std::max(1.0, std::abs(x))) {
      num = h0;
      den = k0;
      return true;
    }
    const double rem = frac - a;
    if (rem == 0.0) return false;
    frac = 1.0 / rem;
  }
  return false;
}

void require_mode(const ModeIndex& md, const ModelParams& P) {
  if (!is_admissible(md, P.eta_cr, P)) {
    std::ostringstream os;
    os << "mode (" << md.ell << "," << md.k << ") is not admissible for p = " << P.p;
    throw ValidationError(os.str());
  }
}

}  // namespace

PsiPolynomial psi_polynomial(const ModeIndex& md, const ModelParams& P) {
  require_mode(md, P);
  PsiPolynomial poly;
  poly.ell = md.ell;
  poly.coeffs.assign(static_cast<std::size_t>(md.k) + 1, 0.0);
  poly.coeffs[0] = 1.0;
  const int l = md.ell, k = md.k, n = P.n;

  std::int64_t pn = 0, pd = 1;
  if (rational_approx(P.p, pn, pd)) {
    // ratio_j = (2Q(k+l-1+j) - P)(j-k) / (Q (2l+n+2j)(j+1)), times -1 for z = -r^2/B.
    i128 num = 1, den = 1;
    bool ok = true;
    for (int j = 0; j < k && ok; ++j) {
      const i128 a = static_cast<i128>(2) * pd * (k + l - 1 + j) - pn;
      const i128 rn = -a * (j - k);
      const i128 rd = static_cast<i128>(pd) * (2 * l + n + 2 * j) * (j + 1);
      num *= rn;
      den *= rd;
      const i128 g = igcd(num, den);
      if (g > 1) {
        num /= g;
        den /= g;
      }
      if (den < 0) {
        num = -num;
        den = -den;
      }
      constexpr double kLimit = 1e30;
      if (static_cast<double>(iabs(num)) > kLimit || static_cast<double>(den) > kLimit) ok = false;
      poly.coeffs[static_cast<std::size_t>(j) + 1] =
          static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
    }
    if (ok) {
      poly.exact_rational = true;
      return poly;
    }
  }
  long double c = 1.0L;
  for (int j = 0; j < k; ++j) {
    const long double a = k + l - 1 + j - 0.5L * P.p;
    c *= -a * (j - k) / ((l + 0.5L * n + j) * (j + 1.0L));
    poly.coeffs[static_cast<std::size_t>(j) + 1] = static_cast<double>(c);
  }
  return poly;
}

double eval_psi(const PsiPolynomial& poly, double r, const ModelParams& P) {
  const long double z = static_cast<long double>(r) * r / P.B;
  long double sum = 0.0L, comp = 0.0L, zj = 1.0L;
  for (double c : poly.coeffs) {
    const long double term = c * zj;
    const long double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    zj *= z;
  }
  return static_cast<double>(std::pow(static_cast<long double>(r), poly.ell) * (sum + comp));
}

double eigenfunction_psi(const ModeIndex& md, double r, const ModelParams& P) {
  if (r < 0.0) throw ValidationError("eigenfunction_psi requires r >= 0");
  return eval_psi(psi_polynomial(md, P), r, P);
}

double eigenfunction_v(const ModeIndex& md, double s, const ModelParams& P) {
  if (s < 0.0) throw ValidationError("eigenfunction_v requires s >= 0");
  const double r = std::sqrt(P.B) * std::sinh(s);
  const double c = std::cosh(s);
  return eigenfunction_psi(md, r, P) / (P.B * c * c);
}

}  // namespace fastdiff
