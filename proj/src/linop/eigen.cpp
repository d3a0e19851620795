#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fastdiff/error.hpp"
#include "fastdiff/linop.hpp"

namespace fastdiff {

namespace {

struct Symmetrized {
  std::vector<double> diag, off;  // off[i] couples rows i and i+1
  std::vector<double> logd;       // S = D A D^{-1}, D = exp(logd)
};

bool symmetrizable(const TridiagonalOperator& op) {
  for (int i = 0; i + 1 < op.unknowns(); ++i)
    if (!(op.sup[i] * op.sub[i + 1] > 0.0)) return false;
  return true;
}

Symmetrized symmetrize(const TridiagonalOperator& op) {
  const int M = op.unknowns();
  Symmetrized S{op.diag, std::vector<double>(std::max(M - 1, 0)), std::vector<double>(M, 0.0)};
  for (int i = 0; i + 1 < M; ++i) {
    S.off[i] = std::copysign(std::sqrt(op.sup[i] * op.sub[i + 1]), op.sup[i]);
    S.logd[i + 1] = S.logd[i] + 0.5 * std::log(op.sup[i] / op.sub[i + 1]);
  }
  const double top = *std::max_element(S.logd.begin(), S.logd.end());
  for (double& v : S.logd) v -= top;
  return S;
}

// Tridiagonal solve with partial pivoting (second superdiagonal fill-in).
void solve_pivoted(std::vector<double> dl, std::vector<double> d, std::vector<double> du,
                   std::vector<double>& b) {
  const int M = static_cast<int>(d.size());
  std::vector<double> du2(std::max(M - 2, 0), 0.0);
  const double tiny = 1e-300;
  for (int i = 0; i + 1 < M; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) d[i] = tiny;
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
      if (i + 2 < M) du2[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < M) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du2[i];
      }
      du[i] = temp;
      const double tb = b[i];
      b[i] = b[i + 1];
      b[i + 1] = tb - fact * b[i + 1];
    }
  }
  if (d[M - 1] == 0.0) d[M - 1] = tiny;
  b[M - 1] /= d[M - 1];
  if (M >= 2) b[M - 2] = (b[M - 2] - du[M - 2] * b[M - 1]) / d[M - 2];
  for (int i = M - 3; i >= 0; --i) b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
}

// Unit eigenvector of the symmetrized matrix for an eigenvalue near mu.
std::vector<double> inverse_iteration(const Symmetrized& S, double mu) {
  const int M = static_cast<int>(S.diag.size());
  std::vector<double> y(M);
  for (int i = 0; i < M; ++i) y[i] = 1.0 + 0.01 * std::sin(0.37 * i);
  const double shift = mu + 1e-11 * (1.0 + std::abs(mu));
  std::vector<double> d(M);
  for (int i = 0; i < M; ++i) d[i] = S.diag[i] - shift;
  for (int it = 0; it < 4; ++it) {
    solve_pivoted(S.off, d, S.off, y);
    double nrm = 0.0;
    for (double v : y) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw SolverError("inverse iteration broke down");
    for (double& v : y) v /= nrm;
  }
  return y;
}

Eigen::MatrixXd dense(const TridiagonalOperator& op) {
  const int M = op.unknowns();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);
  for (int i = 0; i < M; ++i) {
    A(i, i) = op.diag[i];
    if (i > 0) A(i, i - 1) = op.sub[i];
    if (i + 1 < M) A(i, i + 1) = op.sup[i];
  }
  return A;
}

}  // namespace

int SpectrumReport::count_above_threshold() const {
  return static_cast<int>(std::count_if(discrete.begin(), discrete.end(),
                                        [](const DiscreteEigenvalue& d) { return d.above_threshold; }));
}

std::vector<double> real_spectrum(const TridiagonalOperator& op) {
  if (!symmetrizable(op)) throw SolverError("operator is not symmetrizable by a diagonal scaling");
  const Symmetrized S = symmetrize(op);
  const int M = op.unknowns();
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(S.diag.data(), M);
  Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(S.off.data(), M - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "tridiagonal eigensolver did not converge (size " << M << ")";
    throw SolverError(os.str());
  }
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + M);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

SpectrumReport top_eigenvalues(const TridiagonalOperator& op, int count) {
  if (count < 1) throw ValidationError("count must be >= 1");
  const ModelParams& P = op.params;
  SpectrumReport rep;
  rep.threshold = essential_threshold(op.ell, op.eta, P);
  rep.ell = op.ell;
  rep.eta = op.eta;
  rep.h = op.grid.h();
  rep.s_max = op.grid.s_max;
  rep.symmetrizable = symmetrizable(op);

  std::vector<std::complex<double>> values;
  if (rep.symmetrizable) {
    for (double v : real_spectrum(op)) values.emplace_back(v, 0.0);
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(dense(op), false);
    if (es.info() != Eigen::Success) throw SolverError("dense eigensolver did not converge");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) values.push_back(es.eigenvalues()[i]);
    std::stable_sort(values.begin(), values.end(),
                     [](const auto& a, const auto& b) { return a.real() > b.real(); });
  }
  values.resize(std::min<std::size_t>(values.size(), static_cast<std::size_t>(count)));

  // The truncated spectrum does not depend on eta; candidates are the modes
  // that exist at eta_cr, in descending order.
  std::vector<ModeIndex> cand;
  for (int k = 0;; ++k) {
    ModeIndex md{op.ell, k, 0};
    if (!is_admissible(md, P.eta_cr, P)) break;
    cand.push_back(md);
  }
  std::size_t next = 0;
  for (const auto& v : values) {
    DiscreteEigenvalue d;
    d.value = v;
    d.above_threshold = v.real() > rep.threshold + kThresholdMargin;
    if (std::abs(v.imag()) < 1e-9 && next < cand.size()) {
      const double err = v.real() - eigenvalue(cand[next], P);
      if (std::abs(err) < 0.5) {
        d.match = cand[next];
        d.match_error = err;
        ++next;
      }
    }
    rep.discrete.push_back(d);
  }
  return rep;
}

Projection project_discrete(const TridiagonalOperator& op, const GridFunction& f,
                            const std::vector<ModeIndex>& modes) {
  if (f.ell != op.ell) throw ValidationError("projection: harmonic mismatch");
  const Symmetrized S = symmetrize(op);
  const std::vector<double> spec = real_spectrum(op);
  const int M = op.unknowns();
  const std::size_t first = static_cast<std::size_t>(op.first);
  Projection out{zero_function(op.grid, op.ell), f};
  for (const ModeIndex& md : modes) {
    if (md.ell != op.ell) throw ValidationError("projection mode does not ride on the operator's harmonic");
    const double target = eigenvalue(md, op.params);
    const double mu = *std::min_element(spec.begin(), spec.end(), [&](double a, double b) {
      return std::abs(a - target) < std::abs(b - target);
    });
    const std::vector<double> y = inverse_iteration(S, mu);
    // Left eigenvector D y, right eigenvector D^{-1} y.
    double num = 0.0;
    for (int i = 0; i < M; ++i) num += y[i] * std::exp(S.logd[i]) * f.values[first + i];
    for (int i = 0; i < M; ++i) {
      const double part = num * y[i] * std::exp(-S.logd[i]);
      out.q_part.values[first + i] += part;
      out.p_part.values[first + i] -= part;
    }
  }
  return out;
}

}  // namespace fastdiff
