#include "shrinkcv/estimators.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace shrinkcv {

HermitianEstimate scm(const SnapshotSet& samples) {
  const CMat& x = samples.data();
  const double l = static_cast<double>(samples.l_count());
  CMat r = (x * x.adjoint()) / l;
  return HermitianEstimate(r, Provenance::Scm);
}

HermitianEstimate nscm(const SnapshotSet& samples) {
  const CMat& y = samples.data();
  const int n = samples.n();
  const int l = samples.l_count();
  CMat r = CMat::Zero(n, n);
  for (int j = 0; j < l; ++j) {
    const double p = y.col(j).squaredNorm();
    if (!(p > 0.0)) throw invalid_input("nscm: zero-norm sample");
    r.noalias() += y.col(j) * y.col(j).adjoint() / p;
  }
  r *= static_cast<double>(n) / static_cast<double>(l);
  return HermitianEstimate(r, Provenance::Nscm);
}

HermitianEstimate shrink(const HermitianEstimate& sigma, const ShrinkageTarget& target,
                         double rho) {
  if (sigma.n() != target.n()) throw invalid_input("shrink: dimension mismatch");
  if (!(rho >= 0.0 && rho < 1.0)) throw invalid_input("shrink: rho must lie in [0, 1)");
  CMat r = (1.0 - rho) * sigma.matrix() + rho * target.matrix();
  return HermitianEstimate(r, Provenance::S2cm, rho);
}

double relative_distance(const HermitianEstimate& a, const HermitianEstimate& b) {
  if (a.n() != b.n()) throw invalid_input("relative_distance: dimension mismatch");
  const double nb = b.matrix().norm();
  if (!(nb > 0.0)) throw invalid_input("relative_distance: reference matrix has zero norm");
  return (a.matrix() - b.matrix()).norm() / nb;
}

double ste_rho_lower_bound(int n, int l_count) {
  return std::max(0.0, 1.0 - static_cast<double>(l_count) / static_cast<double>(n));
}

Eigen::VectorXd tyler_weights(const CMat& samples, const CMat& r) {
  const int n = static_cast<int>(samples.rows());
  const int l = static_cast<int>(samples.cols());
  Eigen::LLT<CMat> llt(r);
  // rcond screens exactly singular matrices that pass LLT through roundoff
  // (a rank-deficient plug-in, e.g. the NSCM with L < N)
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-13))
    throw numerical_failure("tyler_weights: matrix singular or not positive definite");
  const CMat z = llt.solve(samples);
  Eigen::VectorXd w(l);
  for (int j = 0; j < l; ++j) {
    const double q = samples.col(j).dot(z.col(j)).real() / n;
    if (!(q > 0.0)) throw numerical_failure("tyler_weights: nonpositive quadratic form");
    w(j) = q;
  }
  return w;
}

CMat weighted_samples(const CMat& samples, const CMat& r) {
  const Eigen::VectorXd w = tyler_weights(samples, r);
  CMat q = samples;
  for (int j = 0; j < q.cols(); ++j) q.col(j) /= std::sqrt(w(j));
  return q;
}

CMat ste_map(const CMat& samples, const CMat& target, double rho, const CMat& current) {
  const int l = static_cast<int>(samples.cols());
  const Eigen::VectorXd w = tyler_weights(samples, current);
  // sum_l y_l y_l^H / w_l as one rank-L product of the scaled samples
  CMat scaled = samples;
  for (int j = 0; j < l; ++j) scaled.col(j) /= std::sqrt(w(j));
  CMat acc = scaled * scaled.adjoint();
  acc *= (1.0 - rho) / static_cast<double>(l);
  acc += rho * target;
  return hermitian_part(acc);
}

SteResult ste_fixed_point(const SnapshotSet& samples, const ShrinkageTarget& target,
                          double rho, const SteConfig& cfg) {
  cfg.validate();
  const int n = samples.n();
  if (target.n() != n) throw invalid_input("ste_fixed_point: dimension mismatch");
  const double lo = ste_rho_lower_bound(n, samples.l_count());
  if (!(rho > lo && rho < 1.0))
    throw invalid_input("ste_fixed_point: rho outside the admissible interval");
  for (int j = 0; j < samples.l_count(); ++j)
    if (!(samples.data().col(j).squaredNorm() > 0.0))
      throw invalid_input("ste_fixed_point: zero-norm sample");

  CMat r = cfg.initial ? hermitian_part(*cfg.initial) : CMat::Identity(n, n);
  double dist = std::numeric_limits<double>::infinity();
  int it = 0;
  while (it < cfg.max_iter) {
    ++it;
    CMat next = ste_map(samples.data(), target.matrix(), rho, r);
    dist = (next - r).norm() / r.norm();
    r.swap(next);
    if (dist < cfg.delta)
      return SteResult{HermitianEstimate(r, Provenance::Ste, rho), it, dist, true};
  }
  return SteResult{HermitianEstimate(r, Provenance::Ste, rho), it, dist, false};
}

namespace lemma_bounds {

std::atomic<std::uint64_t>& evaluations() {
  static std::atomic<std::uint64_t> v{0};
  return v;
}

std::atomic<std::uint64_t>& violations() {
  static std::atomic<std::uint64_t> v{0};
  return v;
}

void reset() {
  evaluations().store(0);
  violations().store(0);
}

}  // namespace lemma_bounds

}  // namespace shrinkcv
