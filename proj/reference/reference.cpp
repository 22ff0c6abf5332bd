#include "reference.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace shrinkcv::ref {

CMat scm_naive(const CMat& x) {
  const int n = static_cast<int>(x.rows());
  const int l = static_cast<int>(x.cols());
  CMat r = CMat::Zero(n, n);
  for (int k = 0; k < l; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(i, j) += x(i, k) * std::conj(x(j, k));
  return r / static_cast<double>(l);
}

CMat nscm_naive(const CMat& y) {
  const int n = static_cast<int>(y.rows());
  const int l = static_cast<int>(y.cols());
  CMat r = CMat::Zero(n, n);
  for (int k = 0; k < l; ++k) {
    double p = 0.0;
    for (int i = 0; i < n; ++i) p += std::norm(y(i, k));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(i, j) += y(i, k) * std::conj(y(j, k)) / p;
  }
  return r * (static_cast<double>(n) / static_cast<double>(l));
}

double relative_distance_naive(const CMat& a, const CMat& b) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      num += std::norm(a(i, j) - b(i, j));
      den += std::norm(b(i, j));
    }
  return std::sqrt(num) / std::sqrt(den);
}

double quadratic_form_naive(const CVec& w, const CMat& r) {
  cxd acc = 0.0;
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) acc += std::conj(w(i)) * r(i, j) * w(j);
  return acc.real();
}

double loocv_brute(const CMat& x, const CVec& s, const CMat& t, double alpha) {
  const int l = static_cast<int>(x.cols());
  const double dl = static_cast<double>(l);
  const CMat full = scm_naive(x) + alpha * t;
  double acc = 0.0;
  for (int k = 0; k < l; ++k) {
    const CMat rl = full - x.col(k) * x.col(k).adjoint() / dl;
    const CMat ri = rl.inverse();
    const cxd num = s.adjoint() * ri * x.col(k);
    const cxd den = s.adjoint() * ri * s;
    acc += std::norm(num / den);
  }
  return acc / dl;
}

double ae_cost_identity_evd(const CMat& x, const CVec& s, double alpha) {
  const int l = static_cast<int>(x.cols());
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(scm_naive(x)));
  const Eigen::VectorXd lam = es.eigenvalues();
  const CVec p = es.eigenvectors().adjoint() * s;
  double cs = 0.0, num = 0.0, tr = 0.0;
  for (int i = 0; i < lam.size(); ++i) {
    const double d = lam(i) + alpha;
    cs += std::norm(p(i)) / d;
    num += lam(i) * std::norm(p(i)) / (d * d);
    tr += lam(i) / d;
  }
  const double h = 1.0 - tr / l;
  return num / (h * h * cs * cs);
}

double ste_residual(const SnapshotSet& samples, const ShrinkageTarget& target, double rho,
                    const HermitianEstimate& r) {
  const CMat rhs = ste_map(samples.data(), target.matrix(), rho, r.matrix());
  return (rhs - r.matrix()).norm() / r.matrix().norm();
}

double strict_loocv_ste_cost(const SnapshotSet& samples, const SteeringVector& s,
                             const ShrinkageTarget& target, double rho,
                             const HermitianEstimate& r_plugin, const SteConfig& cfg) {
  const int n = samples.n();
  const int l = samples.l_count();
  if (n > 8 || l > 16)
    throw invalid_input("strict_loocv_ste_cost: tiny instances only (N <= 8, L <= 16)");
  if (l < 2) throw invalid_input("strict_loocv_ste_cost: need L >= 2");
  const Eigen::VectorXd w = tyler_weights(samples.data(), r_plugin.matrix());
  double acc = 0.0;
  for (int k = 0; k < l; ++k) {
    CMat rest(n, l - 1);
    int c = 0;
    for (int j = 0; j < l; ++j)
      if (j != k) rest.col(c++) = samples.data().col(j);
    const SteResult sol =
        ste_fixed_point(SnapshotSet(rest, samples.model()), target, rho, cfg);
    const CMat ri = sol.estimate.matrix().inverse();
    const cxd num = s.vec().adjoint() * ri * samples.data().col(k);
    const cxd den = s.vec().adjoint() * ri * s.vec();
    acc += std::norm(num) / (std::norm(den) * w(k));
  }
  return acc;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size();
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return v[i] < v[j]; });
    std::vector<double> r(n);
    for (size_t k = 0; k < n; ++k) r[static_cast<size_t>(idx[k])] = static_cast<double>(k);
    return r;
  };
  const std::vector<double> ra = ranks(a), rb = ranks(b);
  const double mean = (static_cast<double>(n) - 1.0) / 2.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (size_t k = 0; k < n; ++k) {
    cov += (ra[k] - mean) * (rb[k] - mean);
    va += (ra[k] - mean) * (ra[k] - mean);
    vb += (rb[k] - mean) * (rb[k] - mean);
  }
  return cov / std::sqrt(va * vb);
}

}  // namespace shrinkcv::ref
