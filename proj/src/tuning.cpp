#include "shrinkcv/tuning.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace shrinkcv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shared Cholesky-path cost cores.  The sample matrix may be raw snapshots
// (Gaussian costs) or Tyler-weighted samples (STE costs); the arithmetic is
// identical.

void check_alpha(double alpha, int n, int l, const char* where) {
  if (!(alpha >= 0.0)) throw invalid_input(std::string(where) + ": alpha must be >= 0");
  if (alpha == 0.0 && l < n)
    throw invalid_input(std::string(where) + ": alpha = 0 requires L >= N");
}

struct FactoredShrunk {
  Eigen::LLT<CMat> llt;
  explicit FactoredShrunk(const CMat& x, const CMat& t, double alpha) {
    const double l = static_cast<double>(x.cols());
    CMat rt = hermitian_part(x * x.adjoint() / l + alpha * t);
    llt.compute(rt);
    if (llt.info() != Eigen::Success)
      throw numerical_failure("shrunk covariance not positive definite");
  }
};

double loocv_cost_core(const CMat& x, const CVec& s, const CMat& t, double alpha) {
  const int l = static_cast<int>(x.cols());
  if (l < 2) throw invalid_input("loocv cost: need at least 2 samples");
  check_alpha(alpha, static_cast<int>(x.rows()), l, "loocv cost");
  FactoredShrunk f(x, t, alpha);
  const CVec b = f.llt.solve(s);
  const double srs = s.dot(b).real();
  if (!(srs > 0.0)) throw numerical_failure("loocv cost: nonpositive s^H R^-1 s");
  const CMat z = f.llt.solve(x);
  double acc = 0.0;
  for (int j = 0; j < l; ++j) {
    const cxd srx = b.dot(x.col(j));
    const double xrx = x.col(j).dot(z.col(j)).real();
    const double g =
        lemma_bounds::checked(1.0 - (xrx - std::norm(srx) / srs) / l, "loocv cost");
    acc += std::norm(srx) / (g * g);
  }
  return acc / (l * srs * srs);
}

double ae_cost_core(const CMat& x, const CVec& s, const CMat& t, double alpha) {
  const int l = static_cast<int>(x.cols());
  if (!(alpha > 0.0)) throw invalid_input("ae cost: alpha must be > 0");
  FactoredShrunk f(x, t, alpha);
  const CVec b = f.llt.solve(s);
  const double srs = s.dot(b).real();
  if (!(srs > 0.0)) throw numerical_failure("ae cost: nonpositive s^H R^-1 s");
  const CMat z = f.llt.solve(x);
  double trace = 0.0;
  double num = 0.0;
  for (int j = 0; j < l; ++j) {
    trace += x.col(j).dot(z.col(j)).real();
    num += std::norm(b.dot(x.col(j)));
  }
  trace /= l;  // Tr(SCM R^-1)
  num /= l;    // s^H R^-1 SCM R^-1 s
  const double h = lemma_bounds::checked(1.0 - trace / l, "ae cost");
  return num / (h * h * srs * srs);
}

// Identity-target evaluator: one EVD of the SCM of the given samples, then
// each alpha costs O(L*N) (cv) or O(N) (ae).
class IdentityCostEvaluator {
 public:
  IdentityCostEvaluator(const CMat& x, const CVec& s) : l_(static_cast<int>(x.cols())) {
    const CMat scm_x = hermitian_part(x * x.adjoint() / static_cast<double>(l_));
    Eigen::SelfAdjointEigenSolver<CMat> es(scm_x);
    if (es.info() != Eigen::Success)
      throw numerical_failure("identity cost evaluator: eigendecomposition failed");
    lam_ = es.eigenvalues();
    const CMat& v = es.eigenvectors();
    p_ = v.adjoint() * s;
    w_ = v.adjoint() * x;
    p2_ = p_.cwiseAbs2();
    w2_ = w_.cwiseAbs2();
  }

  int l_count() const { return l_; }

  double cv_cost(double alpha) const {
    if (l_ < 2) throw invalid_input("loocv cost: need at least 2 samples");
    check_alpha(alpha, static_cast<int>(lam_.size()), l_, "loocv cost");
    const Eigen::ArrayXd den = lam_.array() + alpha;
    if (!(den.minCoeff() > 0.0))
      throw numerical_failure("loocv cost: shrunk spectrum not positive");
    const double cs = (p2_.array() / den).sum();
    const CVec u = (p_.conjugate().array() / den).matrix();
    const Eigen::RowVectorXcd csx = u.transpose() * w_;
    const Eigen::RowVectorXd cx = (w2_.array().colwise() / den).colwise().sum();
    double acc = 0.0;
    for (int j = 0; j < l_; ++j) {
      const double csx2 = std::norm(csx(j));
      const double g =
          lemma_bounds::checked(1.0 - (cx(j) - csx2 / cs) / l_, "loocv cost");
      acc += csx2 / (g * g);
    }
    return acc / (l_ * cs * cs);
  }

  double ae_cost(double alpha) const {
    if (!(alpha > 0.0)) throw invalid_input("ae cost: alpha must be > 0");
    const Eigen::ArrayXd den = lam_.array() + alpha;
    const double cs = (p2_.array() / den).sum();
    const double num = (lam_.array() * p2_.array() / (den * den)).sum();
    const double trace = (lam_.array() / den).sum();
    const double h = lemma_bounds::checked(1.0 - trace / l_, "ae cost");
    return num / (h * h * cs * cs);
  }

 private:
  int l_;
  Eigen::VectorXd lam_;
  CVec p_;
  CMat w_;
  Eigen::VectorXd p2_;
  Eigen::MatrixXd w2_;
};

template <class F>
std::vector<double> evaluate_grid(int count, F&& f) {
  std::vector<double> out(static_cast<size_t>(count));
  std::vector<std::exception_ptr> errs(static_cast<size_t>(count));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    try {
      out[i] = f(i);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (const auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

// Variant for the adaptive tuners: numerical failures at individual grid
// points become +inf instead of aborting the iteration.
template <class F>
std::vector<double> evaluate_grid_tolerant(int count, F&& f) {
  std::vector<double> out(static_cast<size_t>(count));
  std::vector<std::exception_ptr> errs(static_cast<size_t>(count));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    try {
      out[i] = f(i);
    } catch (const numerical_failure&) {
      out[i] = kInf;
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (const auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

int argmin_first(const std::vector<double>& v) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(v.size()); ++i) {
    if (std::isfinite(v[i]) && (best < 0 || v[i] < v[best])) best = i;
  }
  return best;
}

// Golden-section minimization; 48 shrink steps take the bracket below 1e-9
// of its width.  Cost failures inside the bracket are treated as +inf.
template <class F>
double golden_min(F&& f, double a, double b, int steps = 48) {
  auto safe = [&](double x) {
    try {
      return f(x);
    } catch (const numerical_failure&) {
      return kInf;
    }
  };
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = safe(c);
  double fd = safe(d);
  for (int i = 0; i < steps; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = safe(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = safe(d);
    }
  }
  return 0.5 * (a + b);
}

// Continuous refinement inside the bracket around the coarse argmin, falling
// back to the grid point when the bracket is not unimodal enough for the
// refined point to actually improve on it.
template <class F>
double refine_rho(F&& cost_at, const TuningGrid& grid, int best,
                  const std::vector<double>& coarse_costs) {
  const auto& rho = grid.rho_values();
  if (grid.count() == 1) return rho[static_cast<size_t>(best)];
  const double lo = rho[static_cast<size_t>(std::max(best - 1, 0))];
  const double hi = rho[static_cast<size_t>(std::min(best + 1, grid.count() - 1))];
  const double candidate = golden_min(cost_at, lo, hi);
  double cand_cost = kInf;
  try {
    cand_cost = cost_at(candidate);
  } catch (const numerical_failure&) {
  }
  return cand_cost <= coarse_costs[static_cast<size_t>(best)]
             ? candidate
             : rho[static_cast<size_t>(best)];
}

std::vector<std::pair<double, double>> make_curve(const std::vector<double>& rho,
                                                  const std::vector<double>& cost) {
  std::vector<std::pair<double, double>> c(rho.size());
  for (size_t i = 0; i < rho.size(); ++i) c[i] = {rho[i], cost[i]};
  return c;
}

void check_common(const SnapshotSet& samples, const SteeringVector& s,
                  const ShrinkageTarget& target, const char* where) {
  if (samples.n() != s.n() || samples.n() != target.n())
    throw invalid_input(std::string(where) + ": dimension mismatch");
}

void check_ste_grid(const TuningGrid& grid, const SnapshotSet& samples, const char* where) {
  const double lo = ste_rho_lower_bound(samples.n(), samples.l_count());
  if (!(grid.rho_values().front() > lo))
    throw invalid_input(std::string(where) + ": grid outside the admissible interval");
}

HermitianEstimate trace_normalized(const HermitianEstimate& r) {
  const double tr = r.matrix().trace().real();
  if (!(tr > 0.0)) throw invalid_input("plug-in matrix has nonpositive trace");
  return HermitianEstimate(r.matrix() * (static_cast<double>(r.n()) / tr), r.provenance(),
                           r.rho());
}

double weighted_cost(const SnapshotSet& samples, const SteeringVector& s,
                     const ShrinkageTarget& target, double alpha,
                     const HermitianEstimate& plugin, bool ae, const char* where) {
  check_common(samples, s, target, where);
  if (plugin.n() != samples.n()) throw invalid_input(std::string(where) + ": plug-in size");
  const CMat q = weighted_samples(samples.data(), plugin.matrix());
  return ae ? ae_cost_core(q, s.vec(), target.matrix(), alpha)
            : loocv_cost_core(q, s.vec(), target.matrix(), alpha);
}

TuningResult tune_gaussian(const SnapshotSet& samples, const SteeringVector& s,
                           const ShrinkageTarget& target, const TuningGrid& grid, bool ae,
                           const char* where) {
  check_common(samples, s, target, where);
  if (samples.l_count() < 2) throw invalid_input(std::string(where) + ": need L >= 2");
  const int l = samples.l_count();
  const auto& rho = grid.rho_values();
  std::vector<double> costs;
  if (!ae && target.kind() == ShrinkageTarget::Kind::Identity) {
    IdentityCostEvaluator ev(samples.data(), s.vec());
    costs = evaluate_grid(grid.count(),
                          [&](int i) { return ev.cv_cost(rho_to_alpha(rho[i], l)); });
  } else {
    costs = evaluate_grid(grid.count(), [&](int i) {
      const double a = rho_to_alpha(rho[i], l);
      return ae ? ae_cost_core(samples.data(), s.vec(), target.matrix(), a)
                : loocv_cost_core(samples.data(), s.vec(), target.matrix(), a);
    });
  }
  const int best = argmin_first(costs);
  if (best < 0) throw numerical_failure(std::string(where) + ": no finite cost on grid");
  TuningResult r;
  r.rho_star = rho[best];
  r.alpha_star = rho_to_alpha(r.rho_star, l);
  r.curve = make_curve(rho, costs);
  return r;
}

SteTuneOutcome tune_ste_adaptive(const SnapshotSet& samples, const SteeringVector& s,
                                 const ShrinkageTarget& target, const TuningGrid& grid,
                                 const SteConfig& cfg, bool ae, const char* where) {
  check_common(samples, s, target, where);
  check_ste_grid(grid, samples, where);
  cfg.validate();
  const int n = samples.n();
  const int l = samples.l_count();
  const auto& rho = grid.rho_values();
  const bool identity = target.kind() == ShrinkageTarget::Kind::Identity;

  CMat r = cfg.initial ? hermitian_part(*cfg.initial) : CMat::Identity(n, n);
  TuningResult tr;
  tr.converged = false;
  double prev_rho = -1.0;
  double dist = std::numeric_limits<double>::infinity();
  std::vector<double> costs;

  for (int k = 0; k < cfg.max_iter; ++k) {
    const CMat q = weighted_samples(samples.data(), r);
    std::optional<IdentityCostEvaluator> ev;
    if (identity) ev.emplace(q, s.vec());
    auto cost_at = [&](double x) {
      const double a = rho_to_alpha(x, l);
      if (ev) return ae ? ev->ae_cost(a) : ev->cv_cost(a);
      return ae ? ae_cost_core(q, s.vec(), target.matrix(), a)
                : loocv_cost_core(q, s.vec(), target.matrix(), a);
    };
    costs = evaluate_grid_tolerant(grid.count(), [&](int i) { return cost_at(rho[i]); });
    const int best = argmin_first(costs);
    double rho_k;
    if (best < 0) {
      if (prev_rho < 0.0)
        throw numerical_failure(std::string(where) + ": no finite cost on grid");
      rho_k = prev_rho;
      ++tr.degenerate_iterations;
    } else {
      rho_k = refine_rho(cost_at, grid, best, costs);
    }

    tr.rho_history.push_back(rho_k);
    prev_rho = rho_k;
    CMat next = ste_map(samples.data(), target.matrix(), rho_k, r);
    dist = (next - r).norm() / r.norm();
    tr.distance_history.push_back(dist);
    r.swap(next);
    tr.iterations = k + 1;
    if (dist < cfg.delta) {
      tr.converged = true;
      break;
    }
  }

  tr.rho_star = tr.rho_history.back();
  tr.alpha_star = rho_to_alpha(tr.rho_star, l);
  tr.curve = make_curve(rho, costs);
  HermitianEstimate est(r, Provenance::Ste, tr.rho_star);
  SteResult solve{est, tr.iterations, dist, tr.converged};
  return SteTuneOutcome{std::move(tr), std::move(est), std::move(solve)};
}

}  // namespace

TuningGrid::TuningGrid(std::vector<double> rho_values) : rho_(std::move(rho_values)) {
  if (rho_.empty()) throw invalid_input("TuningGrid: empty grid");
  double prev = 0.0;
  for (double r : rho_) {
    if (!(r > 0.0 && r < 1.0)) throw invalid_input("TuningGrid: rho outside (0, 1)");
    if (!(r > prev)) throw invalid_input("TuningGrid: values must be strictly increasing");
    prev = r;
  }
}

TuningGrid TuningGrid::uniform(int count, double rho_lo, double eps) {
  if (count < 1) throw invalid_input("TuningGrid: count must be >= 1");
  if (!(rho_lo >= 0.0 && rho_lo < 1.0)) throw invalid_input("TuningGrid: bad lower bound");
  const double lo = rho_lo + eps;
  const double hi = 1.0 - eps;
  if (!(lo < hi)) throw invalid_input("TuningGrid: empty interval");
  std::vector<double> rho(static_cast<size_t>(count));
  if (count == 1) {
    rho[0] = 0.5 * (lo + hi);
  } else {
    const double step = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i) rho[static_cast<size_t>(i)] = lo + step * i;
  }
  return TuningGrid(std::move(rho));
}

double TuningGrid::step() const {
  if (rho_.size() < 2) return 0.0;
  double s = 0.0;
  for (size_t i = 1; i < rho_.size(); ++i) s = std::max(s, rho_[i] - rho_[i - 1]);
  return s;
}

double rho_to_alpha(double rho, int l_count) {
  if (l_count < 2) throw invalid_input("rho_to_alpha: need L >= 2");
  if (!(rho >= 0.0 && rho < 1.0)) throw invalid_input("rho_to_alpha: rho must lie in [0, 1)");
  return rho * (l_count - 1) / (l_count * (1.0 - rho));
}

double loocv_cost_gaussian(const SnapshotSet& samples, const SteeringVector& s,
                           const ShrinkageTarget& target, double alpha) {
  check_common(samples, s, target, "loocv_cost_gaussian");
  return loocv_cost_core(samples.data(), s.vec(), target.matrix(), alpha);
}

std::vector<double> loocv_cost_gaussian_evd(const SnapshotSet& samples,
                                            const SteeringVector& s,
                                            const std::vector<double>& alpha_grid) {
  if (samples.n() != s.n()) throw invalid_input("loocv_cost_gaussian_evd: dimension mismatch");
  if (alpha_grid.empty()) throw invalid_input("loocv_cost_gaussian_evd: empty grid");
  IdentityCostEvaluator ev(samples.data(), s.vec());
  return evaluate_grid(static_cast<int>(alpha_grid.size()),
                       [&](int i) { return ev.cv_cost(alpha_grid[static_cast<size_t>(i)]); });
}

double ae_cost_gaussian(const SnapshotSet& samples, const SteeringVector& s,
                        const ShrinkageTarget& target, double alpha) {
  check_common(samples, s, target, "ae_cost_gaussian");
  return ae_cost_core(samples.data(), s.vec(), target.matrix(), alpha);
}

TuningResult tune_s2cm_cv(const SnapshotSet& samples, const SteeringVector& s,
                          const ShrinkageTarget& target, const TuningGrid& grid) {
  return tune_gaussian(samples, s, target, grid, false, "tune_s2cm_cv");
}

TuningResult tune_s2cm_ae(const SnapshotSet& samples, const SteeringVector& s,
                          const ShrinkageTarget& target, const TuningGrid& grid) {
  return tune_gaussian(samples, s, target, grid, true, "tune_s2cm_ae");
}

double ste_cv1_cost(const SnapshotSet& samples, const SteeringVector& s,
                    const ShrinkageTarget& target, double alpha,
                    const HermitianEstimate& r_plugin) {
  const double tr = r_plugin.matrix().trace().real();
  if (std::abs(tr - samples.n()) > 1e-6 * samples.n())
    throw invalid_input("ste_cv1_cost: plug-in must be trace-normalized to N");
  return weighted_cost(samples, s, target, alpha, r_plugin, false, "ste_cv1_cost");
}

double ste_cv2_cost(const SnapshotSet& samples, const SteeringVector& s,
                    const ShrinkageTarget& target, double alpha,
                    const HermitianEstimate& r_current) {
  return weighted_cost(samples, s, target, alpha, r_current, false, "ste_cv2_cost");
}

double ste_ae_cost(const SnapshotSet& samples, const SteeringVector& s,
                   const ShrinkageTarget& target, double alpha,
                   const HermitianEstimate& r_current) {
  return weighted_cost(samples, s, target, alpha, r_current, true, "ste_ae_cost");
}

SteTuneOutcome tune_ste_cv1(const SnapshotSet& samples, const SteeringVector& s,
                            const ShrinkageTarget& target, const TuningGrid& grid,
                            const SteConfig& cfg, const HermitianEstimate* r_plugin) {
  check_common(samples, s, target, "tune_ste_cv1");
  check_ste_grid(grid, samples, "tune_ste_cv1");
  const int l = samples.l_count();
  const HermitianEstimate plugin =
      r_plugin ? trace_normalized(*r_plugin) : nscm(samples);
  const CMat q = weighted_samples(samples.data(), plugin.matrix());
  const auto& rho = grid.rho_values();
  std::vector<double> costs;
  if (target.kind() == ShrinkageTarget::Kind::Identity) {
    IdentityCostEvaluator ev(q, s.vec());
    costs = evaluate_grid(grid.count(),
                          [&](int i) { return ev.cv_cost(rho_to_alpha(rho[i], l)); });
  } else {
    costs = evaluate_grid(grid.count(), [&](int i) {
      return loocv_cost_core(q, s.vec(), target.matrix(), rho_to_alpha(rho[i], l));
    });
  }
  const int best = argmin_first(costs);
  if (best < 0) throw numerical_failure("tune_ste_cv1: no finite cost on grid");
  TuningResult tr;
  tr.rho_star = rho[best];
  tr.alpha_star = rho_to_alpha(tr.rho_star, l);
  tr.curve = make_curve(rho, costs);
  SteResult solve = ste_fixed_point(samples, target, tr.rho_star, cfg);
  tr.converged = solve.converged;
  tr.iterations = solve.iterations;
  HermitianEstimate est = solve.estimate;
  return SteTuneOutcome{std::move(tr), std::move(est), std::move(solve)};
}

SteTuneOutcome tune_ste_cv2(const SnapshotSet& samples, const SteeringVector& s,
                            const ShrinkageTarget& target, const TuningGrid& grid,
                            const SteConfig& cfg) {
  return tune_ste_adaptive(samples, s, target, grid, cfg, false, "tune_ste_cv2");
}

SteTuneOutcome tune_ste_ae(const SnapshotSet& samples, const SteeringVector& s,
                           const ShrinkageTarget& target, const TuningGrid& grid,
                           const SteConfig& cfg) {
  return tune_ste_adaptive(samples, s, target, grid, cfg, true, "tune_ste_ae");
}

TuningResult oracle_s2cm(const SnapshotSet& samples, const SteeringVector& s,
                         const ShrinkageTarget& target, const HermitianEstimate& r_true,
                         const TuningGrid& grid) {
  check_common(samples, s, target, "oracle_s2cm");
  const HermitianEstimate sample_cov = scm(samples);
  const auto& rho = grid.rho_values();
  std::vector<double> costs = evaluate_grid(grid.count(), [&](int i) {
    return mvdr_disturbance_power(shrink(sample_cov, target, rho[i]), r_true, s);
  });
  const int best = argmin_first(costs);
  if (best < 0) throw numerical_failure("oracle_s2cm: no finite cost on grid");
  TuningResult tr;
  tr.rho_star = rho[best];
  tr.alpha_star = rho_to_alpha(tr.rho_star, samples.l_count());
  tr.curve = make_curve(rho, costs);
  return tr;
}

OracleSteOutcome oracle_ste(const SnapshotSet& samples, const SteeringVector& s,
                            const ShrinkageTarget& target, const HermitianEstimate& r_true,
                            const TuningGrid& grid, const SteConfig& cfg) {
  check_common(samples, s, target, "oracle_ste");
  check_ste_grid(grid, samples, "oracle_ste");
  cfg.validate();
  const auto& rho = grid.rho_values();
  std::vector<double> costs(rho.size(), kInf);
  SteConfig chain = cfg;
  int best = -1;
  SteResult best_solve{HermitianEstimate(CMat::Identity(samples.n(), samples.n()),
                                         Provenance::Oracle),
                       0, 0.0, false};
  for (size_t i = 0; i < rho.size(); ++i) {
    SteResult sol = ste_fixed_point(samples, target, rho[i], chain);
    chain.initial = sol.estimate.matrix();
    costs[i] = mvdr_disturbance_power(sol.estimate, r_true, s);
    if (best < 0 || costs[i] < costs[static_cast<size_t>(best)]) {
      best = static_cast<int>(i);
      best_solve = sol;
    }
  }
  TuningResult tr;
  tr.rho_star = rho[static_cast<size_t>(best)];
  tr.alpha_star = rho_to_alpha(tr.rho_star, samples.l_count());
  tr.curve = make_curve(rho, costs);
  tr.converged = best_solve.converged;
  tr.iterations = best_solve.iterations;
  HermitianEstimate est(best_solve.estimate.matrix(), Provenance::Oracle, tr.rho_star);
  return OracleSteOutcome{std::move(tr), std::move(est)};
}

}  // namespace shrinkcv
