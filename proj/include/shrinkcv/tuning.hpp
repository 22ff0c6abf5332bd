// Shrinkage-factor selection: LOOCV and asymptotic cost functions with their
// fast evaluation paths, grid search, the rho <-> alpha mapping, and the
// oracle choices.
#pragma once

#include "shrinkcv/beamforming.hpp"
#include "shrinkcv/estimators.hpp"
#include "shrinkcv/types.hpp"

#include <utility>
#include <vector>

namespace shrinkcv {

// Candidate shrinkage factors, strictly increasing inside (0, 1).
class TuningGrid {
 public:
  explicit TuningGrid(std::vector<double> rho_values);

  // count points uniformly spaced over [rho_lo + eps, 1 - eps].
  static TuningGrid uniform(int count, double rho_lo = 0.0, double eps = 1e-3);

  const std::vector<double>& rho_values() const { return rho_; }
  int count() const { return static_cast<int>(rho_.size()); }
  double step() const;

 private:
  std::vector<double> rho_;
};

struct TuningResult {
  double rho_star = 0.0;
  double alpha_star = 0.0;
  std::vector<std::pair<double, double>> curve;  // (rho, cost)
  bool converged = true;
  int iterations = 0;                  // outer iterations (adaptive STE tuners)
  std::vector<double> rho_history;     // per-iteration rho (adaptive tuners)
  std::vector<double> distance_history;  // per-iteration successive distance
  int degenerate_iterations = 0;       // iterations that reused the previous rho
};

// alpha = rho (L-1) / (L (1-rho)); the additive-loading parameter matching a
// convex-combination weight rho under leave-one-out sample counts.
double rho_to_alpha(double rho, int l_count);

// LOOCV cost for Gaussian samples with general target (single factorization
// of SCM + alpha*T reused across the L per-sample terms).
double loocv_cost_gaussian(const SnapshotSet& samples, const SteeringVector& s,
                           const ShrinkageTarget& target, double alpha);

// Identity-target fast path: one EVD of the SCM, then O(L*N) per alpha.
std::vector<double> loocv_cost_gaussian_evd(const SnapshotSet& samples,
                                            const SteeringVector& s,
                                            const std::vector<double>& alpha_grid);

// Asymptotic (large N, L) cost with the trace form of the average factor.
double ae_cost_gaussian(const SnapshotSet& samples, const SteeringVector& s,
                        const ShrinkageTarget& target, double alpha);

TuningResult tune_s2cm_cv(const SnapshotSet& samples, const SteeringVector& s,
                          const ShrinkageTarget& target, const TuningGrid& grid);

TuningResult tune_s2cm_ae(const SnapshotSet& samples, const SteeringVector& s,
                          const ShrinkageTarget& target, const TuningGrid& grid);

// Compound-Gaussian LOOCV cost with a fixed plug-in scatter matrix
// (trace-normalized to N) used to weight the samples.
double ste_cv1_cost(const SnapshotSet& samples, const SteeringVector& s,
                    const ShrinkageTarget& target, double alpha,
                    const HermitianEstimate& r_plugin);

// Same arithmetic with the current iterate as plug-in (no trace
// normalization; the cost is scale aware through the weights).
double ste_cv2_cost(const SnapshotSet& samples, const SteeringVector& s,
                    const ShrinkageTarget& target, double alpha,
                    const HermitianEstimate& r_current);

// Asymptotic cost on the weighted samples.
double ste_ae_cost(const SnapshotSet& samples, const SteeringVector& s,
                   const ShrinkageTarget& target, double alpha,
                   const HermitianEstimate& r_current);

struct SteTuneOutcome {
  TuningResult tuning;
  HermitianEstimate estimate;
  SteResult solve;  // final fixed-point solve (CV-I) or last update state
};

// Fixed plug-in variant: tune once, then solve the fixed point at rho*.
// Default plug-in is the trace-normalized NSCM; a caller-provided plug-in is
// trace-normalized on entry.
SteTuneOutcome tune_ste_cv1(const SnapshotSet& samples, const SteeringVector& s,
                            const ShrinkageTarget& target, const TuningGrid& grid,
                            const SteConfig& cfg = {},
                            const HermitianEstimate* r_plugin = nullptr);

// Adaptive variants: rho re-tuned at every iteration from the current
// iterate.  After the coarse grid argmin the choice is refined by
// golden-section inside the bracketing interval so the joint iteration can
// meet the distance threshold (a grid-quantized rho keeps the iterate
// hopping between adjacent candidates).
SteTuneOutcome tune_ste_cv2(const SnapshotSet& samples, const SteeringVector& s,
                            const ShrinkageTarget& target, const TuningGrid& grid,
                            const SteConfig& cfg = {});

SteTuneOutcome tune_ste_ae(const SnapshotSet& samples, const SteeringVector& s,
                           const ShrinkageTarget& target, const TuningGrid& grid,
                           const SteConfig& cfg = {});

// Simulation-only baselines minimizing the true disturbance output power.
TuningResult oracle_s2cm(const SnapshotSet& samples, const SteeringVector& s,
                         const ShrinkageTarget& target, const HermitianEstimate& r_true,
                         const TuningGrid& grid);

struct OracleSteOutcome {
  TuningResult tuning;
  HermitianEstimate estimate;
};

// Solves the fixed point at every grid rho (warm-started along the grid; the
// fixed point is unique so this only changes iteration counts) and keeps the
// minimizer of the true output power.
OracleSteOutcome oracle_ste(const SnapshotSet& samples, const SteeringVector& s,
                            const ShrinkageTarget& target, const HermitianEstimate& r_true,
                            const TuningGrid& grid, const SteConfig& cfg = {});

}  // namespace shrinkcv
