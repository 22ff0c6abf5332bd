// Covariance / scatter estimators: sample covariance, normalized sample
// covariance, linear shrinkage, and the shrinkage Tyler fixed point.
#pragma once

#include "shrinkcv/types.hpp"

namespace shrinkcv {

// (1/L) sum_l x_l x_l^H.
HermitianEstimate scm(const SnapshotSet& samples);

// (N/L) sum_l y_l y_l^H / (y_l^H y_l); trace equals N.
HermitianEstimate nscm(const SnapshotSet& samples);

// (1 - rho) * Sigma + rho * T for rho in [0, 1).
HermitianEstimate shrink(const HermitianEstimate& sigma, const ShrinkageTarget& target,
                         double rho);

// ||a - b||_F / ||b||_F.
double relative_distance(const HermitianEstimate& a, const HermitianEstimate& b);

struct SteResult {
  HermitianEstimate estimate;
  int iterations = 0;
  double final_distance = 0.0;
  bool converged = false;
};

// Admissible shrinkage interval (max(0, 1 - L/N), 1) for the Tyler fixed point.
double ste_rho_lower_bound(int n, int l_count);

// Iterates R <- (1-rho) (1/L) sum_l y_l y_l^H / ((1/N) y_l^H R^-1 y_l) + rho T
// until the successive relative distance drops below cfg.delta or
// cfg.max_iter is reached.  Non-convergence is carried in the result.
SteResult ste_fixed_point(const SnapshotSet& samples, const ShrinkageTarget& target,
                          double rho, const SteConfig& cfg = {});

// One application of the Tyler-weighted-average map above (shared with the
// iterative tuners; also the residual check used by tests).
CMat ste_map(const CMat& samples, const CMat& target, double rho, const CMat& current);

// Per-sample Tyler weights (1/N) y_l^H R^-1 y_l for a positive-definite R.
Eigen::VectorXd tyler_weights(const CMat& samples, const CMat& r);

// Samples scaled to q_l = y_l / sqrt((1/N) y_l^H R^-1 y_l).
CMat weighted_samples(const CMat& samples, const CMat& r);

}  // namespace shrinkcv
