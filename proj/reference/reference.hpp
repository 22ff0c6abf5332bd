// Serial brute-force reference implementations used by the test suites and
// the selftest command.  These deliberately avoid the fast paths in the main
// library: explicit per-split inversions, naive accumulation loops, and
// eigenvalue-sum forms, so the two routes stay independent.
#pragma once

#include "shrinkcv/estimators.hpp"
#include "shrinkcv/tuning.hpp"
#include "shrinkcv/types.hpp"

#include <vector>

namespace shrinkcv::ref {

// Naive double-loop accumulation of (1/L) sum x x^H.
CMat scm_naive(const CMat& x);

// Naive per-sample-normalized accumulation (N/L) sum y y^H / (y^H y).
CMat nscm_naive(const CMat& y);

// Element-wise Frobenius ratio ||a - b||_F / ||b||_F.
double relative_distance_naive(const CMat& a, const CMat& b);

// w^H R w by explicit double loop.
double quadratic_form_naive(const CVec& w, const CMat& r);

// Explicit leave-one-out evaluation: for each l form
// R_l(alpha) = SCM + alpha T - (1/L) x_l x_l^H, invert it, and average
// |s^H R_l^-1 x_l / s^H R_l^-1 s|^2.
double loocv_brute(const CMat& x, const CVec& s, const CMat& t, double alpha);

// Asymptotic cost for the identity target in the eigenvalue-sum form
// (the diagonal-loading expression evaluated directly from the SCM spectrum).
double ae_cost_identity_evd(const CMat& x, const CVec& s, double alpha);

// Residual of the shrinkage Tyler fixed point: ||F(R) - R||_F / ||R||_F.
double ste_residual(const SnapshotSet& samples, const ShrinkageTarget& target, double rho,
                    const HermitianEstimate& r);

// Strict-split LOOCV for the shrinkage Tyler estimator: runs the fixed-point
// iteration to convergence on every leave-one-out subset and accumulates the
// plug-in-weighted out-of-sample output power.  Tiny instances only
// (N <= 8, L <= 16).
double strict_loocv_ste_cost(const SnapshotSet& samples, const SteeringVector& s,
                             const ShrinkageTarget& target, double rho,
                             const HermitianEstimate& r_plugin, const SteConfig& cfg);

// Spearman rank correlation.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace shrinkcv::ref
