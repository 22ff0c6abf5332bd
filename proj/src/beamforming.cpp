#include "shrinkcv/beamforming.hpp"

#include <Eigen/Cholesky>

namespace shrinkcv {

namespace {

// Sigma^-1 s via Cholesky; throws numerical_failure on non-PD input.  LLT can
// report success on an exactly singular matrix when roundoff keeps the
// trailing pivots positive, so near-singularity is screened with the
// factorization's condition estimate.
CVec pd_solve(const CMat& sigma, const CVec& s, const char* where) {
  Eigen::LLT<CMat> llt(sigma);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-13))
    throw numerical_failure(std::string(where) + ": matrix singular or not positive definite");
  return llt.solve(s);
}

}  // namespace

BeamformerWeights mvdr_weights(const HermitianEstimate& sigma, const SteeringVector& s) {
  if (sigma.n() != s.n()) throw invalid_input("mvdr_weights: dimension mismatch");
  const CVec u = pd_solve(sigma.matrix(), s.vec(), "mvdr_weights");
  const double den = s.vec().dot(u).real();
  if (!(den > 0.0)) throw numerical_failure("mvdr_weights: nonpositive s^H Sigma^-1 s");
  return BeamformerWeights{u / den};
}

double mvdr_disturbance_power(const HermitianEstimate& sigma, const HermitianEstimate& r,
                              const SteeringVector& s) {
  if (sigma.n() != s.n() || r.n() != s.n())
    throw invalid_input("mvdr_disturbance_power: dimension mismatch");
  const CVec u = pd_solve(sigma.matrix(), s.vec(), "mvdr_disturbance_power");
  const double den = s.vec().dot(u).real();
  if (!(den > 0.0))
    throw numerical_failure("mvdr_disturbance_power: nonpositive s^H Sigma^-1 s");
  const double num = u.dot(r.matrix() * u).real();
  return num / (den * den);
}

double sdr_loss(const HermitianEstimate& r_hat, const HermitianEstimate& r_true,
                const SteeringVector& s) {
  if (r_hat.n() != s.n() || r_true.n() != s.n())
    throw invalid_input("sdr_loss: dimension mismatch");
  const CVec u = pd_solve(r_hat.matrix(), s.vec(), "sdr_loss");
  const CVec v = pd_solve(r_true.matrix(), s.vec(), "sdr_loss");
  const double shu = s.vec().dot(u).real();
  const double disturb = u.dot(r_true.matrix() * u).real();
  const double opt = s.vec().dot(v).real();
  return (shu * shu) / (disturb * opt);
}

double nmse(const HermitianEstimate& r_hat, const HermitianEstimate& r_true) {
  if (r_hat.n() != r_true.n()) throw invalid_input("nmse: dimension mismatch");
  const double tr_hat = r_hat.matrix().trace().real();
  const double tr_true = r_true.matrix().trace().real();
  if (!(tr_hat > 0.0) || !(tr_true > 0.0)) throw invalid_input("nmse: nonpositive trace");
  const CMat a = r_true.matrix() / tr_true;
  const CMat b = r_hat.matrix() / tr_hat;
  return (a - b).squaredNorm() / a.squaredNorm();
}

double output_power(const BeamformerWeights& w, const HermitianEstimate& r) {
  if (w.w.size() != r.n()) throw invalid_input("output_power: dimension mismatch");
  return w.w.dot(r.matrix() * w.w).real();
}

}  // namespace shrinkcv
