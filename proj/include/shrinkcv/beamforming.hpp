// MVDR weights and beamformer performance metrics.
#pragma once

#include "shrinkcv/types.hpp"

namespace shrinkcv {

// w = Sigma^-1 s / (s^H Sigma^-1 s); distortionless (w^H s = 1) and invariant
// to positive scaling of Sigma.
BeamformerWeights mvdr_weights(const HermitianEstimate& sigma, const SteeringVector& s);

// |s^H Rhat^-1 s|^2 / ((s^H Rhat^-1 R Rhat^-1 s)(s^H R^-1 s)), in (0, 1].
double sdr_loss(const HermitianEstimate& r_hat, const HermitianEstimate& r_true,
                const SteeringVector& s);

// || R/Tr(R) - Rhat/Tr(Rhat) ||_F^2 / || R/Tr(R) ||_F^2 (single-trial value).
double nmse(const HermitianEstimate& r_hat, const HermitianEstimate& r_true);

// w^H R w.
double output_power(const BeamformerWeights& w, const HermitianEstimate& r);

// s^H Sigma^-1 R Sigma^-1 s / (s^H Sigma^-1 s)^2 — the disturbance output power
// of the MVDR beamformer built from Sigma, evaluated against R.
double mvdr_disturbance_power(const HermitianEstimate& sigma, const HermitianEstimate& r,
                              const SteeringVector& s);

inline double to_db(double power_ratio) { return 10.0 * std::log10(power_ratio); }

}  // namespace shrinkcv
