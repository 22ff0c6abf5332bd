#include "shrinkcv/scenarios.hpp"

#include <cmath>

namespace shrinkcv {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kSpeedOfLight = 3.0e8;

CVec phase_ramp(double cycles_per_step, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) {
    const double phase = 2.0 * M_PI * cycles_per_step * i;
    v(i) = cxd(std::cos(phase), std::sin(phase));
  }
  return v;
}

}  // namespace

void UlaScenarioSpec::validate() const {
  if (n_antennas < 2) throw invalid_input("ula scenario: need at least 2 antennas");
  if (!(noise_power > 0.0)) throw invalid_input("ula scenario: noise power must be positive");
  if (!(element_spacing > 0.0)) throw invalid_input("ula scenario: bad element spacing");
  auto in_range = [](double a) { return a > -90.0 && a < 90.0; };
  if (!in_range(target_doa_deg)) throw invalid_input("ula scenario: target DOA out of range");
  for (double a : interferer_doas_deg)
    if (!in_range(a)) throw invalid_input("ula scenario: interferer DOA out of range");
}

void StapScenarioSpec::validate() const {
  if (n_pulses < 1 || n_elements < 1 || n() < 2)
    throw invalid_input("stap scenario: bad array dimensions");
  if (n_clutter_patches < 1) throw invalid_input("stap scenario: need clutter patches");
  if (!(nu > 0.0)) throw invalid_input("stap scenario: Gamma shape must be positive");
  if (!(cnr > 0.0)) throw invalid_input("stap scenario: CNR must be positive");
  if (!(noise_power > 0.0)) throw invalid_input("stap scenario: noise power must be positive");
  if (!(carrier_hz > 0.0) || !(prf_hz > 0.0))
    throw invalid_input("stap scenario: bad radar parameters");
}

SteeringVector ula_steering(double theta_deg, int n, double spacing_wavelengths) {
  if (!(theta_deg > -90.0 && theta_deg < 90.0))
    throw invalid_input("ula_steering: angle out of range");
  return SteeringVector(
      phase_ramp(spacing_wavelengths * std::sin(theta_deg * kDegToRad), n));
}

SteeringVector spacetime_steering(double fd, double fs, int nt, int ns) {
  if (nt < 1 || ns < 1) throw invalid_input("spacetime_steering: bad dimensions");
  const CVec ad = phase_ramp(fd, nt);
  const CVec as = phase_ramp(fs, ns);
  CVec a(nt * ns);
  for (int p = 0; p < nt; ++p)
    for (int q = 0; q < ns; ++q) a(p * ns + q) = ad(p) * as(q);
  return SteeringVector(std::move(a));
}

SnapshotSet ScenarioRealization::draw(std::uint64_t master_seed, std::uint64_t trial,
                                      int l_count) const {
  if (l_count < 1) throw invalid_input("ScenarioRealization::draw: need L >= 1");
  const int n = static_cast<int>(mixing_.rows());
  const int m = static_cast<int>(mixing_.cols());
  RngStream rng(master_seed, trial, StreamTag::Snapshots);
  const double noise_std = std::sqrt(noise_power_);
  CMat y(n, l_count);
  for (int j = 0; j < l_count; ++j) {
    double tex = 1.0;
    if (texture_shape_ > 0.0)
      tex = rng.gamma(texture_shape_, 1.0 / texture_shape_);
    const CVec gains = rng.complex_normal_vector(m);
    const CVec noise = rng.complex_normal_vector(n);
    y.col(j) = std::sqrt(tex) * (mixing_ * gains) + noise_std * noise;
  }
  return SnapshotSet(std::move(y), model_);
}

ScenarioRealization build_ula_scenario(const UlaScenarioSpec& spec) {
  spec.validate();
  const int n = spec.n_antennas;
  const int q = static_cast<int>(spec.interferer_doas_deg.size());
  const double power = std::pow(10.0, spec.inr_db / 10.0) * spec.noise_power;
  CMat a(n, std::max(q, 1));
  if (q == 0) {
    a = CMat::Zero(n, 1);  // no interference, noise only
  } else {
    for (int i = 0; i < q; ++i)
      a.col(i) = std::sqrt(power) *
                 ula_steering(spec.interferer_doas_deg[static_cast<size_t>(i)], n,
                              spec.element_spacing)
                     .vec();
  }
  CMat r = a * a.adjoint() + spec.noise_power * CMat::Identity(n, n);
  return ScenarioRealization(HermitianEstimate(r, Provenance::External),
                             ula_steering(spec.target_doa_deg, n, spec.element_spacing),
                             std::move(a), spec.noise_power, 0.0,
                             SnapshotSet::Model::Gaussian);
}

ScenarioRealization build_stap_scenario(const StapScenarioSpec& spec) {
  spec.validate();
  const int n = spec.n();
  const int nc = spec.n_clutter_patches;
  const double lambda = kSpeedOfLight / spec.carrier_hz;
  const double doppler_scale = 2.0 * spec.platform_velocity / (lambda * spec.prf_hz);
  CMat a(n, nc);
  for (int i = 0; i < nc; ++i) {
    // patches uniformly spaced over the half-open azimuth interval [0, 180)
    const double phi = (180.0 * i / nc) * kDegToRad;
    const double c = std::cos(phi);
    a.col(i) = spacetime_steering(doppler_scale * c, spec.element_spacing * c,
                                  spec.n_pulses, spec.n_elements)
                   .vec();
  }
  const double tau0 = spec.cnr * spec.noise_power / nc;
  CMat r = tau0 * (a * a.adjoint()) + spec.noise_power * CMat::Identity(n, n);
  return ScenarioRealization(
      HermitianEstimate(r, Provenance::External),
      spacetime_steering(spec.target_fd, spec.target_fs, spec.n_pulses, spec.n_elements),
      std::move(a), spec.noise_power, spec.nu, SnapshotSet::Model::CompoundGaussian);
}

ShrinkageTarget knowledge_target(const HermitianEstimate& r_true, double sigma_t_sq,
                                 RngStream& rng) {
  if (!(sigma_t_sq >= 0.0)) throw invalid_input("knowledge_target: negative variance");
  const int n = r_true.n();
  const double sigma_t = std::sqrt(sigma_t_sq);
  for (int attempt = 0; attempt < 10; ++attempt) {
    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) t(i) = 1.0 + sigma_t * rng.normal();
    const CMat m = r_true.matrix().cwiseProduct((t * t.transpose()).cast<cxd>());
    try {
      return ShrinkageTarget::general(m);
    } catch (const invalid_input&) {
      // not positive definite; resample t
    }
  }
  throw numerical_failure("knowledge_target: no positive-definite draw in 10 attempts");
}

}  // namespace shrinkcv
