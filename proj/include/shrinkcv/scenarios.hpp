// Reproducible experiment families: Gaussian ULA interference-plus-noise and
// compound-Gaussian STAP clutter.
#pragma once

#include "shrinkcv/rng.hpp"
#include "shrinkcv/types.hpp"

#include <vector>

namespace shrinkcv {

struct UlaScenarioSpec {
  int n_antennas = 20;
  std::vector<double> interferer_doas_deg = {30, 35, 40, 45, 50, 55, 60, 65, 70};
  double inr_db = 30.0;
  double noise_power = 1.0;
  double target_doa_deg = 0.0;
  double element_spacing = 0.5;  // wavelengths

  void validate() const;
};

struct StapScenarioSpec {
  int n_pulses = 8;    // N_t
  int n_elements = 4;  // N_s
  int n_clutter_patches = 401;
  double nu = 4.5;          // Gamma shape (scale 1/nu, unit mean)
  double cnr = 1000.0;      // linear clutter-to-noise ratio in the CUT
  double noise_power = 1.0;
  double target_fd = 0.2;
  double target_fs = 0.5;
  double carrier_hz = 1.2e9;
  double prf_hz = 2e3;
  double platform_velocity = 125.0;  // m/s
  double element_spacing = 0.5;      // wavelengths

  void validate() const;
  int n() const { return n_pulses * n_elements; }
};

// a(theta) = [1, e^{j 2 pi d sin(theta)}, ...]; unit-modulus entries.
SteeringVector ula_steering(double theta_deg, int n, double spacing_wavelengths = 0.5);

// a_d(fd) kron a_s(fs) with temporal phase ramp e^{j 2 pi p fd} and spatial
// ramp e^{j 2 pi q fs}; element (p*ns + q) = e^{j 2 pi (p fd + q fs)}.
SteeringVector spacetime_steering(double fd, double fs, int nt, int ns);

// Reproducible snapshot generator: (seed, trial_index, L) fully determines
// the emitted set, independent of call order or thread.
class ScenarioRealization {
 public:
  ScenarioRealization(HermitianEstimate r_true, SteeringVector s, CMat mixing,
                      double noise_power, double texture_shape,
                      SnapshotSet::Model model)
      : r_true_(std::move(r_true)),
        s_(std::move(s)),
        mixing_(std::move(mixing)),
        noise_power_(noise_power),
        texture_shape_(texture_shape),
        model_(model) {}

  const HermitianEstimate& r_true() const { return r_true_; }
  const SteeringVector& steering() const { return s_; }
  int n() const { return r_true_.n(); }

  SnapshotSet draw(std::uint64_t master_seed, std::uint64_t trial, int l_count) const;

 private:
  HermitianEstimate r_true_;
  SteeringVector s_;
  CMat mixing_;          // N x M, columns scale the i.i.d. CN(0,1) gains
  double noise_power_;
  double texture_shape_; // <= 0 means no texture (Gaussian)
  SnapshotSet::Model model_;
};

ScenarioRealization build_ula_scenario(const UlaScenarioSpec& spec);
ScenarioRealization build_stap_scenario(const StapScenarioSpec& spec);

// T = R (.) t t^T with real t ~ N(1, sigma_t_sq) entrywise; resampled up to
// 10 times if the product is not positive definite.
ShrinkageTarget knowledge_target(const HermitianEstimate& r_true, double sigma_t_sq,
                                 RngStream& rng);

}  // namespace shrinkcv
