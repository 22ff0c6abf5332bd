// Experiment configuration: a flat INI-style file (sections of key = value
// lines).  Unknown sections or keys are errors so typos fail fast.
#pragma once

#include "shrinkcv/scenarios.hpp"
#include "shrinkcv/types.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace shrinkcv {

enum class Method {
  Scm,
  Nscm,
  S2cmCv,
  S2cmAe,
  SteCv1,
  SteCv2,
  SteAe,
  OracleS2cm,
  OracleSte,
};

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct TargetSpec {
  enum class Kind { Identity, Knowledge };
  Kind kind = Kind::Identity;
  double sigma_t_sq = 0.1;
  bool redraw_per_trial = true;
};

struct GridSpec {
  int n_points = 100;
  double eps = 1e-3;
};

struct ExperimentConfig {
  std::variant<UlaScenarioSpec, StapScenarioSpec> scenario;
  std::vector<Method> methods;
  TargetSpec target;
  std::vector<int> l_grid;
  int trials = 100;
  std::uint64_t master_seed = 1;
  GridSpec grid;
  SteConfig ste;
  bool out_sdr_loss = true;
  bool out_nmse = true;
  bool out_rho_curve = false;
  bool out_distance_curve = false;
  bool out_cost_curve = false;

  void validate() const;
  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_string(const std::string& text);
};

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace shrinkcv
