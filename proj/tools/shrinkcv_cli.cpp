// Command-line front end: Monte-Carlo sweeps, single-shot tuning, and the
// oracle-equivalence selftest.
#include "shrinkcv/harness.hpp"
#include "shrinkcv/scenarios.hpp"
#include "reference.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>

using namespace shrinkcv;

namespace {

int run_sweep_cmd(const std::string& config_path, const std::string& out_dir,
                  std::uint64_t* seed, int* trials, int threads) {
  ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
  if (seed) cfg.master_seed = *seed;
  if (trials) cfg.trials = *trials;
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  const SweepOutcome out = run_sweep(cfg, threads);
  emit_csv(out.report, out_dir + "/sweep.csv");
  emit_curves(out.curves, out_dir + "/curves.csv");
  std::printf("wrote %s/sweep.csv (%zu rows) and %s/curves.csv (%zu series)\n",
              out_dir.c_str(), out.report.rows.size(), out_dir.c_str(), out.curves.size());
  return 0;
}

int run_tune_cmd(const std::string& config_path, const std::string& method_name_str, int l,
                 std::uint64_t seed) {
  ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
  cfg.master_seed = seed;
  const Method method = method_from_name(method_name_str);
  const ScenarioRealization scen = std::visit(
      [](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, UlaScenarioSpec>)
          return build_ula_scenario(s);
        else
          return build_stap_scenario(s);
      },
      cfg.scenario);
  const SnapshotSet samples = scen.draw(cfg.master_seed, 0, l);
  ShrinkageTarget target = ShrinkageTarget::identity(scen.n());
  if (cfg.target.kind == TargetSpec::Kind::Knowledge) {
    RngStream rng(cfg.master_seed, 0, StreamTag::KnowledgeTarget);
    target = knowledge_target(scen.r_true(), cfg.target.sigma_t_sq, rng);
  }
  const TuningGrid grid_g = TuningGrid::uniform(cfg.grid.n_points, 0.0, cfg.grid.eps);
  const TuningGrid grid_ste = TuningGrid::uniform(
      cfg.grid.n_points, ste_rho_lower_bound(scen.n(), l), cfg.grid.eps);

  TuningResult tr;
  switch (method) {
    case Method::S2cmCv:
      tr = tune_s2cm_cv(samples, scen.steering(), target, grid_g);
      break;
    case Method::S2cmAe:
      tr = tune_s2cm_ae(samples, scen.steering(), target, grid_g);
      break;
    case Method::OracleS2cm:
      tr = oracle_s2cm(samples, scen.steering(), target, scen.r_true(), grid_g);
      break;
    case Method::SteCv1:
      tr = tune_ste_cv1(samples, scen.steering(), target, grid_ste, cfg.ste).tuning;
      break;
    case Method::SteCv2:
      tr = tune_ste_cv2(samples, scen.steering(), target, grid_ste, cfg.ste).tuning;
      break;
    case Method::SteAe:
      tr = tune_ste_ae(samples, scen.steering(), target, grid_ste, cfg.ste).tuning;
      break;
    case Method::OracleSte:
      tr = oracle_ste(samples, scen.steering(), target, scen.r_true(), grid_ste, cfg.ste)
               .tuning;
      break;
    default:
      std::fprintf(stderr, "method '%s' has no shrinkage factor to tune\n",
                   method_name_str.c_str());
      return 2;
  }
  std::printf("method=%s L=%d seed=%llu\n", method_name_str.c_str(), l,
              static_cast<unsigned long long>(seed));
  std::printf("rho_star=%.10g alpha_star=%.10g converged=%d iterations=%d\n", tr.rho_star,
              tr.alpha_star, tr.converged ? 1 : 0, tr.iterations);
  std::printf("rho,cost\n");
  for (const auto& [rho, cost] : tr.curve) std::printf("%.10g,%.10g\n", rho, cost);
  return 0;
}

struct SelfCheck {
  const char* name;
  bool ok;
};

int run_selftest() {
  std::vector<SelfCheck> checks;
  RngStream rng(31337, 0, StreamTag::Test);
  auto steering = [&](int n) {
    CVec s(n);
    for (int i = 0; i < n; ++i) {
      const double phase = 2.0 * M_PI * rng.uniform();
      s(i) = cxd(std::cos(phase), std::sin(phase));
    }
    return SteeringVector(s);
  };

  {
    CMat x(6, 10);
    for (int j = 0; j < 10; ++j) x.col(j) = rng.complex_normal_vector(6);
    const CMat a = scm(SnapshotSet(x)).matrix();
    checks.push_back({"scm vs naive accumulation", (a - ref::scm_naive(x)).norm() <
                                                       1e-14 * a.norm()});
    const CMat b = nscm(SnapshotSet(x)).matrix();
    checks.push_back({"nscm vs naive accumulation",
                      (b - ref::nscm_naive(x)).norm() < 1e-14 * b.norm() &&
                          std::abs(b.trace().real() - 6.0) < 1e-12});
  }

  {
    bool ok = true;
    for (int inst = 0; inst < 10 && ok; ++inst) {
      CMat x(8, 12);
      for (int j = 0; j < 12; ++j) x.col(j) = rng.complex_normal_vector(8);
      const SnapshotSet set(x);
      const SteeringVector s = steering(8);
      const ShrinkageTarget t = ShrinkageTarget::identity(8);
      for (double alpha : {0.05, 0.5, 5.0, 50.0}) {
        const double fast = loocv_cost_gaussian(set, s, t, alpha);
        const double brute = ref::loocv_brute(x, s.vec(), t.matrix(), alpha);
        ok = ok && std::abs(fast - brute) < 1e-10 * brute;
      }
    }
    checks.push_back({"loocv fast form vs explicit splits", ok});
  }

  {
    CMat x(16, 16);
    for (int j = 0; j < 16; ++j) x.col(j) = rng.complex_normal_vector(16);
    const SnapshotSet set(x);
    const SteeringVector s = steering(16);
    const ShrinkageTarget t = ShrinkageTarget::identity(16);
    std::vector<double> alphas;
    for (int i = 0; i < 50; ++i) alphas.push_back(std::pow(10.0, -2.0 + 4.0 * i / 49.0));
    const std::vector<double> evd = loocv_cost_gaussian_evd(set, s, alphas);
    bool ok = true;
    for (size_t i = 0; i < alphas.size(); ++i) {
      const double gen = loocv_cost_gaussian(set, s, t, alphas[i]);
      ok = ok && std::abs(evd[i] - gen) < 1e-8 * gen;
    }
    checks.push_back({"EVD path vs general path", ok});
    bool ae_ok = true;
    for (double a : alphas) {
      const double prod = ae_cost_gaussian(set, s, t, a);
      const double evd_form = ref::ae_cost_identity_evd(x, s.vec(), a);
      ae_ok = ae_ok && std::abs(prod - evd_form) < 1e-8 * evd_form;
    }
    checks.push_back({"AE cost vs eigenvalue-sum form", ae_ok});
  }

  {
    CMat y(8, 16);
    for (int j = 0; j < 16; ++j) {
      const double tau = rng.gamma(4.5, 1.0 / 4.5);
      y.col(j) = std::sqrt(tau) * rng.complex_normal_vector(8);
    }
    const SnapshotSet set(y, SnapshotSet::Model::CompoundGaussian);
    const SteeringVector s = steering(8);
    const ShrinkageTarget t = ShrinkageTarget::identity(8);
    const HermitianEstimate plug = nscm(set);
    const CMat q = weighted_samples(y, plug.matrix());
    const double fast = ste_cv1_cost(set, s, t, 0.6, plug);
    const double brute = ref::loocv_brute(q, s.vec(), t.matrix(), 0.6);
    checks.push_back({"weighted-sample cost vs explicit splits",
                      std::abs(fast - brute) < 1e-10 * brute});

    const SteResult sol = ste_fixed_point(set, t, 0.3);
    checks.push_back({"fixed-point residual",
                      sol.converged && ref::ste_residual(set, t, 0.3, sol.estimate) < 1e-5});
  }

  bool all = true;
  for (const SelfCheck& c : checks) {
    all = all && c.ok;
    std::printf("[%s] %s\n", c.ok ? "ok" : "FAIL", c.name);
  }
  std::printf("%s\n", all ? "selftest passed" : "selftest FAILED");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-validated shrinkage covariance estimation for MVDR beamforming"};
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep from a config file");
  std::string config_path, out_dir = ".";
  std::uint64_t seed_val = 0;
  int trials_val = 0, threads = 0;
  bool seed_set = false, trials_set = false;
  sweep->add_option("config", config_path, "experiment config file")->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--seed", seed_val, "override master seed")->each([&](const std::string&) {
    seed_set = true;
  });
  sweep->add_option("--trials", trials_val, "override trial count")
      ->each([&](const std::string&) { trials_set = true; });
  sweep->add_option("--threads", threads, "worker threads (0 = all)");

  auto* tune = app.add_subcommand("tune", "tune one method on one snapshot set");
  std::string tune_config, tune_method;
  int tune_l = 0;
  std::uint64_t tune_seed = 1;
  tune->add_option("--scenario", tune_config, "experiment config file")->required();
  tune->add_option("--method", tune_method, "method name")->required();
  tune->add_option("--l", tune_l, "sample count")->required();
  tune->add_option("--seed", tune_seed, "master seed");

  auto* selftest = app.add_subcommand("selftest", "run the oracle-equivalence suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed())
      return run_sweep_cmd(config_path, out_dir, seed_set ? &seed_val : nullptr,
                           trials_set ? &trials_val : nullptr, threads);
    if (tune->parsed()) return run_tune_cmd(tune_config, tune_method, tune_l, tune_seed);
    if (selftest->parsed()) return run_selftest();
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
