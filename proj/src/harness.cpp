#include "shrinkcv/harness.hpp"

#include "shrinkcv/beamforming.hpp"
#include "shrinkcv/estimators.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace shrinkcv {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct TrialRecord {
  bool failed = true;
  double sl = kNan;    // linear
  double nmse_v = kNan;
  double rho = 0.0;
  double iterations = 0.0;
  std::vector<double> rho_series;
  std::vector<double> distance_series;
  std::vector<double> cost_curve;
};

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

HermitianEstimate run_method(Method m, const SnapshotSet& samples, const SteeringVector& s,
                             const ShrinkageTarget& target, const HermitianEstimate& r_true,
                             const TuningGrid& grid_g, const TuningGrid& grid_ste,
                             const SteConfig& ste_cfg, TrialRecord& rec) {
  switch (m) {
    case Method::Scm:
      return scm(samples);
    case Method::Nscm:
      return nscm(samples);
    case Method::S2cmCv: {
      TuningResult t = tune_s2cm_cv(samples, s, target, grid_g);
      rec.rho = t.rho_star;
      rec.cost_curve.reserve(t.curve.size());
      for (auto& [r, c] : t.curve) rec.cost_curve.push_back(c);
      return shrink(scm(samples), target, t.rho_star);
    }
    case Method::S2cmAe: {
      TuningResult t = tune_s2cm_ae(samples, s, target, grid_g);
      rec.rho = t.rho_star;
      for (auto& [r, c] : t.curve) rec.cost_curve.push_back(c);
      return shrink(scm(samples), target, t.rho_star);
    }
    case Method::OracleS2cm: {
      TuningResult t = oracle_s2cm(samples, s, target, r_true, grid_g);
      rec.rho = t.rho_star;
      for (auto& [r, c] : t.curve) rec.cost_curve.push_back(c);
      return shrink(scm(samples), target, t.rho_star);
    }
    case Method::SteCv1: {
      SteTuneOutcome out = tune_ste_cv1(samples, s, target, grid_ste, ste_cfg);
      rec.rho = out.tuning.rho_star;
      rec.iterations = out.tuning.iterations;
      for (auto& [r, c] : out.tuning.curve) rec.cost_curve.push_back(c);
      return out.estimate;
    }
    case Method::SteCv2:
    case Method::SteAe: {
      SteTuneOutcome out = (m == Method::SteCv2)
                               ? tune_ste_cv2(samples, s, target, grid_ste, ste_cfg)
                               : tune_ste_ae(samples, s, target, grid_ste, ste_cfg);
      rec.rho = out.tuning.rho_star;
      rec.iterations = out.tuning.iterations;
      rec.rho_series = out.tuning.rho_history;
      rec.distance_series = out.tuning.distance_history;
      for (auto& [r, c] : out.tuning.curve) rec.cost_curve.push_back(c);
      return out.estimate;
    }
    case Method::OracleSte: {
      OracleSteOutcome out = oracle_ste(samples, s, target, r_true, grid_ste, ste_cfg);
      rec.rho = out.tuning.rho_star;
      rec.iterations = out.tuning.iterations;
      for (auto& [r, c] : out.tuning.curve) rec.cost_curve.push_back(c);
      return out.estimate;
    }
  }
  throw invalid_input("run_sweep: unknown method");
}

bool needs_ste_grid(Method m) {
  return m == Method::SteCv1 || m == Method::SteCv2 || m == Method::SteAe ||
         m == Method::OracleSte;
}

}  // namespace

SweepOutcome run_sweep(const ExperimentConfig& config, int threads) {
  config.validate();
  const ScenarioRealization scen = std::visit(
      [](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, UlaScenarioSpec>)
          return build_ula_scenario(s);
        else
          return build_stap_scenario(s);
      },
      config.scenario);
  const int n = scen.n();
  const int n_l = static_cast<int>(config.l_grid.size());
  const int n_m = static_cast<int>(config.methods.size());
  const int trials = config.trials;

  // per-L grids (the STE admissible interval depends on L)
  std::vector<TuningGrid> grids_g;
  std::vector<TuningGrid> grids_ste;
  bool any_ste = false;
  for (Method m : config.methods) any_ste |= needs_ste_grid(m);
  for (int li = 0; li < n_l; ++li) {
    grids_g.push_back(TuningGrid::uniform(config.grid.n_points, 0.0, config.grid.eps));
    const int l = config.l_grid[static_cast<size_t>(li)];
    if (any_ste) {
      grids_ste.push_back(TuningGrid::uniform(config.grid.n_points,
                                              ste_rho_lower_bound(n, l), config.grid.eps));
    } else {
      grids_ste.push_back(grids_g.back());
    }
  }

  // slot-indexed records: [l][method][trial]
  std::vector<std::vector<std::vector<TrialRecord>>> records(
      static_cast<size_t>(n_l),
      std::vector<std::vector<TrialRecord>>(static_cast<size_t>(n_m),
                                            std::vector<TrialRecord>(static_cast<size_t>(trials))));

  const int jobs = n_l * trials;
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (int job = 0; job < jobs; ++job) {
    const int li = job / trials;
    const int trial = job % trials;
    const int l = config.l_grid[static_cast<size_t>(li)];
    SnapshotSet samples = scen.draw(config.master_seed, static_cast<std::uint64_t>(trial), l);

    ShrinkageTarget target = ShrinkageTarget::identity(n);
    bool target_ok = true;
    if (config.target.kind == TargetSpec::Kind::Knowledge) {
      const std::uint64_t t_trial =
          config.target.redraw_per_trial ? static_cast<std::uint64_t>(trial) : 0;
      RngStream rng(config.master_seed, t_trial, StreamTag::KnowledgeTarget);
      try {
        target = knowledge_target(scen.r_true(), config.target.sigma_t_sq, rng);
      } catch (const numerical_failure&) {
        target_ok = false;  // every method in this trial is recorded as failed
      }
    }

    for (int mi = 0; mi < n_m; ++mi) {
      TrialRecord& rec = records[static_cast<size_t>(li)][static_cast<size_t>(mi)]
                                [static_cast<size_t>(trial)];
      if (!target_ok) continue;
      try {
        const HermitianEstimate est = run_method(
            config.methods[static_cast<size_t>(mi)], samples, scen.steering(), target,
            scen.r_true(), grids_g[static_cast<size_t>(li)],
            grids_ste[static_cast<size_t>(li)], config.ste, rec);
        rec.sl = sdr_loss(est, scen.r_true(), scen.steering());
        rec.nmse_v = nmse(est, scen.r_true());
        rec.failed = false;
      } catch (const numerical_failure&) {
        rec.failed = true;
      } catch (const invalid_input&) {
        rec.failed = true;
      }
    }
  }

  // deterministic reduction in slot order
  SweepOutcome out;
  for (int mi = 0; mi < n_m; ++mi) {
    for (int li = 0; li < n_l; ++li) {
      const auto& recs = records[static_cast<size_t>(li)][static_cast<size_t>(mi)];
      SweepRow row;
      row.method = method_name(config.methods[static_cast<size_t>(mi)]);
      row.l_count = config.l_grid[static_cast<size_t>(li)];
      double sl_sum = 0.0, nmse_sum = 0.0, rho_sum = 0.0, it_sum = 0.0;
      std::vector<double> sl_db;
      int ok = 0;
      for (const TrialRecord& r : recs) {
        if (r.failed) {
          ++row.trials_failed;
          continue;
        }
        ++ok;
        sl_sum += r.sl;
        sl_db.push_back(to_db(r.sl));
        nmse_sum += r.nmse_v;
        rho_sum += r.rho;
        it_sum += r.iterations;
      }
      if (ok > 0) {
        row.mean_sl_db = to_db(sl_sum / ok);
        double mean_db = 0.0;
        for (double v : sl_db) mean_db += v;
        mean_db /= ok;
        double var = 0.0;
        for (double v : sl_db) var += (v - mean_db) * (v - mean_db);
        row.std_sl_db = ok > 1 ? std::sqrt(var / (ok - 1)) : 0.0;
        row.mean_nmse = nmse_sum / ok;
        row.mean_rho = rho_sum / ok;
        row.mean_iterations = it_sum / ok;
      } else {
        row.mean_sl_db = row.std_sl_db = row.mean_nmse = row.mean_rho =
            row.mean_iterations = kNan;
      }
      out.report.rows.push_back(std::move(row));
    }
  }
  std::sort(out.report.rows.begin(), out.report.rows.end(),
            [](const SweepRow& a, const SweepRow& b) {
              if (a.method != b.method) return a.method < b.method;
              return a.l_count < b.l_count;
            });

  if (config.out_rho_curve || config.out_distance_curve || config.out_cost_curve) {
    for (int mi = 0; mi < n_m; ++mi) {
      const std::string mname = method_name(config.methods[static_cast<size_t>(mi)]);
      for (int li = 0; li < n_l; ++li) {
        const std::string suffix =
            ":" + mname + ":L=" + std::to_string(config.l_grid[static_cast<size_t>(li)]);
        const auto& recs = records[static_cast<size_t>(li)][static_cast<size_t>(mi)];
        for (int trial = 0; trial < trials; ++trial) {
          const TrialRecord& r = recs[static_cast<size_t>(trial)];
          if (r.failed) continue;
          if (config.out_rho_curve && !r.rho_series.empty())
            out.curves.push_back(CurveSeries{"rho" + suffix, trial, r.rho_series});
          if (config.out_distance_curve && !r.distance_series.empty())
            out.curves.push_back(CurveSeries{"distance" + suffix, trial, r.distance_series});
          if (config.out_cost_curve && !r.cost_curve.empty())
            out.curves.push_back(CurveSeries{"cost" + suffix, trial, r.cost_curve});
        }
      }
    }
    std::sort(out.curves.begin(), out.curves.end(),
              [](const CurveSeries& a, const CurveSeries& b) {
                if (a.series != b.series) return a.series < b.series;
                return a.trial < b.trial;
              });
  }
  return out;
}

std::string csv_to_string(const SweepReport& report) {
  std::ostringstream out;
  out << "method,L,mean_sl_db,std_sl_db,mean_nmse,mean_rho,mean_iterations,trials_failed\n";
  for (const SweepRow& r : report.rows) {
    out << r.method << ',' << r.l_count << ',' << format_double(r.mean_sl_db) << ','
        << format_double(r.std_sl_db) << ',' << format_double(r.mean_nmse) << ','
        << format_double(r.mean_rho) << ',' << format_double(r.mean_iterations) << ','
        << r.trials_failed << '\n';
  }
  return out.str();
}

void emit_csv(const SweepReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  out << csv_to_string(report);
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

std::string curves_to_string(const std::vector<CurveSeries>& curves) {
  std::ostringstream out;
  out << "series,trial,index,value\n";
  for (const CurveSeries& c : curves) {
    for (size_t i = 0; i < c.values.size(); ++i)
      out << c.series << ',' << c.trial << ',' << i << ',' << format_double(c.values[i])
          << '\n';
  }
  return out.str();
}

void emit_curves(const std::vector<CurveSeries>& curves, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_curves: cannot open " + path);
  out << curves_to_string(curves);
  if (!out) throw std::runtime_error("emit_curves: write failed for " + path);
}

}  // namespace shrinkcv
