// Benchmark: fast cost paths against the serial brute-force reference, and
// sweep scaling across worker threads.
#include "shrinkcv/harness.hpp"
#include "reference.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

using namespace shrinkcv;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

void bench_cost_paths() {
  const int n = 64, l = 64, grid_points = 100;
  RngStream rng(1, 0, StreamTag::Test);
  CMat x(n, l);
  for (int j = 0; j < l; ++j) x.col(j) = rng.complex_normal_vector(n);
  const SnapshotSet set(x);
  CVec sv(n);
  for (int i = 0; i < n; ++i) {
    const double phase = 2.0 * M_PI * rng.uniform();
    sv(i) = cxd(std::cos(phase), std::sin(phase));
  }
  const SteeringVector s(sv);
  const ShrinkageTarget t = ShrinkageTarget::identity(n);
  std::vector<double> alphas;
  for (int i = 0; i < grid_points; ++i)
    alphas.push_back(rho_to_alpha(0.001 + 0.998 * i / (grid_points - 1), l));

  omp_set_num_threads(1);
  volatile double sink = 0.0;

  const double t_evd = best_of(5, [&] {
    const std::vector<double> c = loocv_cost_gaussian_evd(set, s, alphas);
    sink = sink + c.back();
  });
  const double t_general = best_of(3, [&] {
    for (double a : alphas) sink = sink + loocv_cost_gaussian(set, s, t, a);
  });
  // the explicit-split reference inverts L matrices per alpha; 5 points are
  // enough to extrapolate
  const double t_brute5 = best_of(1, [&] {
    for (int i = 0; i < 5; ++i)
      sink = sink + ref::loocv_brute(x, sv, t.matrix(), alphas[static_cast<size_t>(i * 19)]);
  });
  const double t_brute = t_brute5 * grid_points / 5.0;

  std::printf("LOOCV cost over a %d-point grid, N=%d, L=%d (single thread):\n", grid_points,
              n, l);
  std::printf("  %-34s %10.2f ms\n", "EVD fast path", t_evd);
  std::printf("  %-34s %10.2f ms  (%.1fx vs EVD)\n", "general Cholesky path", t_general,
              t_general / t_evd);
  std::printf("  %-34s %10.2f ms  (%.1fx vs EVD, extrapolated)\n",
              "serial explicit-split reference", t_brute, t_brute / t_evd);
}

void bench_sweep_threads() {
  const ExperimentConfig cfg = ExperimentConfig::from_string(R"(
[scenario]
kind = stap
n_pulses = 4
n_elements = 4

[run]
methods = ste_cv2 ste_ae s2cm_cv
l_grid = 32
trials = 32
master_seed = 5
)");
  std::printf("\nSTAP sweep (N=16, L=32, 32 trials, 3 methods) vs worker threads:\n");
  std::string reference_csv;
  const int max_threads = omp_get_max_threads();
  for (int w = 1; w <= max_threads; w *= 2) {
    SweepOutcome out;
    const auto t0 = Clock::now();
    out = run_sweep(cfg, w);
    const double ms = ms_since(t0);
    const std::string csv = csv_to_string(out.report);
    if (reference_csv.empty()) reference_csv = csv;
    std::printf("  %2d thread%s %10.1f ms  output %s\n", w, w == 1 ? " " : "s", ms,
                csv == reference_csv ? "identical" : "DIFFERS");
  }
}

}  // namespace

int main() {
  bench_cost_paths();
  bench_sweep_threads();
  return 0;
}
