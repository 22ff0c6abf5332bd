#include "shrinkcv/scenarios.hpp"

#include "shrinkcv/estimators.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace shrinkcv;

TEST_CASE("ula steering basics") {
  const SteeringVector a0 = ula_steering(0.0, 5);
  CHECK((a0.vec() - CVec::Ones(5)).norm() == 0.0);

  const SteeringVector a30 = ula_steering(30.0, 2);
  CHECK(std::abs(a30.vec()(0) - cxd(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(a30.vec()(1) - cxd(0.0, 1.0)) < 1e-15);

  for (double th : {-80.0, -12.5, 7.0, 44.0, 89.0}) {
    const SteeringVector a = ula_steering(th, 16);
    CHECK(std::abs(a.vec().squaredNorm() - 16.0) < 1e-12 * 16.0);
  }
  CHECK_THROWS_AS(ula_steering(90.0, 4), invalid_input);
}

TEST_CASE("spacetime steering ordering and norms") {
  const SteeringVector z = spacetime_steering(0.0, 0.0, 3, 2);
  CHECK((z.vec() - CVec::Ones(6)).norm() == 0.0);

  const SteeringVector a = spacetime_steering(0.25, 0.5, 2, 2);
  CHECK(std::abs(a.vec()(0) - cxd(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(a.vec()(1) - std::polar(1.0, M_PI)) < 1e-15);
  CHECK(std::abs(a.vec()(2) - std::polar(1.0, M_PI / 2)) < 1e-15);
  CHECK(std::abs(a.vec()(3) - std::polar(1.0, 3 * M_PI / 2)) < 1e-15);

  const int nt = 3, ns = 4;
  const double fd = 0.13, fs = -0.29;
  const SteeringVector b = spacetime_steering(fd, fs, nt, ns);
  for (int p = 0; p < nt; ++p)
    for (int q = 0; q < ns; ++q) {
      const cxd want = std::polar(1.0, 2.0 * M_PI * (p * fd + q * fs));
      CHECK(std::abs(b.vec()(p * ns + q) - want) < 1e-12);
    }
}

TEST_CASE("ula scenario defaults follow the stated power model") {
  UlaScenarioSpec spec;
  const ScenarioRealization scen = build_ula_scenario(spec);
  CHECK(scen.n() == 20);
  // nine interferers at power 10^3 each plus unit noise on the diagonal
  CHECK(scen.r_true().matrix()(0, 0).real() == doctest::Approx(9.0 * 1000.0 + 1.0));
  CHECK((scen.steering().vec() - CVec::Ones(20)).norm() == 0.0);
}

TEST_CASE("ula scenario without interferers is white noise") {
  UlaScenarioSpec spec;
  spec.n_antennas = 4;
  spec.interferer_doas_deg.clear();
  spec.noise_power = 2.0;
  const ScenarioRealization scen = build_ula_scenario(spec);
  CHECK((scen.r_true().matrix() - 2.0 * CMat::Identity(4, 4)).norm() == 0.0);
  const SnapshotSet big = scen.draw(123, 0, 10000);
  const HermitianEstimate est = scm(big);
  CHECK(relative_distance(est, scen.r_true()) < 0.05);
}

TEST_CASE("sampler determinism") {
  const ScenarioRealization scen = build_ula_scenario(UlaScenarioSpec{});
  const SnapshotSet a = scen.draw(7, 3, 16);
  const SnapshotSet b = scen.draw(7, 3, 16);
  CHECK((a.data() - b.data()).norm() == 0.0);
  const SnapshotSet c = scen.draw(7, 4, 16);
  CHECK((a.data() - c.data()).norm() != 0.0);
}

TEST_CASE("ula scm converges to the true covariance") {
  UlaScenarioSpec spec;
  spec.n_antennas = 8;
  spec.interferer_doas_deg = {30, 50, 70};
  const ScenarioRealization scen = build_ula_scenario(spec);
  const SnapshotSet big = scen.draw(99, 0, 100000);
  CHECK(relative_distance(scm(big), scen.r_true()) < 0.02);
}

TEST_CASE("stap scenario defaults") {
  StapScenarioSpec spec;
  const ScenarioRealization scen = build_stap_scenario(spec);
  CHECK(scen.n() == 32);
  // trace = N * (tau0 * Nc + sigma^2) with tau0 = CNR/Nc
  const double want_trace = 32.0 * (1000.0 + 1.0);
  CHECK(scen.r_true().matrix().trace().real() == doctest::Approx(want_trace));
  CHECK(std::abs(scen.steering().vec().squaredNorm() - 32.0) < 1e-10);
}

TEST_CASE("stap scm converges within the texture-inflated tolerance") {
  StapScenarioSpec spec;
  spec.n_pulses = 4;
  spec.n_elements = 4;
  spec.n_clutter_patches = 101;
  const ScenarioRealization scen = build_stap_scenario(spec);
  const SnapshotSet big = scen.draw(7, 0, 100000);
  // E(tau) = 1 but the CUT covariance carries tau0 = CNR/Nc on the clutter
  // term; compare against the training-side covariance A A^H + sigma^2 I.
  StapScenarioSpec unit = spec;
  unit.cnr = static_cast<double>(spec.n_clutter_patches);  // tau0 = 1
  const ScenarioRealization train = build_stap_scenario(unit);
  CHECK(relative_distance(scm(big), train.r_true()) < 0.05);
}

TEST_CASE("gamma texture statistics") {
  RngStream rng(5, 0, StreamTag::Test);
  SUBCASE("unit mean") {
    const int k = 100000;
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += rng.gamma(4.5, 1.0 / 4.5);
    const double mean = sum / k;
    CHECK(std::abs(mean - 1.0) < 3.0 / std::sqrt(4.5 * k));
  }
  SUBCASE("concentration at large shape") {
    const int k = 10000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < k; ++i) {
      const double t = rng.gamma(1e6, 1e-6);
      sum += t;
      sq += t * t;
    }
    const double mean = sum / k;
    const double sd = std::sqrt(sq / k - mean * mean);
    CHECK(sd < 0.01);
  }
}

TEST_CASE("knowledge target") {
  UlaScenarioSpec spec;
  spec.n_antennas = 8;
  const ScenarioRealization scen = build_ula_scenario(spec);
  SUBCASE("zero variance returns the true covariance") {
    RngStream rng(1, 0, StreamTag::KnowledgeTarget);
    const ShrinkageTarget t = knowledge_target(scen.r_true(), 0.0, rng);
    CHECK((t.matrix() - scen.r_true().matrix()).norm() == 0.0);
    CHECK(t.kind() == ShrinkageTarget::Kind::General);
  }
  SUBCASE("draws are Hermitian and positive definite across 1000 seeds") {
    int ok = 0;
    for (int seed = 0; seed < 1000; ++seed) {
      RngStream rng(static_cast<std::uint64_t>(seed), 0, StreamTag::KnowledgeTarget);
      try {
        const ShrinkageTarget t = knowledge_target(scen.r_true(), 0.1, rng);
        CHECK((t.matrix() - t.matrix().adjoint()).norm() == 0.0);
        ++ok;
      } catch (const numerical_failure&) {
      }
    }
    CHECK(ok >= 990);
  }
}

TEST_CASE("spec validation failures") {
  UlaScenarioSpec bad;
  bad.n_antennas = 1;
  CHECK_THROWS_AS(build_ula_scenario(bad), invalid_input);
  StapScenarioSpec sbad;
  sbad.nu = 0.0;
  CHECK_THROWS_AS(build_stap_scenario(sbad), invalid_input);
}
