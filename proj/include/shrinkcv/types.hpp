// Core value types shared by the estimator, tuning, beamforming and
// scenario modules.
#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cassert>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace shrinkcv {

using cxd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct numerical_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

// Training snapshots: columns are samples of the length-N disturbance vector.
class SnapshotSet {
 public:
  enum class Model { Gaussian, CompoundGaussian };

  SnapshotSet(CMat data, Model model = Model::Gaussian)
      : data_(std::move(data)), model_(model) {
    if (data_.rows() < 2) throw invalid_input("SnapshotSet: dimension must be >= 2");
    if (data_.cols() < 1) throw invalid_input("SnapshotSet: need at least one sample");
    if (!data_.allFinite()) throw invalid_input("SnapshotSet: non-finite entry");
  }

  const CMat& data() const { return data_; }
  int n() const { return static_cast<int>(data_.rows()); }
  int l_count() const { return static_cast<int>(data_.cols()); }
  Model model() const { return model_; }

 private:
  CMat data_;
  Model model_;
};

enum class Provenance { Scm, Nscm, S2cm, Ste, Oracle, External };

// N x N Hermitian matrix; re-symmetrized on construction so downstream
// Cholesky/EVD always see exact Hermitian input.
class HermitianEstimate {
 public:
  HermitianEstimate(const CMat& m, Provenance prov = Provenance::External,
                    std::optional<double> rho = std::nullopt)
      : m_(hermitian_part(m)), prov_(prov), rho_(rho) {
    if (m.rows() != m.cols()) throw invalid_input("HermitianEstimate: matrix not square");
  }

  const CMat& matrix() const { return m_; }
  int n() const { return static_cast<int>(m_.rows()); }
  Provenance provenance() const { return prov_; }
  std::optional<double> rho() const { return rho_; }

 private:
  CMat m_;
  Provenance prov_;
  std::optional<double> rho_;
};

// Positive-definite shrinkage target.
class ShrinkageTarget {
 public:
  enum class Kind { Identity, General };

  static ShrinkageTarget identity(int n) {
    ShrinkageTarget t;
    t.m_ = CMat::Identity(n, n);
    t.kind_ = Kind::Identity;
    return t;
  }

  static ShrinkageTarget general(const CMat& m) {
    if (m.rows() != m.cols()) throw invalid_input("ShrinkageTarget: matrix not square");
    ShrinkageTarget t;
    t.m_ = hermitian_part(m);
    t.kind_ = Kind::General;
    Eigen::SelfAdjointEigenSolver<CMat> es(t.m_, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmin <= 1e-12 * lmax)
      throw invalid_input("ShrinkageTarget: not positive definite");
    return t;
  }

  const CMat& matrix() const { return m_; }
  int n() const { return static_cast<int>(m_.rows()); }
  Kind kind() const { return kind_; }

 private:
  ShrinkageTarget() = default;
  CMat m_;
  Kind kind_ = Kind::Identity;
};

// Fixed-point iteration controls for the shrinkage Tyler solver.
struct SteConfig {
  double delta = 1e-6;
  int max_iter = 100;
  std::optional<CMat> initial;  // defaults to identity

  void validate() const {
    if (!(delta > 0.0)) throw invalid_input("SteConfig: delta must be positive");
    if (max_iter < 1) throw invalid_input("SteConfig: max_iter must be >= 1");
  }
};

// Signal template with the ||s||^2 = N convention.
class SteeringVector {
 public:
  explicit SteeringVector(CVec s) : s_(std::move(s)) {
    const double n2 = s_.squaredNorm();
    if (std::abs(n2 - static_cast<double>(s_.size())) > 1e-9 * s_.size())
      throw invalid_input("SteeringVector: squared norm must equal the dimension");
  }
  const CVec& vec() const { return s_; }
  int n() const { return static_cast<int>(s_.size()); }

 private:
  CVec s_;
};

struct BeamformerWeights {
  CVec w;
};

// Accounting for the (0,1] bounds on the per-sample LOOCV/AE denominator
// factors.  A factor at or below the guard signals corrupt input and throws;
// a factor above 1 is counted (it cannot occur for valid inputs).
namespace lemma_bounds {

constexpr double kGuardEps = 1e-12;

std::atomic<std::uint64_t>& evaluations();
std::atomic<std::uint64_t>& violations();
void reset();

inline double checked(double g, const char* where) {
  evaluations().fetch_add(1, std::memory_order_relaxed);
  if (!(g > kGuardEps))
    throw numerical_failure(std::string(where) + ": denominator factor below guard");
  if (g > 1.0) violations().fetch_add(1, std::memory_order_relaxed);
  assert(g > 0.0 && g <= 1.0);
  return g;
}

}  // namespace lemma_bounds

}  // namespace shrinkcv
