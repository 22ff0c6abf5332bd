#pragma once

#include "shrinkcv/rng.hpp"
#include "shrinkcv/types.hpp"

namespace shrinkcv::testutil {

inline RngStream stream(std::uint64_t seed) { return RngStream(seed, 0, StreamTag::Test); }

inline CMat random_samples(RngStream& rng, int n, int l) {
  CMat x(n, l);
  for (int j = 0; j < l; ++j) x.col(j) = rng.complex_normal_vector(n);
  return x;
}

// Random Hermitian positive-definite matrix A A^H + eps I.
inline CMat random_pd(RngStream& rng, int n, double eps = 0.5) {
  const CMat a = random_samples(rng, n, n);
  return hermitian_part(a * a.adjoint() / n + eps * CMat::Identity(n, n));
}

// Steering-like vector with ||s||^2 = n (random phases).
inline CVec random_steering(RngStream& rng, int n) {
  CVec s(n);
  for (int i = 0; i < n; ++i) {
    const double phase = 2.0 * M_PI * rng.uniform();
    s(i) = cxd(std::cos(phase), std::sin(phase));
  }
  return s;
}

// Compound-Gaussian draw: sqrt(tau) * C^(1/2) e with Gamma(nu, 1/nu) texture.
inline CMat compound_samples(RngStream& rng, const CMat& sqrt_cov, double nu, int l) {
  const int n = static_cast<int>(sqrt_cov.rows());
  CMat y(n, l);
  for (int j = 0; j < l; ++j) {
    const double tau = rng.gamma(nu, 1.0 / nu);
    y.col(j) = std::sqrt(tau) * (sqrt_cov * rng.complex_normal_vector(n));
  }
  return y;
}

}  // namespace shrinkcv::testutil
