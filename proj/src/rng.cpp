#include "shrinkcv/rng.hpp"

#include <cmath>

namespace shrinkcv {

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t trial, StreamTag tag) {
  const auto t = static_cast<std::uint64_t>(tag);
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(t),
                    static_cast<std::uint32_t>(t >> 32)};
  eng_.seed(seq);
}

double RngStream::uniform() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

cxd RngStream::complex_normal() {
  const double g1 = normal();
  const double g2 = normal();
  return cxd(g1, g2) / std::sqrt(2.0);
}

double RngStream::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw invalid_input("RngStream::gamma: shape and scale must be positive");
  if (shape < 1.0) {
    const double u = uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

CVec RngStream::complex_normal_vector(int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = complex_normal();
  return v;
}

}  // namespace shrinkcv
