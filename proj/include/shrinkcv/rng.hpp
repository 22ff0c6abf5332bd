// Deterministic per-trial random streams.  Each stream is derived from
// (master_seed, trial_index, stream_tag), so parallel trial execution is
// order independent and bit reproducible.  All distributions are generated
// explicitly on top of the engine's raw 64-bit output; the standard
// library's normal/gamma distributions are implementation defined and
// would break reproducibility across toolchains.
#pragma once

#include "shrinkcv/types.hpp"

#include <cstdint>
#include <random>

namespace shrinkcv {

enum class StreamTag : std::uint64_t {
  Snapshots = 1,
  KnowledgeTarget = 2,
  Test = 99,
};

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t trial, StreamTag tag);

  // Uniform in [0, 1) with 53 random bits.
  double uniform();

  // Standard normal via Box-Muller (pair cached).
  double normal();

  // CN(0,1): (g1 + i*g2)/sqrt(2).
  cxd complex_normal();

  // Gamma(shape, scale) by Marsaglia-Tsang squeeze.
  double gamma(double shape, double scale);

  CVec complex_normal_vector(int n);

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace shrinkcv
