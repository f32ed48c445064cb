#pragma once

#include <cstdint>
#include <random>

namespace lrpop {

/// Seeded random source with a platform-independent output stream.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// The standard distributions are not (their algorithms are left to the
/// library vendor), so the transforms to uniform and normal variates are
/// done here.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the Box-Muller transform (cached pair).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lrpop
