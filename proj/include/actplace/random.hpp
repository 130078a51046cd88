#pragma once

#include <cstdint>
#include <random>

namespace actplace {

/// Seeded stream with a fixed bit-level definition, so generated instances
/// are identical on every platform and in any reimplementation:
///  - bits: std::mt19937_64 seeded with `seed` (sequence fixed by the C++ standard);
///  - uniform(): (next() >> 11) * 2^-53, in [0, 1);
///  - bernoulli(p): uniform() < p;
///  - normal(): Box-Muller on two uniforms u1, u2:
///    sqrt(-2 ln(1 - u1)) * cos(2 pi u2). No value is cached between calls.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace actplace
