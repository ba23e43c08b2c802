#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rfdm {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Reproducibility under parallel scheduling comes from never sharing an
// engine between work items: every unit of work (a tree, an offspring, a
// simulation iteration) gets its own stream, derived deterministically from
// the master seed and the item's index via `Rng::substream`.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  explicit Philox4x32(std::uint64_t key = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  std::uint64_t key() const noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  unsigned next_ = 4;
};

/// Random stream with the handful of distributions the library needs.
/// All samplers are implemented here rather than with <random> distributions
/// so results are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) noexcept;

  /// Child stream keyed by (this stream's key, id). Does not advance `*this`.
  Rng substream(std::uint64_t id) const noexcept;

  std::uint32_t next_u32() noexcept { return engine_(); }
  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  double normal() noexcept;
  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Number of failures before the next success of a Bernoulli(p) sequence.
  /// Returns max() for p <= 0.
  std::uint64_t geometric_gap(double p) noexcept;

  std::uint64_t key() const noexcept { return engine_.key(); }

 private:
  Philox4x32 engine_;
};

/// splitmix64 finalizer; used for key derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace rfdm
