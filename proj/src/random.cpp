#include "rfdm/random.hpp"

#include <cmath>
#include <numbers>

namespace rfdm {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Philox4x32::Philox4x32(std::uint64_t key) noexcept
    : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

std::uint64_t Philox4x32::key() const noexcept {
  return static_cast<std::uint64_t>(key_[1]) << 32 | key_[0];
}

void Philox4x32::refill() noexcept {
  std::array<std::uint32_t, 4> c = counter_;
  std::array<std::uint32_t, 2> k = key_;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  block_ = c;
  // 128-bit counter increment.
  for (auto& word : counter_) {
    if (++word != 0) break;
  }
  next_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() noexcept {
  if (next_ == 4) refill();
  return block_[next_++];
}

Rng::Rng(std::uint64_t seed) noexcept : engine_(mix64(seed)) {}

Rng Rng::substream(std::uint64_t id) const noexcept {
  return Rng(key() ^ mix64(id + 0x632BE59BD9B4E019ull));
}

std::uint64_t Rng::next_u64() noexcept {
  const std::uint64_t hi = engine_();
  return hi << 32 | engine_();
}

double Rng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
  // Lemire's nearly-divisionless method.
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() noexcept {
  // Box-Muller, one variate per call so the stream position stays simple.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::geometric_gap(double p) noexcept {
  if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
  if (p >= 1.0) return 0;
  double u = uniform();
  while (u <= 0.0) u = uniform();
  const double g = std::floor(std::log(u) / std::log1p(-p));
  if (g >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(g);
}

}  // namespace rfdm
