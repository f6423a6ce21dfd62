#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace drek {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace detail

// xoshiro256** seeded through splitmix64. The generator is fixed for the
// lifetime of the repo: identical seeds give identical sequences on every
// platform, which the paired-run and trace-equality tests rely on.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = detail::splitmix64(sm);
  }

  // Independent stream derived from (base_seed, stream_index).
  static RngStream substream(std::uint64_t base_seed, std::uint64_t index) {
    std::uint64_t sm = base_seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
    return RngStream(detail::splitmix64(sm));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; consumes exactly two uniform draws.
  double gaussian() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
};

// Stable 64-bit hash used to derive per-run seeds from
// (base seed, method name, trial index). FNV-1a over the parts.
inline std::uint64_t derive_run_seed(std::uint64_t base_seed, std::string_view method,
                                     std::uint64_t trial) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix_byte = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001B3ULL;
  };
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<std::uint8_t>(base_seed >> (8 * i)));
  for (char c : method) mix_byte(static_cast<std::uint8_t>(c));
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<std::uint8_t>(trial >> (8 * i)));
  return h;
}

}  // namespace drek
