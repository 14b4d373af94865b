#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace percolab {

// Philox4x32-10 block function: output is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept;
};

// Disjoint streams per master seed.
enum class StreamDomain : std::uint32_t {
  edge_labels = 0,
  random_walk = 1,
  annealing = 2,
  property_tests = 3,
};

// Uniform double in [0, 1) with 53 random bits.
inline double to_unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Label of `edge` in sample `sample` under master seed `seed`.
double edge_label(std::uint64_t seed, std::uint64_t sample, std::uint64_t edge) noexcept;

// Sequential view over one Philox stream. Satisfies
// UniformRandomBitGenerator so it plugs into <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, StreamDomain domain, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;
  double uniform() noexcept { return to_unit_interval((*this)()); }
  // Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  Philox4x32::Key key_;
  Philox4x32::Counter counter_;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace percolab
