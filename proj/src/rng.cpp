#include "percolab/rng.hpp"

namespace percolab {
namespace {

constexpr std::uint32_t kMultiplier0 = 0xD2511F53;
constexpr std::uint32_t kMultiplier1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline Philox4x32::Counter philox_round(const Philox4x32::Counter& ctr,
                                        const Philox4x32::Key& key) noexcept {
  const std::uint64_t prod0 = static_cast<std::uint64_t>(kMultiplier0) * ctr[0];
  const std::uint64_t prod1 = static_cast<std::uint64_t>(kMultiplier1) * ctr[2];
  const auto hi0 = static_cast<std::uint32_t>(prod0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(prod0);
  const auto hi1 = static_cast<std::uint32_t>(prod1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(prod1);
  return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

inline Philox4x32::Key split_seed(std::uint64_t seed) noexcept {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

inline std::uint64_t join(std::uint32_t lo, std::uint32_t hi) noexcept {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key) noexcept {
  ctr = philox_round(ctr, key);
  for (int round = 1; round < 10; ++round) {
    key[0] += kWeyl0;
    key[1] += kWeyl1;
    ctr = philox_round(ctr, key);
  }
  return ctr;
}

// Counter layout: {block, domain, sample_lo, sample_hi}. One block yields
// two labels, so edges 2k and 2k+1 share a Philox call.
double edge_label(std::uint64_t seed, std::uint64_t sample, std::uint64_t edge) noexcept {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(edge >> 1),
                                static_cast<std::uint32_t>(StreamDomain::edge_labels),
                                static_cast<std::uint32_t>(sample),
                                static_cast<std::uint32_t>(sample >> 32)};
  const auto out = Philox4x32::apply(ctr, split_seed(seed));
  const std::uint64_t bits = (edge & 1) ? join(out[2], out[3]) : join(out[0], out[1]);
  return to_unit_interval(bits);
}

CounterRng::CounterRng(std::uint64_t seed, StreamDomain domain, std::uint64_t stream) noexcept
    : key_(split_seed(seed)),
      counter_{0, static_cast<std::uint32_t>(domain), static_cast<std::uint32_t>(stream),
               static_cast<std::uint32_t>(stream >> 32)} {}

CounterRng::result_type CounterRng::operator()() noexcept {
  if (buffered_ == 0) {
    const auto out = Philox4x32::apply(counter_, key_);
    ++counter_[0];
    buffer_ = {join(out[0], out[1]), join(out[2], out[3])};
    buffered_ = 2;
  }
  return buffer_[2 - buffered_--];
}

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  auto product = static_cast<unsigned __int128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

}  // namespace percolab
