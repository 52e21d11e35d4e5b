#pragma once

#include <cstdint>
#include <limits>

namespace countcast {

// PCG-XSH-RR 64/32. Value type: copying a stream copies its full state, so
// simulation on a copy never disturbs the original sequence. Identical
// (seed, stream_id) pairs reproduce identical draw sequences.
class RngStream {
 public:
  using result_type = std::uint32_t;

  RngStream() : RngStream(0, 0) {}

  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : state_(0), inc_((stream_id << 1u) | 1u) {
    next();
    state_ += seed;
    next();
  }

  std::uint32_t next() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint32_t operator()() { return next(); }

  // Uniform on (0,1) with a 53-bit mantissa from two 32-bit words.
  double uniform() {
    std::uint64_t hi = next();
    std::uint64_t lo = next();
    std::uint64_t bits = ((hi << 21u) ^ lo) & ((1ULL << 53u) - 1u);
    return (static_cast<double>(bits) + 0.5) * (1.0 / 9007199254740992.0);
  }

  // Independent child stream; deterministic in (parent identity, key).
  RngStream substream(std::uint64_t key) const {
    return RngStream(mix(state_ ^ 0x9e3779b97f4a7c15ULL, key), mix(inc_, key + 1));
  }

  static constexpr std::uint32_t min() { return 0; }
  static constexpr std::uint32_t max() {
    return std::numeric_limits<std::uint32_t>::max();
  }

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  std::uint64_t inc_;
};

}  // namespace countcast
