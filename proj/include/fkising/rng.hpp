#pragma once

#include <array>
#include <cstdint>

namespace fkising {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw is a
// pure function of (key, counter), so a kernel may evaluate its draws in any
// order or on any number of threads and still reproduce the serial stream.
class Philox {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }
};

// Purpose tags separating the independent streams a chain consumes.
enum class StreamTag : std::uint32_t { Bonds = 1, ClusterSigns = 2, Init = 3, Misc = 4 };

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Threshold T with P(u < T) = T / 2^32 = p to within 2^-33 for a uniform 32-bit word u.
inline std::uint64_t threshold32(double p) {
  if (!(p > 0.0)) return 0;
  if (p >= 1.0) return std::uint64_t{1} << 32;
  return static_cast<std::uint64_t>(p * 4294967296.0 + 0.5);
}

inline double to_unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Per-chain stream family derived from (seed, chain_id). draw(...) returns two
// independent uniforms in [0,1) for each (tag, step, index) triple.
class CounterRng {
 public:
  CounterRng() = default;
  CounterRng(std::uint64_t seed, std::uint64_t chain_id) {
    const std::uint64_t k = splitmix64(seed ^ splitmix64(chain_id + 0x5851F42D4C957F2Dull));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  }

  std::array<double, 2> uniform_pair(StreamTag tag, std::uint64_t step, std::uint32_t index) const {
    const auto out = Philox::generate(
        {index, static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
         static_cast<std::uint32_t>(tag)},
        key_);
    const std::uint64_t b0 = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    const std::uint64_t b1 = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    return {to_unit_double(b0), to_unit_double(b1)};
  }

  // Four independent 32-bit words for (tag, step, index).
  Philox::Counter words(StreamTag tag, std::uint64_t step, std::uint32_t index) const {
    return Philox::generate(
        {index, static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
         static_cast<std::uint32_t>(tag)},
        key_);
  }

  double uniform(StreamTag tag, std::uint64_t step, std::uint32_t index) const {
    return uniform_pair(tag, step, index)[0];
  }

  const Philox::Key& key() const { return key_; }

 private:
  Philox::Key key_{0u, 0u};
};

// Sequential adaptor for call sites that want an ordinary stream (tests, tiny
// domains, initial states). Satisfies UniformRandomBitGenerator.
class SequentialRng {
 public:
  using result_type = std::uint64_t;

  SequentialRng(std::uint64_t seed, std::uint64_t chain_id, StreamTag tag = StreamTag::Misc)
      : rng_(seed, chain_id), tag_(tag) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    if (lane_ == 0) {
      const auto out = Philox::generate({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                                         0u, static_cast<std::uint32_t>(tag_)},
                                        rng_.key());
      buf_[0] = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
      buf_[1] = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
      ++counter_;
    }
    const result_type r = buf_[lane_];
    lane_ ^= 1;
    return r;
  }

  double uniform() { return to_unit_double((*this)()); }

 private:
  CounterRng rng_;
  StreamTag tag_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int lane_ = 0;
};

}  // namespace fkising
