#pragma once

#include <array>
#include <cstdint>

namespace mclab {

// Philox4x32-10 counter-based generator (Salmon et al. constants). Each
// (key, counter) pair maps to 128 independent output bits; there is no
// sequential state, which is what makes samples addressable by index.
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                            std::uint64_t ctr_hi,
                                            std::uint64_t ctr_lo) {
    std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
    std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
    std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t(kMul0) * c0;
      const std::uint64_t p1 = std::uint64_t(kMul1) * c2;
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      c0 = n0;
      c1 = lo1;
      c2 = n2;
      c3 = lo0;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    return {c0, c1, c2, c3};
  }
};

// Uniform u64 stream for one sample: key = master_seed, counter high half =
// sample_index, low half = running block number. Two u64 per Philox block.
class CounterStream {
 public:
  CounterStream(std::uint64_t master_seed, std::uint64_t sample_index)
      : key_(master_seed), hi_(sample_index) {}

  std::uint64_t next_u64() {
    if (have_ == 0) {
      buf_ = Philox4x32::block(key_, hi_, lo_++);
      have_ = 2;
    }
    const unsigned idx = 2u * (2u - have_);
    --have_;
    return std::uint64_t(buf_[idx]) | (std::uint64_t(buf_[idx + 1]) << 32);
  }

 private:
  std::uint64_t key_, hi_;
  std::uint64_t lo_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  unsigned have_ = 0;
};

// splitmix64; used to derive disjoint sub-seeds from a campaign seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace mclab
