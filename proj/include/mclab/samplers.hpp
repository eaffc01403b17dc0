#pragma once

#include <cstdint>

#include "mclab/common.hpp"
#include "mclab/sample_sequence.hpp"

namespace mclab {

struct SeedSpec {
  std::uint64_t master_seed = 0;
};

// Draws x(1..n) for sample `sample_index` of the stream identified by
// (distribution, master_seed). The draw is a pure function of those inputs:
// the same triple yields bit-identical sequences on every machine, worker
// layout, and call order. Conditioned indices are overwritten with the pinned
// sign after the unconditioned draw, so the untouched coordinates keep the
// unconditional law. Sign conditioning on Gaussian distributions is refused
// unless allow_gaussian_conditioning is set (signs are not values from those
// laws).
void draw_sequence_into(SampleSequence& out, Distribution dist,
                        std::uint32_t n, SeedSpec seed,
                        std::uint64_t sample_index,
                        const Conditioning& cond = {},
                        bool allow_gaussian_conditioning = false);

SampleSequence draw_sequence(Distribution dist, std::uint32_t n, SeedSpec seed,
                             std::uint64_t sample_index,
                             const Conditioning& cond = {},
                             bool allow_gaussian_conditioning = false);

// Fixed uniform->normal mapping (documented contract, not a std facility):
// from two u64s a, b:
//   u1 = ((a >> 11) + 1) * 2^-53   in (0, 1]
//   u2 = (b >> 11) * 2^-53         in [0, 1)
//   z0 = sqrt(-2 ln u1) cos(2 pi u2),  z1 = sqrt(-2 ln u1) sin(2 pi u2)
// ComplexGaussian consumes both: x = (z0 + i z1)/sqrt(2). RealGaussian uses
// z0 then z1. Rademacher maps one u64's top bit: 0 -> +1, 1 -> -1.
void box_muller_pair(std::uint64_t a, std::uint64_t b, double& z0, double& z1);

// All 2^(n - |cond|) sign sequences at the conditioned signs, streamed in
// counting order: ordinal's most significant free bit drives the smallest
// free index, bit 0 -> +1, bit 1 -> -1. So with no conditioning and n=2 the
// order is (+,+), (+,-), (-,+), (-,-). Refuses more than `cap` free indices
// with a message stating the budget that would be needed.
class SignSequenceRange {
 public:
  SignSequenceRange(std::uint32_t n, const Conditioning& cond = {},
                    std::uint32_t cap = caps::exhaustive_free_indices);

  std::uint64_t total() const { return std::uint64_t(1) << free_.size(); }
  std::uint32_t free_count() const {
    return static_cast<std::uint32_t>(free_.size());
  }

  // Fills `out` with sequence number `ordinal` (0-based). Provenance records
  // the ordinal as sample_index with master_seed 0.
  void fill(std::uint64_t ordinal, SampleSequence& out) const;

 private:
  std::uint32_t n_;
  Conditioning cond_;
  std::vector<std::uint32_t> free_;  // ascending unconditioned indices
};

}  // namespace mclab
