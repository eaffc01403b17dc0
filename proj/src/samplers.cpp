#include "mclab/samplers.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mclab/philox.hpp"

namespace mclab {

namespace {
constexpr double kTwo53Inv = 0x1p-53;
constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

inline double rademacher_value(std::uint64_t u) {
  return (u >> 63) ? -1.0 : 1.0;
}
}  // namespace

void box_muller_pair(std::uint64_t a, std::uint64_t b, double& z0, double& z1) {
  const double u1 = (double((a >> 11) + 1)) * kTwo53Inv;  // (0, 1]
  const double u2 = double(b >> 11) * kTwo53Inv;          // [0, 1)
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  z0 = r * std::cos(theta);
  z1 = r * std::sin(theta);
}

void draw_sequence_into(SampleSequence& out, Distribution dist,
                        std::uint32_t n, SeedSpec seed,
                        std::uint64_t sample_index, const Conditioning& cond,
                        bool allow_gaussian_conditioning) {
  cond.require_within(n);
  if (!cond.empty() && dist != Distribution::Rademacher &&
      !allow_gaussian_conditioning)
    throw std::invalid_argument(
        "sign conditioning on a Gaussian distribution requires "
        "allow_gaussian_conditioning");

  if (out.dist() != dist || out.size() != n) out.reset(dist, n);
  CounterStream rng(seed.master_seed, sample_index);

  switch (dist) {
    case Distribution::ComplexGaussian:
      for (std::uint32_t k = 1; k <= n; ++k) {
        double z0, z1;
        box_muller_pair(rng.next_u64(), rng.next_u64(), z0, z1);
        out.set_value(k, {z0 * kInvSqrt2, z1 * kInvSqrt2});
      }
      break;
    case Distribution::RealGaussian: {
      double spare = 0.0;
      bool have_spare = false;
      for (std::uint32_t k = 1; k <= n; ++k) {
        double v;
        if (have_spare) {
          v = spare;
          have_spare = false;
        } else {
          double z1;
          box_muller_pair(rng.next_u64(), rng.next_u64(), v, z1);
          spare = z1;
          have_spare = true;
        }
        out.set_value(k, {v, 0.0});
      }
      break;
    }
    case Distribution::Rademacher:
      for (std::uint32_t k = 1; k <= n; ++k)
        out.set_value(k, {rademacher_value(rng.next_u64()), 0.0});
      break;
  }

  for (const auto& [k, s] : cond.signs()) out.set_value(k, {double(s), 0.0});

  out.provenance() = Provenance{seed.master_seed, sample_index, cond};
}

SampleSequence draw_sequence(Distribution dist, std::uint32_t n, SeedSpec seed,
                             std::uint64_t sample_index,
                             const Conditioning& cond,
                             bool allow_gaussian_conditioning) {
  SampleSequence out;
  draw_sequence_into(out, dist, n, seed, sample_index, cond,
                     allow_gaussian_conditioning);
  return out;
}

SignSequenceRange::SignSequenceRange(std::uint32_t n, const Conditioning& cond,
                                     std::uint32_t cap)
    : n_(n), cond_(cond) {
  cond_.require_within(n);
  free_.reserve(n);
  for (std::uint32_t k = 1; k <= n; ++k)
    if (!cond_.contains(k)) free_.push_back(k);
  if (free_.size() > cap)
    throw std::invalid_argument(
        "exhaustive enumeration over " + std::to_string(free_.size()) +
        " free indices needs 2^" + std::to_string(free_.size()) +
        " sequences; cap is 2^" + std::to_string(cap));
}

void SignSequenceRange::fill(std::uint64_t ordinal, SampleSequence& out) const {
  if (ordinal >= total())
    throw std::invalid_argument("sign sequence ordinal out of range");
  if (out.dist() != Distribution::Rademacher || out.size() != n_)
    out.reset(Distribution::Rademacher, n_);
  const std::uint32_t f = free_count();
  for (std::uint32_t j = 0; j < f; ++j) {
    const bool neg = (ordinal >> (f - 1 - j)) & 1u;
    out.set_value(free_[j], {neg ? -1.0 : 1.0, 0.0});
  }
  for (const auto& [k, s] : cond_.signs()) out.set_value(k, {double(s), 0.0});
  out.provenance() = Provenance{0, ordinal, cond_};
}

}  // namespace mclab
