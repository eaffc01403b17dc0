#pragma once

#include <cstdint>
#include <vector>

#include "mclab/coeff_engine.hpp"

namespace mclab {

// Neumaier variant of compensated summation: `sum + comp` is the corrected
// total. Works when addends exceed the running sum, unlike plain Kahan.
inline void neumaier_add(double& sum, double& comp, double v) {
  const double t = sum + v;
  if ((sum >= 0 ? sum : -sum) >= (v >= 0 ? v : -v))
    comp += (sum - t) + v;
  else
    comp += (v - t) + sum;
  sum = t;
}

// Fixed-width histogram, half-open bins [lo + i*w, lo + (i+1)*w); values at
// or beyond `hi` land in overflow, below `lo` in underflow.
struct Histogram {
  double lo = 0.0, hi = 1.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t underflow = 0, overflow = 0;

  Histogram() = default;
  Histogram(double lo_, double hi_, std::uint32_t bins)
      : lo(lo_), hi(hi_), counts(bins, 0) {}

  void add(double v) {
    if (v < lo) {
      ++underflow;
      return;
    }
    const double w = (hi - lo) / double(counts.size());
    const auto i = static_cast<std::size_t>((v - lo) / w);
    if (i >= counts.size())
      ++overflow;
    else
      ++counts[i];
  }

  void merge(const Histogram& o);
  std::uint64_t total() const;
};

// Per-index moment sums of |A(n)|^{2q} for a configured set of exponents q,
// compensated. One accumulator per worker shard; shards merge in fixed order.
//
// Histograms (optional) record the scaled top coefficient: |A(N)|*(ln N)^{1/4}
// on [0,5], scaled Re/Im on [-5,5], 200 bins each; they require N >= 2.
class MomentAccumulator {
 public:
  static constexpr std::uint32_t kHistBins = 200;

  MomentAccumulator() = default;
  MomentAccumulator(std::uint32_t n, std::vector<double> qs,
                    bool with_histograms = false);

  // Folds one coefficient series in; returns false (and counts the sample as
  // quarantined, absorbing nothing) if any entry is non-finite.
  bool absorb(const SeriesView& v);

  // Addend order inside this accumulator is arrival order; merging follows
  // the caller's order. Counts add exactly; sums are compensated, so any
  // grouping of the same samples agrees to ~1e-12 relative.
  void merge(const MomentAccumulator& o);

  bool same_shape(const MomentAccumulator& o) const;
  void clear();

  std::uint32_t n() const { return n_; }
  const std::vector<double>& qs() const { return qs_; }
  std::uint64_t count() const { return count_; }
  std::uint64_t quarantined() const { return quarantined_; }
  bool has_histograms() const { return with_hist_; }

  std::size_t q_index(double q) const;  // throws if q not configured
  double moment_sum(std::size_t qi, std::uint32_t idx) const;
  double mean(double q, std::uint32_t idx) const;

  // Raw planes, for serialization.
  const std::vector<double>& sums(std::size_t qi) const { return sum_[qi]; }
  const std::vector<double>& comps(std::size_t qi) const { return comp_[qi]; }
  void load_plane(std::size_t qi, std::vector<double> sum,
                  std::vector<double> comp);
  void load_counts(std::uint64_t count, std::uint64_t quarantined);

  const Histogram& hist_abs() const { return h_abs_; }
  const Histogram& hist_re() const { return h_re_; }
  const Histogram& hist_im() const { return h_im_; }
  Histogram& hist_abs() { return h_abs_; }
  Histogram& hist_re() { return h_re_; }
  Histogram& hist_im() { return h_im_; }

 private:
  std::uint32_t n_ = 0;
  std::vector<double> qs_;
  bool with_hist_ = false;
  std::uint64_t count_ = 0;
  std::uint64_t quarantined_ = 0;
  std::vector<std::vector<double>> sum_, comp_;  // [qi][coefficient index]
  std::vector<double> r2_;                       // scratch |A(i)|^2
  double hist_scale_ = 1.0;
  Histogram h_abs_, h_re_, h_im_;
};

// Mean of |A(n)| times (ln n)^{1/4}; the normalization under which the mean
// admits a finite nonzero limit. Requires n >= 2 (the scale degenerates at
// n < 2) and at least one sample.
double scaled_mean(const MomentAccumulator& acc, std::uint32_t n);

// Standard error of mean|A(n)| from the first two moments.
double stderr_abs(const MomentAccumulator& acc, std::uint32_t n);

// Same, for the scaled mean.
double scaled_stderr(const MomentAccumulator& acc, std::uint32_t n);

}  // namespace mclab
