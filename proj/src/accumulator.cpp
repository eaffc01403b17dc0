#include "mclab/accumulator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mclab {

void Histogram::merge(const Histogram& o) {
  if (lo != o.lo || hi != o.hi || counts.size() != o.counts.size())
    throw std::invalid_argument("histogram shape mismatch");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
  underflow += o.underflow;
  overflow += o.overflow;
}

std::uint64_t Histogram::total() const {
  std::uint64_t t = underflow + overflow;
  for (auto c : counts) t += c;
  return t;
}

MomentAccumulator::MomentAccumulator(std::uint32_t n, std::vector<double> qs,
                                     bool with_histograms)
    : n_(n), qs_(std::move(qs)), with_hist_(with_histograms) {
  if (qs_.empty()) throw std::invalid_argument("moment set must be non-empty");
  for (double q : qs_)
    if (!(q > 0)) throw std::invalid_argument("moment exponents must be > 0");
  const std::size_t len = std::size_t(n_) + 1;
  sum_.assign(qs_.size(), std::vector<double>(len, 0.0));
  comp_.assign(qs_.size(), std::vector<double>(len, 0.0));
  r2_.resize(len);
  if (with_hist_) {
    if (n_ < 2)
      throw std::invalid_argument("histograms need n >= 2 (scale degenerates)");
    hist_scale_ = std::pow(std::log(double(n_)), 0.25);
    h_abs_ = Histogram(0.0, 5.0, kHistBins);
    h_re_ = Histogram(-5.0, 5.0, kHistBins);
    h_im_ = Histogram(-5.0, 5.0, kHistBins);
  }
}

bool MomentAccumulator::absorb(const SeriesView& v) {
  const std::size_t len = std::size_t(n_) + 1;
  if (v.size != len)
    throw std::invalid_argument("series length does not match accumulator");
  bool ok = true;
  for (std::size_t i = 0; i < len; ++i) {
    const double re = v.re[i];
    const double im = v.im ? v.im[i] : 0.0;
    const double r2 = re * re + im * im;
    if (!std::isfinite(r2)) {
      ok = false;
      break;
    }
    r2_[i] = r2;
  }
  if (!ok) {
    ++quarantined_;
    return false;
  }
  for (std::size_t qi = 0; qi < qs_.size(); ++qi) {
    const double q = qs_[qi];
    double* s = sum_[qi].data();
    double* c = comp_[qi].data();
    if (q == 0.5) {
      for (std::size_t i = 0; i < len; ++i)
        neumaier_add(s[i], c[i], std::sqrt(r2_[i]));
    } else if (q == 1.0) {
      for (std::size_t i = 0; i < len; ++i) neumaier_add(s[i], c[i], r2_[i]);
    } else if (q == 2.0) {
      for (std::size_t i = 0; i < len; ++i)
        neumaier_add(s[i], c[i], r2_[i] * r2_[i]);
    } else {
      for (std::size_t i = 0; i < len; ++i)
        neumaier_add(s[i], c[i], std::pow(r2_[i], q));
    }
  }
  if (with_hist_) {
    const double re = v.re[n_];
    const double im = v.im ? v.im[n_] : 0.0;
    h_abs_.add(std::sqrt(r2_[n_]) * hist_scale_);
    h_re_.add(re * hist_scale_);
    h_im_.add(im * hist_scale_);
  }
  ++count_;
  return true;
}

bool MomentAccumulator::same_shape(const MomentAccumulator& o) const {
  return n_ == o.n_ && qs_ == o.qs_ && with_hist_ == o.with_hist_;
}

void MomentAccumulator::merge(const MomentAccumulator& o) {
  if (!same_shape(o))
    throw std::invalid_argument("cannot merge accumulators of different shape");
  count_ += o.count_;
  quarantined_ += o.quarantined_;
  for (std::size_t qi = 0; qi < qs_.size(); ++qi) {
    double* s = sum_[qi].data();
    double* c = comp_[qi].data();
    const double* os = o.sum_[qi].data();
    const double* oc = o.comp_[qi].data();
    for (std::size_t i = 0; i < sum_[qi].size(); ++i) {
      neumaier_add(s[i], c[i], os[i]);
      neumaier_add(s[i], c[i], oc[i]);
    }
  }
  if (with_hist_) {
    h_abs_.merge(o.h_abs_);
    h_re_.merge(o.h_re_);
    h_im_.merge(o.h_im_);
  }
}

void MomentAccumulator::clear() {
  count_ = 0;
  quarantined_ = 0;
  for (auto& p : sum_) std::fill(p.begin(), p.end(), 0.0);
  for (auto& p : comp_) std::fill(p.begin(), p.end(), 0.0);
  if (with_hist_) {
    h_abs_ = Histogram(0.0, 5.0, kHistBins);
    h_re_ = Histogram(-5.0, 5.0, kHistBins);
    h_im_ = Histogram(-5.0, 5.0, kHistBins);
  }
}

std::size_t MomentAccumulator::q_index(double q) const {
  for (std::size_t i = 0; i < qs_.size(); ++i)
    if (qs_[i] == q) return i;
  throw std::invalid_argument("moment exponent " + std::to_string(q) +
                              " not configured");
}

double MomentAccumulator::moment_sum(std::size_t qi, std::uint32_t idx) const {
  return sum_[qi][idx] + comp_[qi][idx];
}

double MomentAccumulator::mean(double q, std::uint32_t idx) const {
  if (count_ == 0) throw std::invalid_argument("no samples absorbed");
  if (idx > n_) throw std::invalid_argument("coefficient index out of range");
  return moment_sum(q_index(q), idx) / double(count_);
}

void MomentAccumulator::load_plane(std::size_t qi, std::vector<double> sum,
                                   std::vector<double> comp) {
  if (qi >= qs_.size() || sum.size() != std::size_t(n_) + 1 ||
      comp.size() != sum.size())
    throw std::invalid_argument("bad plane shape");
  sum_[qi] = std::move(sum);
  comp_[qi] = std::move(comp);
}

void MomentAccumulator::load_counts(std::uint64_t count,
                                    std::uint64_t quarantined) {
  count_ = count;
  quarantined_ = quarantined;
}

double scaled_mean(const MomentAccumulator& acc, std::uint32_t n) {
  if (n < 2)
    throw std::invalid_argument(
        "scaled mean undefined for n < 2 ((ln n)^{1/4} degenerates)");
  return acc.mean(0.5, n) * std::pow(std::log(double(n)), 0.25);
}

double stderr_abs(const MomentAccumulator& acc, std::uint32_t n) {
  if (acc.count() < 2)
    throw std::invalid_argument("standard error needs >= 2 samples");
  const double m1 = acc.mean(0.5, n);
  const double m2 = acc.mean(1.0, n);
  double var = m2 - m1 * m1;
  if (var < 0) var = 0;  // roundoff on constant data
  return std::sqrt(var / double(acc.count() - 1));
}

double scaled_stderr(const MomentAccumulator& acc, std::uint32_t n) {
  if (n < 2) throw std::invalid_argument("scaled stderr undefined for n < 2");
  return stderr_abs(acc, n) * std::pow(std::log(double(n)), 0.25);
}

}  // namespace mclab
