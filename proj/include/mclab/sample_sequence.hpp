#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mclab {

enum class Distribution { ComplexGaussian, RealGaussian, Rademacher };

const char* to_string(Distribution d);
Distribution distribution_from_string(const std::string& s);  // "complex"|"real"|"pm1"

// Pinned signs for selected indices. Text form "2:+1,4:-1" (any order,
// duplicates rejected).
class Conditioning {
 public:
  Conditioning() = default;

  void set(std::uint32_t k, int sign);  // sign in {+1,-1}, k >= 1
  static Conditioning parse(const std::string& text);
  std::string to_string() const;  // canonical: ascending k, "+1"/"-1"

  bool empty() const { return signs_.empty(); }
  std::size_t size() const { return signs_.size(); }
  const std::map<std::uint32_t, int>& signs() const { return signs_; }
  bool all_even() const;
  bool contains(std::uint32_t k) const { return signs_.count(k) != 0; }

  // Throws std::invalid_argument unless every conditioned index is in [1, n].
  void require_within(std::uint32_t n) const;

  bool operator==(const Conditioning&) const = default;

 private:
  std::map<std::uint32_t, int> signs_;
};

struct Provenance {
  std::uint64_t master_seed = 0;
  std::uint64_t sample_index = 0;
  Conditioning conditioning;
};

// One realization x(1..N) of the input sequence. values[0] is unused and kept
// at 0 so value(k) is 1-based like the math. Real-valued distributions keep
// imaginary parts exactly 0.
class SampleSequence {
 public:
  SampleSequence() = default;
  SampleSequence(Distribution d, std::uint32_t n) { reset(d, n); }

  void reset(Distribution d, std::uint32_t n) {
    dist_ = d;
    values_.assign(static_cast<std::size_t>(n) + 1, {0.0, 0.0});
  }

  std::uint32_t size() const {
    return values_.empty() ? 0 : static_cast<std::uint32_t>(values_.size() - 1);
  }
  Distribution dist() const { return dist_; }
  bool is_real() const { return dist_ != Distribution::ComplexGaussian; }

  std::complex<double> value(std::uint32_t k) const { return values_[k]; }
  void set_value(std::uint32_t k, std::complex<double> v) { values_[k] = v; }

  Provenance& provenance() { return prov_; }
  const Provenance& provenance() const { return prov_; }

 private:
  Distribution dist_ = Distribution::ComplexGaussian;
  std::vector<std::complex<double>> values_;
  Provenance prov_;
};

}  // namespace mclab
