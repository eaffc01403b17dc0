#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "mclab/kernels.hpp"
#include "mclab/sample_sequence.hpp"

namespace mclab {

// Taylor coefficients A(0..n) of exp(sum_k x(k)/sqrt(k) * z^k), A(0) = 1.
struct CoefficientSeries {
  std::vector<std::complex<double>> coeffs;
  std::uint32_t order() const {
    return static_cast<std::uint32_t>(coeffs.size()) - 1;
  }
};

// Read-only view over the engine's internal split re/im arrays (size entries,
// index = coefficient order). For real inputs `im` is null and the
// imaginary parts are exactly zero.
struct SeriesView {
  const double* re = nullptr;
  const double* im = nullptr;
  std::size_t size = 0;
};

// Streaming evaluator. One pass per part value k updates the series with all
// powers of x(k)/sqrt(k); two length-(n_max+1) arrays, O(n^2 log n) work.
// Factors (x(k)/sqrt(k))^m / m! are built multiplicatively in ascending m,
// and the m-ascent stops once the factor underflows below the smallest
// normal double (the remaining terms are < 1e-300 in magnitude).
//
// The instance owns its workspace; reuse across samples avoids reallocation.
// Thread-compatible, not thread-safe: one engine per worker.
class CoefficientEngine {
 public:
  explicit CoefficientEngine(std::uint32_t n_max,
                             const kernels::Ops* ops = nullptr);

  // Computes A(0..n) for x; requires n <= n_max and x.size() >= n. Non-finite
  // inputs are rejected with std::domain_error. The view stays valid until
  // the next compute() on this engine.
  SeriesView compute(const SampleSequence& x, std::uint32_t n);
  SeriesView compute(const SampleSequence& x) { return compute(x, x.size()); }

  std::uint32_t n_max() const { return n_max_; }
  const kernels::Ops& ops() const { return *ops_; }

  // Scalars held in the two working arrays (re+im planes when complex):
  // 4*(n_max+1) for the complex path, 2*(n_max+1) real.
  std::size_t workspace_scalars(bool complex_path = true) const {
    return (complex_path ? 4u : 2u) * (std::size_t(n_max_) + 1);
  }

 private:
  std::uint32_t n_max_;
  const kernels::Ops* ops_;
  // Complex path uses all four planes; real path uses a_re_/b_re_ only.
  std::vector<double> a_re_, a_im_, b_re_, b_im_;
  std::vector<double> inv_sqrt_;  // inv_sqrt_[k] = 1/sqrt(k)
  bool last_real_ = false;
  const double* res_re_ = nullptr;  // which plane holds the latest result
  const double* res_im_ = nullptr;

  void run_complex(const SampleSequence& x, std::uint32_t n);
  void run_real(const SampleSequence& x, std::uint32_t n);
};

// One-shot convenience wrapper around CoefficientEngine.
CoefficientSeries compute_coefficients(const SampleSequence& x,
                                       std::uint32_t n_max,
                                       const kernels::Ops* ops = nullptr);

}  // namespace mclab
