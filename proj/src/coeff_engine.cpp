#include "mclab/coeff_engine.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mclab {

CoefficientEngine::CoefficientEngine(std::uint32_t n_max,
                                     const kernels::Ops* ops)
    : n_max_(n_max), ops_(ops ? ops : &kernels::active()) {
  const std::size_t len = std::size_t(n_max_) + 1;
  a_re_.resize(len);
  a_im_.resize(len);
  b_re_.resize(len);
  b_im_.resize(len);
  inv_sqrt_.resize(len);
  for (std::size_t k = 1; k < len; ++k)
    inv_sqrt_[k] = 1.0 / std::sqrt(double(k));
}

// Both paths share one structure. Writing `a` for the array currently holding
// B_{k-1} and `b` for the scratch:
//   - the m=1 pass overwrites b[k..n] = a[k..n] + f1 * a[0..n-k], which covers
//     the whole region that differs between B_k and B_{k-1}, so b needs no
//     zero fill;
//   - m >= 2 passes accumulate b[mk..n] += f_m * a[0..n-mk] (ascending m);
//   - pointers swap, and one element copy keeps the arrays in agreement on
//     [0, k] (entries below the current k are final and never rewritten).
// Per-element rounding order is therefore fixed regardless of worker count or
// sample order; kernel variants only change vector width, not the graph.

void CoefficientEngine::run_complex(const SampleSequence& x, std::uint32_t n) {
  double* are = a_re_.data();
  double* aim = a_im_.data();
  double* bre = b_re_.data();
  double* bim = b_im_.data();
  std::fill(are, are + n + 1, 0.0);
  std::fill(aim, aim + n + 1, 0.0);
  are[0] = bre[0] = 1.0;
  bim[0] = 0.0;
  for (std::uint32_t k = 1; k <= n; ++k) {
    const std::complex<double> t = x.value(k) * inv_sqrt_[k];
    double fr = t.real(), fi = t.imag();
    if (std::max(std::fabs(fr), std::fabs(fi)) < DBL_MIN) {
      bre[k] = are[k];
      bim[k] = aim[k];
      continue;
    }
    ops_->add_scaled_cx(bre + k, bim + k, are + k, aim + k, are, aim,
                        n - k + 1, fr, fi);
    for (std::uint32_t m = 2; std::uint64_t(m) * k <= n; ++m) {
      const double nr = fr * t.real() - fi * t.imag();
      const double ni = fr * t.imag() + fi * t.real();
      fr = nr / double(m);
      fi = ni / double(m);
      if (std::max(std::fabs(fr), std::fabs(fi)) < DBL_MIN) break;
      const std::uint32_t off = m * k;
      ops_->axpy_cx(bre + off, bim + off, are, aim, n - off + 1, fr, fi);
    }
    std::swap(are, bre);
    std::swap(aim, bim);
    bre[k] = are[k];
    bim[k] = aim[k];
  }
  res_re_ = are;
  res_im_ = aim;
}

void CoefficientEngine::run_real(const SampleSequence& x, std::uint32_t n) {
  double* a = a_re_.data();
  double* b = b_re_.data();
  std::fill(a, a + n + 1, 0.0);
  a[0] = b[0] = 1.0;
  for (std::uint32_t k = 1; k <= n; ++k) {
    const double t = x.value(k).real() * inv_sqrt_[k];
    double f = t;
    if (std::fabs(f) < DBL_MIN) {
      b[k] = a[k];
      continue;
    }
    ops_->add_scaled(b + k, a + k, a, n - k + 1, f);
    for (std::uint32_t m = 2; std::uint64_t(m) * k <= n; ++m) {
      f = f * t / double(m);
      if (std::fabs(f) < DBL_MIN) break;
      const std::uint32_t off = m * k;
      ops_->axpy(b + off, a, n - off + 1, f);
    }
    std::swap(a, b);
    b[k] = a[k];
  }
  res_re_ = a;
  res_im_ = nullptr;
}

SeriesView CoefficientEngine::compute(const SampleSequence& x,
                                      std::uint32_t n) {
  if (n > n_max_)
    throw std::invalid_argument("order " + std::to_string(n) +
                                " exceeds engine capacity " +
                                std::to_string(n_max_));
  if (x.size() < n)
    throw std::invalid_argument("sequence shorter than requested order");
  for (std::uint32_t k = 1; k <= n; ++k) {
    const auto v = x.value(k);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::domain_error("non-finite input x(" + std::to_string(k) + ")");
  }
  last_real_ = x.is_real();
  if (last_real_)
    run_real(x, n);
  else
    run_complex(x, n);
  return SeriesView{res_re_, res_im_, std::size_t(n) + 1};
}

CoefficientSeries compute_coefficients(const SampleSequence& x,
                                       std::uint32_t n_max,
                                       const kernels::Ops* ops) {
  CoefficientEngine eng(n_max, ops);
  const SeriesView v = eng.compute(x, n_max);
  CoefficientSeries out;
  out.coeffs.resize(v.size);
  for (std::size_t i = 0; i < v.size; ++i)
    out.coeffs[i] = {v.re[i], v.im ? v.im[i] : 0.0};
  return out;
}

}  // namespace mclab
