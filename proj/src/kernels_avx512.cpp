#include "mclab/kernels.hpp"

// AVX-512F variant; this TU is compiled with -mavx512f -mfma. Remainders are
// handled with mask loads/stores instead of a scalar tail.

#include <immintrin.h>

namespace mclab::kernels {
namespace {

inline __mmask8 tail_mask(std::size_t rem) {
  return static_cast<__mmask8>((1u << rem) - 1u);
}

void axpy_(double* y, const double* x, std::size_t n, double a) {
  const __m512d va = _mm512_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m512d vy = _mm512_loadu_pd(y + i);
    vy = _mm512_fmadd_pd(va, _mm512_loadu_pd(x + i), vy);
    _mm512_storeu_pd(y + i, vy);
  }
  if (i < n) {
    const __mmask8 m = tail_mask(n - i);
    __m512d vy = _mm512_maskz_loadu_pd(m, y + i);
    vy = _mm512_fmadd_pd(va, _mm512_maskz_loadu_pd(m, x + i), vy);
    _mm512_mask_storeu_pd(y + i, m, vy);
  }
}

void add_scaled_(double* out, const double* base, const double* x,
                 std::size_t n, double a) {
  const __m512d va = _mm512_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512d vb = _mm512_loadu_pd(base + i);
    _mm512_storeu_pd(out + i, _mm512_fmadd_pd(va, _mm512_loadu_pd(x + i), vb));
  }
  if (i < n) {
    const __mmask8 m = tail_mask(n - i);
    const __m512d vb = _mm512_maskz_loadu_pd(m, base + i);
    _mm512_mask_storeu_pd(
        out + i, m, _mm512_fmadd_pd(va, _mm512_maskz_loadu_pd(m, x + i), vb));
  }
}

void axpy_cx_(double* yre, double* yim, const double* xre, const double* xim,
              std::size_t n, double ar, double ai) {
  const __m512d var = _mm512_set1_pd(ar);
  const __m512d vai = _mm512_set1_pd(ai);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512d xr = _mm512_loadu_pd(xre + i);
    const __m512d xi = _mm512_loadu_pd(xim + i);
    __m512d yr = _mm512_loadu_pd(yre + i);
    __m512d yi = _mm512_loadu_pd(yim + i);
    yr = _mm512_fmadd_pd(var, xr, _mm512_fnmadd_pd(vai, xi, yr));
    yi = _mm512_fmadd_pd(var, xi, _mm512_fmadd_pd(vai, xr, yi));
    _mm512_storeu_pd(yre + i, yr);
    _mm512_storeu_pd(yim + i, yi);
  }
  if (i < n) {
    const __mmask8 m = tail_mask(n - i);
    const __m512d xr = _mm512_maskz_loadu_pd(m, xre + i);
    const __m512d xi = _mm512_maskz_loadu_pd(m, xim + i);
    __m512d yr = _mm512_maskz_loadu_pd(m, yre + i);
    __m512d yi = _mm512_maskz_loadu_pd(m, yim + i);
    yr = _mm512_fmadd_pd(var, xr, _mm512_fnmadd_pd(vai, xi, yr));
    yi = _mm512_fmadd_pd(var, xi, _mm512_fmadd_pd(vai, xr, yi));
    _mm512_mask_storeu_pd(yre + i, m, yr);
    _mm512_mask_storeu_pd(yim + i, m, yi);
  }
}

void add_scaled_cx_(double* ore, double* oim, const double* bre,
                    const double* bim, const double* xre, const double* xim,
                    std::size_t n, double ar, double ai) {
  const __m512d var = _mm512_set1_pd(ar);
  const __m512d vai = _mm512_set1_pd(ai);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512d xr = _mm512_loadu_pd(xre + i);
    const __m512d xi = _mm512_loadu_pd(xim + i);
    const __m512d br = _mm512_loadu_pd(bre + i);
    const __m512d bi = _mm512_loadu_pd(bim + i);
    _mm512_storeu_pd(ore + i,
                     _mm512_fmadd_pd(var, xr, _mm512_fnmadd_pd(vai, xi, br)));
    _mm512_storeu_pd(oim + i,
                     _mm512_fmadd_pd(var, xi, _mm512_fmadd_pd(vai, xr, bi)));
  }
  if (i < n) {
    const __mmask8 m = tail_mask(n - i);
    const __m512d xr = _mm512_maskz_loadu_pd(m, xre + i);
    const __m512d xi = _mm512_maskz_loadu_pd(m, xim + i);
    const __m512d br = _mm512_maskz_loadu_pd(m, bre + i);
    const __m512d bi = _mm512_maskz_loadu_pd(m, bim + i);
    _mm512_mask_storeu_pd(
        ore + i, m, _mm512_fmadd_pd(var, xr, _mm512_fnmadd_pd(vai, xi, br)));
    _mm512_mask_storeu_pd(
        oim + i, m, _mm512_fmadd_pd(var, xi, _mm512_fmadd_pd(vai, xr, bi)));
  }
}

constexpr Ops kAvx512 = {"avx512", axpy_, add_scaled_, axpy_cx_, add_scaled_cx_};

}  // namespace

const Ops* avx512_ops() { return &kAvx512; }

}  // namespace mclab::kernels
