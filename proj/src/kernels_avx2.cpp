#include "mclab/kernels.hpp"

// AVX2+FMA variant; this TU is compiled with -mavx2 -mfma. The tail loops
// use std::fma so head and tail share one arithmetic graph per element.

#include <immintrin.h>

#include <cmath>

namespace mclab::kernels {
namespace {

void axpy_(double* y, const double* x, std::size_t n, double a) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void add_scaled_(double* out, const double* base, const double* x,
                 std::size_t n, double a) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vb = _mm256_loadu_pd(base + i);
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vb));
  }
  for (; i < n; ++i) out[i] = std::fma(a, x[i], base[i]);
}

void axpy_cx_(double* yre, double* yim, const double* xre, const double* xim,
              std::size_t n, double ar, double ai) {
  const __m256d var = _mm256_set1_pd(ar);
  const __m256d vai = _mm256_set1_pd(ai);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xr = _mm256_loadu_pd(xre + i);
    const __m256d xi = _mm256_loadu_pd(xim + i);
    __m256d yr = _mm256_loadu_pd(yre + i);
    __m256d yi = _mm256_loadu_pd(yim + i);
    yr = _mm256_fmadd_pd(var, xr, _mm256_fnmadd_pd(vai, xi, yr));
    yi = _mm256_fmadd_pd(var, xi, _mm256_fmadd_pd(vai, xr, yi));
    _mm256_storeu_pd(yre + i, yr);
    _mm256_storeu_pd(yim + i, yi);
  }
  for (; i < n; ++i) {
    const double yr = std::fma(ar, xre[i], std::fma(-ai, xim[i], yre[i]));
    const double yi = std::fma(ar, xim[i], std::fma(ai, xre[i], yim[i]));
    yre[i] = yr;
    yim[i] = yi;
  }
}

void add_scaled_cx_(double* ore, double* oim, const double* bre,
                    const double* bim, const double* xre, const double* xim,
                    std::size_t n, double ar, double ai) {
  const __m256d var = _mm256_set1_pd(ar);
  const __m256d vai = _mm256_set1_pd(ai);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xr = _mm256_loadu_pd(xre + i);
    const __m256d xi = _mm256_loadu_pd(xim + i);
    const __m256d br = _mm256_loadu_pd(bre + i);
    const __m256d bi = _mm256_loadu_pd(bim + i);
    _mm256_storeu_pd(ore + i,
                     _mm256_fmadd_pd(var, xr, _mm256_fnmadd_pd(vai, xi, br)));
    _mm256_storeu_pd(oim + i,
                     _mm256_fmadd_pd(var, xi, _mm256_fmadd_pd(vai, xr, bi)));
  }
  for (; i < n; ++i) {
    ore[i] = std::fma(ar, xre[i], std::fma(-ai, xim[i], bre[i]));
    oim[i] = std::fma(ar, xim[i], std::fma(ai, xre[i], bim[i]));
  }
}

constexpr Ops kAvx2 = {"avx2", axpy_, add_scaled_, axpy_cx_, add_scaled_cx_};

}  // namespace

const Ops* avx2_ops() { return &kAvx2; }

}  // namespace mclab::kernels
