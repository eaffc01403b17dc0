#include "mclab/kernels.hpp"

// NEON variant (aarch64 baseline, no extra flags needed). vfmaq/vfmsq give
// fused c +/- a*b; scalar tails use std::fma to match.

#include <arm_neon.h>

#include <cmath>

namespace mclab::kernels {
namespace {

void axpy_(double* y, const double* x, std::size_t n, double a) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void add_scaled_(double* out, const double* base, const double* x,
                 std::size_t n, double a) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vfmaq_f64(vld1q_f64(base + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) out[i] = std::fma(a, x[i], base[i]);
}

void axpy_cx_(double* yre, double* yim, const double* xre, const double* xim,
              std::size_t n, double ar, double ai) {
  const float64x2_t var = vdupq_n_f64(ar);
  const float64x2_t vai = vdupq_n_f64(ai);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xr = vld1q_f64(xre + i);
    const float64x2_t xi = vld1q_f64(xim + i);
    float64x2_t yr = vld1q_f64(yre + i);
    float64x2_t yi = vld1q_f64(yim + i);
    yr = vfmaq_f64(vfmsq_f64(yr, vai, xi), var, xr);
    yi = vfmaq_f64(vfmaq_f64(yi, vai, xr), var, xi);
    vst1q_f64(yre + i, yr);
    vst1q_f64(yim + i, yi);
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
  const float64x2_t var = vdupq_n_f64(ar);
  const float64x2_t vai = vdupq_n_f64(ai);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xr = vld1q_f64(xre + i);
    const float64x2_t xi = vld1q_f64(xim + i);
    const float64x2_t br = vld1q_f64(bre + i);
    const float64x2_t bi = vld1q_f64(bim + i);
    vst1q_f64(ore + i, vfmaq_f64(vfmsq_f64(br, vai, xi), var, xr));
    vst1q_f64(oim + i, vfmaq_f64(vfmaq_f64(bi, vai, xr), var, xi));
  }
  for (; i < n; ++i) {
    ore[i] = std::fma(ar, xre[i], std::fma(-ai, xim[i], bre[i]));
    oim[i] = std::fma(ar, xim[i], std::fma(ai, xre[i], bim[i]));
  }
}

constexpr Ops kNeon = {"neon", axpy_, add_scaled_, axpy_cx_, add_scaled_cx_};

}  // namespace

const Ops* neon_ops() { return &kNeon; }

}  // namespace mclab::kernels
