#include "mclab/kernels.hpp"

// Reference kernels. Plain mul/add with a fixed per-element evaluation
// order; compiled with -ffp-contract=off so the compiler cannot fuse these
// into FMA behind our back. Every other variant is tested against this one.

namespace mclab::kernels {
namespace {

void axpy_(double* y, const double* x, std::size_t n, double a) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void add_scaled_(double* out, const double* base, const double* x,
                 std::size_t n, double a) {
  for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + a * x[i];
}

void axpy_cx_(double* yre, double* yim, const double* xre, const double* xim,
              std::size_t n, double ar, double ai) {
  for (std::size_t i = 0; i < n; ++i) {
    const double tre = ar * xre[i] - ai * xim[i];
    const double tim = ar * xim[i] + ai * xre[i];
    yre[i] += tre;
    yim[i] += tim;
  }
}

void add_scaled_cx_(double* ore, double* oim, const double* bre,
                    const double* bim, const double* xre, const double* xim,
                    std::size_t n, double ar, double ai) {
  for (std::size_t i = 0; i < n; ++i) {
    const double tre = ar * xre[i] - ai * xim[i];
    const double tim = ar * xim[i] + ai * xre[i];
    ore[i] = bre[i] + tre;
    oim[i] = bim[i] + tim;
  }
}

constexpr Ops kScalar = {"scalar", axpy_, add_scaled_, axpy_cx_, add_scaled_cx_};

}  // namespace

const Ops& scalar() { return kScalar; }

}  // namespace mclab::kernels
