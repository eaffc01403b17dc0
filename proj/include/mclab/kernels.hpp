#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace mclab::kernels {

// Elementwise kernels behind the coefficient recurrence. All of them are
// pure streaming ops with no cross-lane reduction, so vector width does not
// change the arithmetic graph per element; SIMD variants may use FMA, the
// scalar reference never does.
//
// Reference semantics (scalar):
//   axpy:           y[i] += a * x[i]
//   add_scaled:     out[i] = base[i] + a * x[i]
//   axpy_cx:        (yre,yim)[i] += (ar,ai) * (xre,xim)[i]
//   add_scaled_cx:  (ore,oim)[i] = (bre,bim)[i] + (ar,ai) * (xre,xim)[i]
// Complex product is the usual (ar*xr - ai*xi, ar*xi + ai*xr).
// `out`/`y` must not overlap the inputs; `base`/`x` may overlap each other.
struct Ops {
  const char* name;
  void (*axpy)(double* y, const double* x, std::size_t n, double a);
  void (*add_scaled)(double* out, const double* base, const double* x,
                     std::size_t n, double a);
  void (*axpy_cx)(double* yre, double* yim, const double* xre,
                  const double* xim, std::size_t n, double ar, double ai);
  void (*add_scaled_cx)(double* ore, double* oim, const double* bre,
                        const double* bim, const double* xre,
                        const double* xim, std::size_t n, double ar, double ai);
};

// Always-present reference implementation.
const Ops& scalar();

// Variants compiled in and supported by this CPU (scalar first).
std::vector<const Ops*> available();

// Lookup by name ("scalar", "avx2", "avx512", "neon"); nullptr if the variant
// is not compiled in or the CPU lacks it.
const Ops* find(std::string_view name);

// Dispatched default: widest supported variant, unless the MCLAB_KERNEL
// environment variable names another available one.
const Ops& active();

}  // namespace mclab::kernels
