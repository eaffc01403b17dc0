#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "mclab/kernels.hpp"
#include "mclab/philox.hpp"

using namespace mclab;
using kernels::Ops;

namespace {

std::vector<double> uniforms(std::uint64_t stream, std::size_t n) {
  CounterStream rng(0xabcdef, stream);
  std::vector<double> v(n);
  for (auto& x : v)
    x = 2.0 * (double(rng.next_u64() >> 11) * 0x1p-53) - 1.0;
  return v;
}

}  // namespace

TEST_CASE("scalar axpy on hand values") {
  const Ops& s = kernels::scalar();
  double y[3] = {1, 2, 3};
  const double x[3] = {10, 20, 30};
  s.axpy(y, x, 3, 2.0);
  CHECK(y[0] == 21.0);
  CHECK(y[1] == 42.0);
  CHECK(y[2] == 63.0);
}

TEST_CASE("scalar add_scaled on hand values") {
  const Ops& s = kernels::scalar();
  const double base[3] = {1, 1, 1};
  const double x[3] = {1, 2, 3};
  double out[3];
  s.add_scaled(out, base, x, 3, -1.0);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == -1.0);
  CHECK(out[2] == -2.0);
}

TEST_CASE("scalar complex axpy matches hand complex products") {
  // (2+i)*(5+6i) = 4+17i ; (2+i)*(7+8i) = 6+23i
  const Ops& s = kernels::scalar();
  double yre[2] = {1, 3}, yim[2] = {2, 4};
  const double xre[2] = {5, 7}, xim[2] = {6, 8};
  s.axpy_cx(yre, yim, xre, xim, 2, 2.0, 1.0);
  CHECK(yre[0] == 5.0);
  CHECK(yim[0] == 19.0);
  CHECK(yre[1] == 9.0);
  CHECK(yim[1] == 27.0);
}

TEST_CASE("scalar complex add_scaled matches hand complex products") {
  const Ops& s = kernels::scalar();
  const double bre[2] = {1, 0}, bim[2] = {0, 1};
  const double xre[2] = {1, 2}, xim[2] = {1, -1};
  double ore[2], oim[2];
  // a = 1-2i: a*(1+i) = 3-i ; a*(2-i) = 0-5i
  s.add_scaled_cx(ore, oim, bre, bim, xre, xim, 2, 1.0, -2.0);
  CHECK(ore[0] == 4.0);
  CHECK(oim[0] == -1.0);
  CHECK(ore[1] == 0.0);
  CHECK(oim[1] == -4.0);
}

TEST_CASE("add_scaled allows base and x to alias") {
  const Ops& s = kernels::scalar();
  const double x[3] = {1, 2, 3};
  double out[3];
  s.add_scaled(out, x, x, 3, 1.0);  // out = x + 1*x
  CHECK(out[0] == 2.0);
  CHECK(out[1] == 4.0);
  CHECK(out[2] == 6.0);
}

TEST_CASE("available starts with scalar; find is consistent") {
  const auto avail = kernels::available();
  REQUIRE(!avail.empty());
  CHECK(std::strcmp(avail[0]->name, "scalar") == 0);
  CHECK(kernels::find("scalar") == avail[0]);
  CHECK(kernels::find("no-such-kernel") == nullptr);
  bool active_listed = false;
  for (const Ops* o : avail)
    if (o == &kernels::active()) active_listed = true;
  CHECK(active_listed);
}

TEST_CASE("every available kernel matches the scalar reference") {
  const Ops& ref = kernels::scalar();
  const auto avail = kernels::available();
  // Sizes straddle vector widths (1..17) plus longer streaks.
  std::vector<std::size_t> sizes;
  for (std::size_t n = 1; n <= 17; ++n) sizes.push_back(n);
  sizes.push_back(64);
  sizes.push_back(1000);

  for (const Ops* ops : avail) {
    CAPTURE(ops->name);
    for (std::size_t n : sizes) {
      CAPTURE(n);
      const auto x = uniforms(4 * n, n);
      const auto x2 = uniforms(4 * n + 1, n);
      const auto y0 = uniforms(4 * n + 2, n);
      const auto y1 = uniforms(4 * n + 3, n);
      const double ar = 0.7362519, ai = -0.4178303;

      auto ya = y0, yb = y0;
      ref.axpy(ya.data(), x.data(), n, ar);
      ops->axpy(yb.data(), x.data(), n, ar);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::fabs(ya[i] - yb[i]) <= 1e-14 * (1.0 + std::fabs(ya[i])));

      std::vector<double> oa(n), ob(n);
      ref.add_scaled(oa.data(), y0.data(), x.data(), n, ar);
      ops->add_scaled(ob.data(), y0.data(), x.data(), n, ar);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(std::fabs(oa[i] - ob[i]) <= 1e-14 * (1.0 + std::fabs(oa[i])));

      auto yra = y0, yia = y1, yrb = y0, yib = y1;
      ref.axpy_cx(yra.data(), yia.data(), x.data(), x2.data(), n, ar, ai);
      ops->axpy_cx(yrb.data(), yib.data(), x.data(), x2.data(), n, ar, ai);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::fabs(yra[i] - yrb[i]) <= 1e-14 * (1.0 + std::fabs(yra[i])));
        CHECK(std::fabs(yia[i] - yib[i]) <= 1e-14 * (1.0 + std::fabs(yia[i])));
      }

      std::vector<double> ra(n), ia(n), rb(n), ib(n);
      ref.add_scaled_cx(ra.data(), ia.data(), y0.data(), y1.data(), x.data(),
                        x2.data(), n, ar, ai);
      ops->add_scaled_cx(rb.data(), ib.data(), y0.data(), y1.data(), x.data(),
                         x2.data(), n, ar, ai);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::fabs(ra[i] - rb[i]) <= 1e-14 * (1.0 + std::fabs(ra[i])));
        CHECK(std::fabs(ia[i] - ib[i]) <= 1e-14 * (1.0 + std::fabs(ia[i])));
      }
    }
  }
}

TEST_CASE("kernels are deterministic run to run") {
  for (const Ops* ops : kernels::available()) {
    CAPTURE(ops->name);
    const auto x = uniforms(99, 257);
    const auto y0 = uniforms(100, 257);
    auto y1 = y0, y2 = y0;
    ops->axpy(y1.data(), x.data(), x.size(), 1.0 / 3.0);
    ops->axpy(y2.data(), x.data(), x.size(), 1.0 / 3.0);
    CHECK(std::memcmp(y1.data(), y2.data(), y1.size() * sizeof(double)) == 0);
  }
}
