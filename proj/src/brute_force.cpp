#include "mclab/brute_force.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mclab {

std::complex<double> partition_weight(const Partition& lambda,
                                      const SampleSequence& x) {
  if (!lambda.parts.empty() && lambda.parts.front() > x.size())
    throw std::invalid_argument("partition has part " +
                                std::to_string(lambda.parts.front()) +
                                " beyond sequence length " +
                                std::to_string(x.size()));
  std::complex<double> w = 1.0;
  lambda.for_each_run([&](std::uint32_t k, std::uint32_t m) {
    const std::complex<double> base = x.value(k) / std::sqrt(double(k));
    for (std::uint32_t j = 1; j <= m; ++j) {
      w *= base;
      w /= double(j);
    }
  });
  return w;
}

std::vector<std::complex<double>> brute_force_coefficients(
    const SampleSequence& x, std::uint32_t n_max, std::uint32_t cap) {
  if (n_max > cap)
    throw std::invalid_argument("brute-force order " + std::to_string(n_max) +
                                " exceeds cap " + std::to_string(cap));
  if (x.size() < n_max)
    throw std::invalid_argument("sequence shorter than requested order");
  std::vector<std::complex<double>> a(n_max + 1);
  a[0] = 1.0;
  for (std::uint32_t n = 1; n <= n_max; ++n) {
    std::complex<double> s = 0.0;
    for_each_partition(n,
                       [&](const Partition& p) { s += partition_weight(p, x); });
    a[n] = s;
  }
  return a;
}

}  // namespace mclab
