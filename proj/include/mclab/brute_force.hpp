#pragma once

#include <complex>
#include <vector>

#include "mclab/common.hpp"
#include "mclab/partition.hpp"
#include "mclab/sample_sequence.hpp"

namespace mclab {

// Weight of one partition: prod over distinct parts k with multiplicity m of
// (x(k)/sqrt(k))^m / m!. Built multiplicatively, one factor of x(k)/sqrt(k)
// and one division per step, so no factorial overflows. Empty partition -> 1.
std::complex<double> partition_weight(const Partition& lambda,
                                      const SampleSequence& x);

// Independent oracle: A(n) = sum over partitions of n of partition_weight.
// Shares nothing with the fast engine beyond scalar arithmetic. Exponential
// cost; refuses n_max > cap.
std::vector<std::complex<double>> brute_force_coefficients(
    const SampleSequence& x, std::uint32_t n_max,
    std::uint32_t cap = caps::brute_force_order);

}  // namespace mclab
