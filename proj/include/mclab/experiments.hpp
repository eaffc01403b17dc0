#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mclab/montecarlo.hpp"

namespace mclab {

struct Estimate {
  double value = 0;
  double se = 0;
};

// --- exhaustive sign-sequence experiments (Rademacher only) ---

// Exact E[|A(n)|] (optionally conditioned) by enumerating all sign sequences.
// Compensated mean over 2^(n - |cond|) terms; cap guards the budget.
double exact_expectation_pm1(std::uint32_t n, const Conditioning& cond = {},
                             std::uint32_t cap = caps::exhaustive_free_indices);

// Information content of odd-index signs. Conditioning an odd index k cannot
// move E[|A(n)|]: flipping every odd-index sign maps the ensemble to itself
// while negating A(n) coordinatewise when n is odd (leaving it when n is
// even), so |A(n)| is equidistributed across the two half-ensembles. Both
// facts are checked: conditional-mean gaps for every odd k and n <= n_max via
// one exhaustive pass per n, and the pointwise sign-map identity
// A(n; flip_odd x) == (-1)^n A(n; x) bit-for-bit on random draws.
struct OddSymmetryReport {
  std::uint32_t n_max = 0;
  double max_gap = 0;                  // worst conditional-mean gap seen
  std::uint64_t pairs_checked = 0;     // (n, odd k) pairs
  std::uint64_t pointwise_trials = 0;
  std::uint64_t pointwise_failures = 0;  // exact identity violations
  bool ok(double tol = 1e-12) const {
    return max_gap <= tol && pointwise_failures == 0;
  }
};
OddSymmetryReport odd_symmetry_check(std::uint32_t n_max,
                                     std::uint64_t seed = 0x0DD5C0DEull,
                                     std::uint32_t trials = 1000);

// --- Monte Carlo experiments ---

struct ConvergenceRow {
  std::uint32_t n = 0;
  double scaled_mean = 0;
  double scaled_se = 0;
};
struct ConvergenceTable {
  Distribution dist = Distribution::ComplexGaussian;
  std::uint64_t samples = 0;
  std::uint64_t master_seed = 0;
  std::vector<ConvergenceRow> rows;  // ascending n
};

// One run at max(grid); every grid point reads off the same accumulator.
// Grid must be strictly ascending with min >= 2.
ConvergenceTable convergence_table(Distribution dist,
                                   const std::vector<std::uint32_t>& grid,
                                   std::uint64_t samples,
                                   std::uint64_t master_seed,
                                   unsigned workers = 1,
                                   const std::string& kernel = "",
                                   const ProgressFn& progress = {});

// Scaled-mean estimate under sign conditioning (Rademacher). Odd conditioned
// indices are rejected: they are information-free (see OddSymmetryReport),
// so a "constant" conditioned on them would silently equal the unconditioned
// one.
Estimate conditional_constant(std::uint32_t n, const Conditioning& eps,
                              std::uint64_t samples, std::uint64_t master_seed,
                              unsigned workers = 1,
                              const std::string& kernel = "",
                              const ProgressFn& progress = {});

// --- product-structure diagnostics ---

// rho(eps) = C(eps) * C^{|K|-1} / prod_k C_k(eps_k), with first-order
// independent error propagation. All inputs must be positive with finite
// standard errors. Under a multiplicative model C(eps) = C * prod (C_k/C),
// rho == 1 identically.
Estimate product_ratio(const Estimate& c_eps, const Estimate& c_uncond,
                       const std::vector<Estimate>& c_singles);

struct RatioCell {
  std::vector<int> eps;  // signs aligned with kset
  Estimate c_eps;
  Estimate rho;
};
struct RatioTable {
  std::vector<std::uint32_t> kset;  // ascending even indices
  std::uint32_t n = 0;
  std::uint64_t samples_per_run = 0;
  std::uint64_t campaign_seed = 0;
  Estimate c_uncond;
  // singles[i] = {C_k at +1, C_k at -1} for kset[i]
  std::vector<std::array<Estimate, 2>> singles;
  std::vector<RatioCell> cells;  // all 2^|kset| sign choices, counting order
};

struct VerdictFlag {
  std::size_t table = 0;
  std::vector<int> eps;
  double rho = 0, dev = 0, se = 0;
};
struct Verdict {
  std::vector<VerdictFlag> flags;  // cells with |rho - 1| > 3 se
  bool rejected = false;           // any flagged cell with |rho - 1| >= 0.03
  std::string text;
};

// Requires every table to carry its full 2^|K| grid of cells.
Verdict product_structure_verdict(const std::vector<RatioTable>& tables);

std::string render_ratio_table(const RatioTable& t);
std::string render_verdict(const Verdict& v);

}  // namespace mclab
