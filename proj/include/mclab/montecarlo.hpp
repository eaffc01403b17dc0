#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mclab/accumulator.hpp"
#include "mclab/samplers.hpp"

namespace mclab {

// Everything that identifies a run. Fields below the marker affect execution
// only, not results: they are excluded from the canonical string, so the
// same logical run keeps one hash across worker counts and checkpointing
// choices. (Kernel selection can shift results by ~1 ulp per element; runs
// are bit-reproducible per kernel, and the hash tracks the logical config.)
struct RunConfig {
  Distribution dist = Distribution::ComplexGaussian;
  std::uint32_t n = 0;
  std::uint64_t samples = 0;
  std::vector<double> qs = {0.5, 1.0, 2.0};
  std::uint64_t master_seed = 0;
  Conditioning cond;
  bool allow_gaussian_conditioning = false;
  std::uint64_t shard_size = 4096;
  bool histogram = false;
  bool capture_trace = false;
  // --- execution-only fields ---
  unsigned workers = 1;  // 0 = hardware concurrency
  std::uint64_t checkpoint_every_shards = 0;  // 0 = only final (if path set)
  std::string checkpoint_path;
  bool resume = false;
  std::string kernel;                   // "" = dispatched default
  std::uint64_t stop_after_shards = 0;  // pause hook for resume tests

  void validate() const;
  std::uint64_t shard_count() const;
};

std::uint64_t fnv1a64(const std::string& s);
std::string canonical_config(const RunConfig& cfg);
std::string config_hash_hex(const RunConfig& cfg);
std::string shape_hash_hex(const RunConfig& cfg);  // dist + n + moment set

struct RunResult {
  RunConfig cfg;
  MomentAccumulator acc;
  std::vector<double> trace;  // |A(n)| per sample index when capture_trace
  bool completed = true;      // false when stop_after_shards paused the run
  std::uint64_t shards_done = 0;
};

// Runs the Monte Carlo over sample indices [0, samples). Work splits into
// shards of shard_size consecutive indices; workers pull shards from an
// atomic queue but the global accumulator merges strictly in shard order, so
// the result is bit-identical for every worker count. Checkpoints serialize
// the merged prefix at shard granularity and are themselves bit-exact to
// resume from.
using ProgressFn = std::function<void(std::uint64_t shards_done,
                                      std::uint64_t shards_total)>;
RunResult run_simulation(const RunConfig& cfg, const ProgressFn& progress = {});

// Running-mean deviation of |A(n)| versus the full-run mean, over sample
// counts S in [from, to] stepping by stride (endpoints always included).
// Requires a trace-capturing completed run; non-finite trace entries raise
// invariant_error.
std::vector<std::pair<std::uint64_t, double>> running_mean_trace(
    const RunResult& r, std::uint64_t from, std::uint64_t to,
    std::uint64_t stride = 1);

// Batch-vs-benchmark absolute deviations of mean|A(n)|, n = 1..N.
struct BatchDeviation {
  std::vector<double> delta;  // index i -> n = i+1
  double mean = 0, max = 0;
  double share_ge_1e3 = 0;  // fraction of n with delta >= 1e-3
};
struct DeviationReport {
  std::uint32_t n = 0;
  std::vector<BatchDeviation> batches;
  double mean = 0, max = 0, share_ge_1e3 = 0;  // pooled over all batches
};
DeviationReport deviation_report(
    const MomentAccumulator& benchmark,
    const std::vector<const MomentAccumulator*>& batches);

}  // namespace mclab
