#include "mclab/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mclab/checkpoint.hpp"
#include "mclab/coeff_engine.hpp"

namespace mclab {

void RunConfig::validate() const {
  if (samples == 0) throw std::invalid_argument("samples must be >= 1");
  if (shard_size == 0) throw std::invalid_argument("shard size must be >= 1");
  cond.require_within(n);
  if (!cond.empty() && dist != Distribution::Rademacher &&
      !allow_gaussian_conditioning)
    throw std::invalid_argument(
        "sign conditioning on a Gaussian distribution requires the explicit "
        "allow flag");
  if (histogram && n < 2)
    throw std::invalid_argument("histograms need n >= 2");
  if (resume && capture_trace)
    throw std::invalid_argument(
        "trace capture does not survive resume (traces are not checkpointed)");
  if (resume && checkpoint_path.empty())
    throw std::invalid_argument("resume needs a checkpoint path");
  if (!kernel.empty() && kernels::find(kernel) == nullptr)
    throw std::invalid_argument("kernel variant '" + kernel +
                                "' is not available on this machine");
}

std::uint64_t RunConfig::shard_count() const {
  return (samples + shard_size - 1) / shard_size;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {
std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string qs_string(const std::vector<double>& qs) {
  std::string s;
  for (double q : qs) {
    if (!s.empty()) s += ',';
    s += fmt_double(q);
  }
  return s;
}
std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

std::string canonical_config(const RunConfig& cfg) {
  std::string s = "dist=";
  s += to_string(cfg.dist);
  s += ";n=" + std::to_string(cfg.n);
  s += ";samples=" + std::to_string(cfg.samples);
  s += ";qs=" + qs_string(cfg.qs);
  s += ";seed=" + std::to_string(cfg.master_seed);
  s += ";cond=" + cfg.cond.to_string();
  s += ";shard=" + std::to_string(cfg.shard_size);
  s += ";hist=" + std::to_string(cfg.histogram ? 1 : 0);
  return s;
}

std::string config_hash_hex(const RunConfig& cfg) {
  return hex64(fnv1a64(canonical_config(cfg)));
}

std::string shape_hash_hex(const RunConfig& cfg) {
  std::string s = "dist=";
  s += to_string(cfg.dist);
  s += ";n=" + std::to_string(cfg.n);
  s += ";qs=" + qs_string(cfg.qs);
  return hex64(fnv1a64(s));
}

namespace {

// Merges shard accumulators strictly in shard-index order. Out-of-order
// arrivals park in `pending` until the gap closes. Checkpoints happen at
// merge time, so a checkpoint always describes a clean prefix [0, front).
class OrderedMerger {
 public:
  OrderedMerger(MomentAccumulator& global, std::uint64_t front,
                std::uint64_t total, const RunConfig& cfg,
                const ProgressFn& progress)
      : global_(global),
        front_(front),
        total_(total),
        cfg_(cfg),
        progress_(progress) {}

  void submit(std::uint64_t idx, MomentAccumulator&& acc) {
    std::lock_guard<std::mutex> lock(mu_);
    pending_.emplace(idx, std::move(acc));
    while (!pending_.empty() && pending_.begin()->first == front_) {
      global_.merge(pending_.begin()->second);
      pending_.erase(pending_.begin());
      ++front_;
      if (cfg_.checkpoint_every_shards != 0 && !cfg_.checkpoint_path.empty() &&
          front_ % cfg_.checkpoint_every_shards == 0 && front_ < total_)
        save_checkpoint(cfg_.checkpoint_path, cfg_, front_, global_);
      if (progress_) progress_(front_, total_);
    }
  }

  std::uint64_t front() const { return front_; }
  bool drained() const { return pending_.empty(); }

 private:
  std::mutex mu_;
  std::map<std::uint64_t, MomentAccumulator> pending_;
  MomentAccumulator& global_;
  std::uint64_t front_;
  std::uint64_t total_;
  const RunConfig& cfg_;
  const ProgressFn& progress_;
};

}  // namespace

RunResult run_simulation(const RunConfig& cfg, const ProgressFn& progress) {
  cfg.validate();

  const std::uint64_t shards_total = cfg.shard_count();
  std::uint64_t first_shard = 0;

  RunResult result;
  result.cfg = cfg;
  result.acc = MomentAccumulator(cfg.n, cfg.qs, cfg.histogram);

  if (cfg.resume) {
    CheckpointData ck = load_checkpoint(cfg.checkpoint_path, cfg);
    first_shard = ck.shards_done;
    result.acc = std::move(ck.acc);
  }
  if (cfg.capture_trace)
    result.trace.assign(cfg.samples,
                        std::numeric_limits<double>::quiet_NaN());

  const std::uint64_t stop_shard =
      cfg.stop_after_shards == 0
          ? shards_total
          : std::min(shards_total, first_shard + cfg.stop_after_shards);

  unsigned workers = cfg.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());

  const kernels::Ops* ops =
      cfg.kernel.empty() ? &kernels::active() : kernels::find(cfg.kernel);

  OrderedMerger merger(result.acc, first_shard, stop_shard, cfg, progress);
  std::atomic<std::uint64_t> next_shard{first_shard};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto worker_fn = [&]() {
    try {
      CoefficientEngine engine(cfg.n, ops);
      SampleSequence seq(cfg.dist, cfg.n);
      MomentAccumulator shard_acc(cfg.n, cfg.qs, cfg.histogram);
      for (;;) {
        const std::uint64_t shard = next_shard.fetch_add(1);
        if (shard >= stop_shard) break;
        const std::uint64_t lo = shard * cfg.shard_size;
        const std::uint64_t hi = std::min(cfg.samples, lo + cfg.shard_size);
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
          draw_sequence_into(seq, cfg.dist, cfg.n, SeedSpec{cfg.master_seed},
                             idx, cfg.cond, cfg.allow_gaussian_conditioning);
          const SeriesView v = engine.compute(seq, cfg.n);
          shard_acc.absorb(v);
          if (cfg.capture_trace) {
            const double re = v.re[cfg.n];
            const double im = v.im ? v.im[cfg.n] : 0.0;
            result.trace[idx] = std::sqrt(re * re + im * im);
          }
        }
        merger.submit(shard, std::move(shard_acc));
        shard_acc = MomentAccumulator(cfg.n, cfg.qs, cfg.histogram);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mu);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (workers == 1) {
    worker_fn();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  if (!merger.drained() || merger.front() != stop_shard)
    throw invariant_error("shard merge did not drain to the stop boundary");

  result.shards_done = stop_shard;
  result.completed = stop_shard == shards_total;
  if (!cfg.checkpoint_path.empty())
    save_checkpoint(cfg.checkpoint_path, cfg, stop_shard, result.acc);
  return result;
}

std::vector<std::pair<std::uint64_t, double>> running_mean_trace(
    const RunResult& r, std::uint64_t from, std::uint64_t to,
    std::uint64_t stride) {
  if (!r.completed) throw std::invalid_argument("run is incomplete");
  if (r.trace.size() != r.cfg.samples)
    throw std::invalid_argument("run did not capture a trace");
  if (from < 1 || to < from || to > r.cfg.samples || stride == 0)
    throw std::invalid_argument("bad trace window");

  double sum = 0, comp = 0;
  for (double v : r.trace) {
    if (!std::isfinite(v))
      throw invariant_error("non-finite trace entry (quarantined sample)");
    neumaier_add(sum, comp, v);
  }
  const double final_mean = (sum + comp) / double(r.cfg.samples);

  std::vector<std::pair<std::uint64_t, double>> out;
  sum = comp = 0;
  std::uint64_t s = 0;
  for (std::uint64_t i = 0; i < to; ++i) {
    neumaier_add(sum, comp, r.trace[i]);
    s = i + 1;
    if (s < from) continue;
    if ((s - from) % stride == 0 || s == to)
      out.emplace_back(s, (sum + comp) / double(s) - final_mean);
  }
  return out;
}

DeviationReport deviation_report(
    const MomentAccumulator& benchmark,
    const std::vector<const MomentAccumulator*>& batches) {
  if (batches.empty()) throw std::invalid_argument("no batches");
  DeviationReport rep;
  rep.n = benchmark.n();
  if (rep.n < 1) throw std::invalid_argument("need n >= 1");
  double pooled_sum = 0;
  std::uint64_t pooled_cnt = 0, pooled_ge = 0;
  for (const MomentAccumulator* b : batches) {
    if (!b->same_shape(benchmark))
      throw std::invalid_argument("batch shape differs from benchmark");
    BatchDeviation bd;
    bd.delta.resize(rep.n);
    std::uint64_t ge = 0;
    for (std::uint32_t n = 1; n <= rep.n; ++n) {
      const double d = std::fabs(benchmark.mean(0.5, n) - b->mean(0.5, n));
      bd.delta[n - 1] = d;
      bd.mean += d;
      bd.max = std::max(bd.max, d);
      if (d >= 1e-3) ++ge;
    }
    bd.mean /= double(rep.n);
    bd.share_ge_1e3 = double(ge) / double(rep.n);
    pooled_sum += bd.mean * rep.n;
    pooled_cnt += rep.n;
    pooled_ge += ge;
    rep.max = std::max(rep.max, bd.max);
    rep.batches.push_back(std::move(bd));
  }
  rep.mean = pooled_sum / double(pooled_cnt);
  rep.share_ge_1e3 = double(pooled_ge) / double(pooled_cnt);
  return rep;
}

}  // namespace mclab
