#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "mclab/checkpoint.hpp"
#include "mclab/coeff_engine.hpp"
#include "mclab/montecarlo.hpp"

using namespace mclab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static int counter = 0;
  fs::path p = fs::temp_directory_path() /
               ("mclab_mc_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
  fs::create_directories(p);
  return p;
}

RunConfig small_config() {
  RunConfig cfg;
  cfg.dist = Distribution::RealGaussian;
  cfg.n = 30;
  cfg.samples = 20000;
  cfg.master_seed = 314159;
  cfg.shard_size = 256;
  return cfg;
}

void check_bitwise_equal(const MomentAccumulator& a,
                         const MomentAccumulator& b) {
  REQUIRE(a.same_shape(b));
  CHECK(a.count() == b.count());
  CHECK(a.quarantined() == b.quarantined());
  for (std::size_t qi = 0; qi < a.qs().size(); ++qi) {
    bool sums_equal = a.sums(qi) == b.sums(qi);
    bool comps_equal = a.comps(qi) == b.comps(qi);
    CHECK(sums_equal);
    CHECK(comps_equal);
  }
}

}  // namespace

TEST_CASE("config hash covers logical fields and ignores execution fields") {
  RunConfig cfg = small_config();
  const std::string base = config_hash_hex(cfg);
  CHECK(base.size() == 16);

  RunConfig exec = cfg;
  exec.workers = 16;
  exec.checkpoint_every_shards = 3;
  exec.checkpoint_path = "/tmp/somewhere.json";
  exec.kernel = "scalar";
  exec.stop_after_shards = 5;
  exec.capture_trace = true;
  CHECK(config_hash_hex(exec) == base);

  RunConfig changed = cfg;
  changed.n = 31;
  CHECK(config_hash_hex(changed) != base);
  changed = cfg;
  changed.master_seed += 1;
  CHECK(config_hash_hex(changed) != base);
  changed = cfg;
  changed.samples += 1;
  CHECK(config_hash_hex(changed) != base);
  changed = cfg;
  changed.dist = Distribution::Rademacher;
  CHECK(config_hash_hex(changed) != base);
  changed = cfg;
  changed.shard_size = 512;
  CHECK(config_hash_hex(changed) != base);
  changed = cfg;
  changed.qs = {1.0};
  CHECK(config_hash_hex(changed) != base);
  changed = cfg;
  changed.cond.set(2, -1);
  changed.dist = Distribution::Rademacher;
  CHECK(config_hash_hex(changed) !=
        config_hash_hex([&] {
          RunConfig c = cfg;
          c.dist = Distribution::Rademacher;
          return c;
        }()));

  // The canonical string is the documented authority for what is hashed.
  CHECK(canonical_config(cfg).find("seed=314159") != std::string::npos);
  CHECK(canonical_config(cfg).find("workers") == std::string::npos);
}

TEST_CASE("shape hash tracks dist, n, and moment set only") {
  RunConfig cfg = small_config();
  const std::string base = shape_hash_hex(cfg);

  RunConfig other = cfg;
  other.master_seed = 1;
  other.samples = 5;
  other.shard_size = 1;
  CHECK(shape_hash_hex(other) == base);

  other = cfg;
  other.dist = Distribution::ComplexGaussian;
  CHECK(shape_hash_hex(other) != base);
  other = cfg;
  other.n += 1;
  CHECK(shape_hash_hex(other) != base);
  other = cfg;
  other.qs = {0.5};
  CHECK(shape_hash_hex(other) != base);
}

TEST_CASE("a one-sample run equals a direct engine evaluation bitwise") {
  for (Distribution dist : {Distribution::ComplexGaussian,
                            Distribution::RealGaussian,
                            Distribution::Rademacher}) {
    CAPTURE(to_string(dist));
    RunConfig cfg;
    cfg.dist = dist;
    cfg.n = 20;
    cfg.samples = 1;
    cfg.master_seed = 99;
    const RunResult r = run_simulation(cfg);
    REQUIRE(r.completed);
    REQUIRE(r.acc.count() == 1);

    CoefficientEngine engine(cfg.n);
    const auto x = draw_sequence(dist, cfg.n, SeedSpec{99}, 0);
    const SeriesView v = engine.compute(x, cfg.n);
    for (std::uint32_t i = 0; i <= cfg.n; ++i) {
      const double re = v.re[i];
      const double im = v.im ? v.im[i] : 0.0;
      const double r2 = re * re + im * im;
      CHECK(r.acc.moment_sum(r.acc.q_index(1.0), i) == r2);
      CHECK(r.acc.moment_sum(r.acc.q_index(2.0), i) == r2 * r2);
      CHECK(r.acc.moment_sum(r.acc.q_index(0.5), i) == std::sqrt(r2));
    }
  }
}

TEST_CASE("results are bit-identical for every worker count") {
  RunConfig cfg = small_config();
  cfg.workers = 1;
  const RunResult one = run_simulation(cfg);
  REQUIRE(one.completed);
  REQUIRE(one.acc.count() == cfg.samples);
  REQUIRE(one.acc.quarantined() == 0);

  cfg.workers = 4;
  const RunResult four = run_simulation(cfg);
  cfg.workers = 16;
  const RunResult sixteen = run_simulation(cfg);

  check_bitwise_equal(one.acc, four.acc);
  check_bitwise_equal(one.acc, sixteen.acc);
}

TEST_CASE("an interrupted and resumed run is bit-identical to one pass") {
  const fs::path dir = temp_dir();
  const std::string ck = (dir / "checkpoint.json").string();

  RunConfig cfg = small_config();
  cfg.workers = 4;

  const RunResult whole = run_simulation(cfg);

  RunConfig part = cfg;
  part.checkpoint_path = ck;
  part.stop_after_shards = 37;
  const RunResult paused = run_simulation(part);
  CHECK(!paused.completed);
  CHECK(paused.shards_done == 37);
  CHECK(paused.acc.count() == 37 * cfg.shard_size);
  REQUIRE(fs::exists(ck));

  RunConfig rest = cfg;
  rest.checkpoint_path = ck;
  rest.resume = true;
  const RunResult finished = run_simulation(rest);
  CHECK(finished.completed);
  CHECK(finished.shards_done == cfg.shard_count());

  check_bitwise_equal(whole.acc, finished.acc);
  fs::remove_all(dir);
}

TEST_CASE("periodic checkpoints describe clean prefixes and resume exactly") {
  const fs::path dir = temp_dir();
  const std::string ck = (dir / "every3.json").string();

  RunConfig cfg = small_config();
  cfg.samples = 4000;  // 16 shards of 256
  cfg.checkpoint_path = ck;
  cfg.checkpoint_every_shards = 3;
  cfg.stop_after_shards = 7;
  const RunResult paused = run_simulation(cfg);
  CHECK(paused.shards_done == 7);

  const CheckpointData data = load_checkpoint(ck, cfg);
  CHECK(data.shards_done == 7);
  CHECK(data.acc.count() == 7 * 256);
  check_bitwise_equal(paused.acc, data.acc);
  fs::remove_all(dir);
}

TEST_CASE("a checkpoint refuses to resume a different run") {
  const fs::path dir = temp_dir();
  const std::string ck = (dir / "mismatch.json").string();

  RunConfig cfg = small_config();
  cfg.checkpoint_path = ck;
  cfg.stop_after_shards = 5;
  run_simulation(cfg);

  RunConfig tampered = cfg;
  tampered.resume = true;
  tampered.stop_after_shards = 0;
  tampered.master_seed += 1;  // different run, same file
  CHECK_THROWS_AS(run_simulation(tampered), std::invalid_argument);

  CHECK_THROWS_AS(load_checkpoint((dir / "absent.json").string(), cfg),
                  std::invalid_argument);
  fs::remove_all(dir);
}

TEST_CASE("trace capture records |A(n)| per sample index") {
  RunConfig cfg;
  cfg.dist = Distribution::ComplexGaussian;
  cfg.n = 10;
  cfg.samples = 1000;
  cfg.master_seed = 2718;
  cfg.shard_size = 128;
  cfg.capture_trace = true;
  cfg.workers = 4;
  const RunResult r = run_simulation(cfg);
  REQUIRE(r.completed);
  REQUIRE(r.trace.size() == 1000);

  CoefficientEngine engine(cfg.n);
  for (std::uint64_t idx : {std::uint64_t(0), std::uint64_t(555),
                            std::uint64_t(999)}) {
    const auto x = draw_sequence(cfg.dist, cfg.n, SeedSpec{cfg.master_seed},
                                 idx);
    const SeriesView v = engine.compute(x, cfg.n);
    const double expect =
        std::sqrt(v.re[cfg.n] * v.re[cfg.n] + v.im[cfg.n] * v.im[cfg.n]);
    CHECK(r.trace[idx] == expect);
  }

  // Endpoints are always included; the final deviation is exactly zero
  // because the full-run mean is computed by the same compensated sum.
  const auto pts = running_mean_trace(r, 750, 1000, 50);
  REQUIRE(pts.size() == 6);
  CHECK(pts.front().first == 750);
  CHECK(pts.back().first == 1000);
  CHECK(pts.back().second == 0.0);
}

TEST_CASE("running-mean deviations on a crafted trace") {
  RunResult r;
  r.cfg.samples = 4;
  r.completed = true;
  r.trace = {1.0, 2.0, 3.0, 4.0};
  // Full mean 2.5; running means 1, 1.5, 2, 2.5.
  const auto pts = running_mean_trace(r, 1, 4);
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].second == -1.5);
  CHECK(pts[1].second == -1.0);
  CHECK(pts[2].second == -0.5);
  CHECK(pts[3].second == 0.0);

  r.trace = {7.0, 7.0, 7.0, 7.0};
  for (const auto& [s, d] : running_mean_trace(r, 1, 4)) {
    (void)s;
    CHECK(d == 0.0);
  }

  r.trace[2] = std::nan("");
  CHECK_THROWS_AS(running_mean_trace(r, 1, 4), invariant_error);

  r.trace = {1.0, 2.0, 3.0, 4.0};
  CHECK_THROWS_AS(running_mean_trace(r, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS(running_mean_trace(r, 1, 5), std::invalid_argument);
  CHECK_THROWS_AS(running_mean_trace(r, 1, 4, 0), std::invalid_argument);
  r.completed = false;
  CHECK_THROWS_AS(running_mean_trace(r, 1, 4), std::invalid_argument);
}

TEST_CASE("deviation report of a run against itself is identically zero") {
  RunConfig cfg = small_config();
  cfg.samples = 2000;
  const RunResult r = run_simulation(cfg);
  const std::vector<const MomentAccumulator*> batches = {&r.acc, &r.acc};
  const DeviationReport rep = deviation_report(r.acc, batches);
  REQUIRE(rep.batches.size() == 2);
  CHECK(rep.n == cfg.n);
  CHECK(rep.mean == 0.0);
  CHECK(rep.max == 0.0);
  CHECK(rep.share_ge_1e3 == 0.0);
  for (const auto& b : rep.batches)
    for (double d : b.delta) CHECK(d == 0.0);

  // Different seeds genuinely differ.
  RunConfig other = cfg;
  other.master_seed += 1;
  const RunResult r2 = run_simulation(other);
  const DeviationReport rep2 = deviation_report(r.acc, {&r2.acc});
  CHECK(rep2.max > 0.0);

  MomentAccumulator wrong_shape(cfg.n + 1, cfg.qs);
  CHECK_THROWS_AS(deviation_report(r.acc, {&wrong_shape}),
                  std::invalid_argument);
  CHECK_THROWS_AS(deviation_report(r.acc, {}), std::invalid_argument);
}

TEST_CASE("config validation rejects inconsistent requests") {
  RunConfig cfg = small_config();
  cfg.samples = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.shard_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.resume = true;
  cfg.checkpoint_path = "x.json";
  cfg.capture_trace = true;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.resume = true;  // no checkpoint path
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.kernel = "avx1024";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.kernel = "scalar";
  CHECK_NOTHROW(cfg.validate());

  cfg = small_config();  // RealGaussian
  cfg.cond.set(2, +1);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.allow_gaussian_conditioning = true;
  CHECK_NOTHROW(cfg.validate());

  cfg = small_config();
  cfg.dist = Distribution::Rademacher;
  cfg.cond.set(cfg.n + 1, +1);  // beyond the sequence
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = small_config();
  cfg.n = 1;
  cfg.histogram = true;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("conditioned runs pin the requested coordinates") {
  RunConfig cfg;
  cfg.dist = Distribution::Rademacher;
  cfg.n = 12;
  cfg.samples = 512;
  cfg.master_seed = 5;
  cfg.cond = Conditioning::parse("2:+1,4:-1");
  const RunResult r = run_simulation(cfg);
  CHECK(r.acc.count() == 512);
  // Spot-check the first sample the run would have drawn.
  const auto x = draw_sequence(cfg.dist, cfg.n, SeedSpec{5}, 0, cfg.cond);
  CHECK(x.value(2).real() == 1.0);
  CHECK(x.value(4).real() == -1.0);
}
