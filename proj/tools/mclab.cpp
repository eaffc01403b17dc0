// mclab: Monte Carlo laboratory for coefficients of exponentiated random
// power series. Subcommands: simulate, oracle-check, exhaust, condition,
// ratio-campaign, report. Exit codes: 0 success, 1 usage/validation error,
// 2 violated mathematical invariant.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>

#include <CLI11.hpp>

#include "mclab/brute_force.hpp"
#include "mclab/campaign.hpp"
#include "mclab/checkpoint.hpp"
#include "mclab/coeff_engine.hpp"
#include "mclab/experiments.hpp"
#include "mclab/io.hpp"
#include "mclab/philox.hpp"

namespace fs = std::filesystem;
using namespace mclab;

namespace {

bool g_quiet = false;

ProgressFn make_progress(const char* label) {
  if (g_quiet) return {};
  auto last = std::make_shared<std::chrono::steady_clock::time_point>(
      std::chrono::steady_clock::now());
  std::string tag(label);
  return [last, tag](std::uint64_t done, std::uint64_t total) {
    const auto now = std::chrono::steady_clock::now();
    if (done != total && now - *last < std::chrono::seconds(5)) return;
    *last = now;
    std::fprintf(stderr, "[%s] shard %llu/%llu (%.1f%%)%s", tag.c_str(),
                 static_cast<unsigned long long>(done),
                 static_cast<unsigned long long>(total),
                 100.0 * double(done) / double(total),
                 done == total ? "\n" : "\r");
    std::fflush(stderr);
  };
}

std::vector<double> parse_moments(const std::string& text) {
  std::vector<double> qs;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    char* end = nullptr;
    const double q = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !(q > 0))
      throw std::invalid_argument("bad moment exponent '" + tok + "'");
    qs.push_back(q);
  }
  if (qs.empty()) throw std::invalid_argument("empty moment set");
  return qs;
}

fs::path require_dir(const std::string& dir) {
  if (!fs::exists(dir) || !fs::is_directory(dir))
    throw std::invalid_argument("output directory '" + dir +
                                "' does not exist");
  return fs::path(dir);
}

std::string default_out_dir() {
  if (const char* env = std::getenv("MCLAB_OUT")) return env;
  return ".";
}

int cmd_simulate(const RunConfig& cfg_in, const std::string& out_dir,
                 bool plots, std::uint64_t trace_points) {
  RunConfig cfg = cfg_in;
  const fs::path out = require_dir(out_dir);
  if (!cfg.checkpoint_path.empty() || cfg.checkpoint_every_shards || cfg.resume)
    if (cfg.checkpoint_path.empty())
      cfg.checkpoint_path = (out / "checkpoint.json").string();

  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run_simulation(cfg, make_progress("simulate"));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const io::ResultTable table = io::make_result_table(cfg, r.acc);
  io::write_results_csv((out / "results.csv").string(), table);
  std::cout << "config_hash = " << table.config_hash << "\n";
  std::cout << "results = " << (out / "results.csv").string() << "\n";
  if (cfg.histogram) {
    io::write_histogram_csv((out / "histogram_abs.csv").string(),
                            r.acc.hist_abs(), "abs", cfg);
    io::write_histogram_csv((out / "histogram_re.csv").string(),
                            r.acc.hist_re(), "re", cfg);
    io::write_histogram_csv((out / "histogram_im.csv").string(),
                            r.acc.hist_im(), "im", cfg);
    std::cout << "histograms = " << (out / "histogram_{abs,re,im}.csv").string()
              << "\n";
  }
  if (cfg.capture_trace) {
    const std::uint64_t s = cfg.samples;
    const std::uint64_t from = std::max<std::uint64_t>(1, (3 * s) / 4);
    const std::uint64_t stride =
        std::max<std::uint64_t>(1, (s - from) / std::max<std::uint64_t>(
                                                    1, trace_points));
    const auto pts = running_mean_trace(r, from, s, stride);
    io::emit_trace_points((out / "trace.dat").string(), pts,
                          table.config_hash);
    std::cout << "trace = " << (out / "trace.dat").string() << "\n";
  }
  if (plots) {
    io::emit_scaled_curve((out / "scaled_curve.dat").string(), table);
    std::cout << "plot_data = " << (out / "scaled_curve.dat").string() << "\n";
    if (cfg.histogram) {
      io::emit_histogram_points((out / "histogram_abs.dat").string(),
                                r.acc.hist_abs(), table.config_hash);
    }
  }

  std::cout << "samples = " << r.acc.count() << "\n";
  std::cout << "elapsed_s = " << io::format_sig(secs, 4) << "\n";
  std::cout << "samples_per_s = "
            << io::format_sig(double(r.acc.count()) / secs, 4) << "\n";
  std::cout << "quarantined = " << r.acc.quarantined() << "\n";
  if (r.acc.quarantined() != 0)
    std::cerr << "warning: " << r.acc.quarantined()
              << " sample(s) quarantined (non-finite coefficients)\n";
  const std::uint32_t N = cfg.n;
  std::cout << "mean_abs[n=" << N
            << "] = " << io::format_sig(r.acc.mean(0.5, N), 10) << "\n";
  if (N >= 2) {
    std::cout << "scaled_mean[n=" << N
              << "] = " << io::format_sig(scaled_mean(r.acc, N), 10) << " +- "
              << io::format_sig(scaled_stderr(r.acc, N), 3) << "\n";
  }
  for (double q : cfg.qs) {
    if (q == 0.5) continue;
    std::cout << "mean_abs^" << io::format_sig(2 * q, 3) << "[n=" << N
              << "] = " << io::format_sig(r.acc.mean(q, N), 10) << "\n";
  }
  return 0;
}

int cmd_oracle_check(std::uint32_t n, std::uint32_t trials,
                     std::uint64_t seed, std::uint32_t cap, double tol,
                     const std::string& fixture_dir) {
  double worst = 0;
  const Distribution dists[] = {Distribution::ComplexGaussian,
                                Distribution::RealGaussian,
                                Distribution::Rademacher};
  CoefficientEngine engine(n);
  for (Distribution dist : dists) {
    const std::uint64_t dseed =
        splitmix64(seed ^ fnv1a64(std::string("oracle-") + to_string(dist)));
    double dist_worst = 0;
    SampleSequence x;
    for (std::uint32_t t = 0; t < trials; ++t) {
      draw_sequence_into(x, dist, n, SeedSpec{dseed}, t);
      const SeriesView fast = engine.compute(x, n);
      const auto brute = brute_force_coefficients(x, n, cap);
      for (std::uint32_t i = 0; i <= n; ++i) {
        const std::complex<double> f{fast.re[i], fast.im ? fast.im[i] : 0.0};
        const double gap = std::abs(f - brute[i]) / (1.0 + std::abs(brute[i]));
        dist_worst = std::max(dist_worst, gap);
      }
    }
    std::cout << "dist=" << to_string(dist) << " trials=" << trials
              << " n<=" << n << " max_rel_gap=" << io::format_sig(dist_worst, 3)
              << "\n";
    worst = std::max(worst, dist_worst);

    if (!fixture_dir.empty()) {
      const fs::path dir = require_dir(fixture_dir);
      draw_sequence_into(x, dist, n, SeedSpec{dseed}, 0);
      io::write_sequence_fixture(
          (dir / (std::string("seq_") + to_string(dist) + ".csv")).string(),
          x);
      io::write_series_fixture(
          (dir / (std::string("coeffs_") + to_string(dist) + ".csv")).string(),
          brute_force_coefficients(x, n, cap));
    }
  }
  if (worst > tol)
    throw invariant_error("oracle gap " + io::format_sig(worst, 3) +
                          " exceeds " + io::format_sig(tol, 3));
  std::cout << "oracle-check OK (worst gap " << io::format_sig(worst, 3)
            << ")\n";
  return 0;
}

int cmd_exhaust(std::uint32_t n, const std::string& cond_text,
                std::uint32_t symmetry_nmax, std::uint64_t mc_samples,
                std::uint64_t mc_seed, std::uint32_t cap) {
  if (symmetry_nmax > 0) {
    const OddSymmetryReport rep = odd_symmetry_check(symmetry_nmax);
    std::cout << "odd-symmetry n_max=" << rep.n_max
              << " pairs=" << rep.pairs_checked
              << " max_gap=" << io::format_sig(rep.max_gap, 3)
              << " pointwise_trials=" << rep.pointwise_trials
              << " pointwise_failures=" << rep.pointwise_failures << "\n";
    if (!rep.ok())
      throw invariant_error("odd-index symmetry violated (gap " +
                            io::format_sig(rep.max_gap, 3) + ", " +
                            std::to_string(rep.pointwise_failures) +
                            " pointwise failures)");
    std::cout << "odd-symmetry OK\n";
    return 0;
  }
  const Conditioning cond = Conditioning::parse(cond_text);
  const double exact = exact_expectation_pm1(n, cond, cap);
  SignSequenceRange range(n, cond, cap);
  std::cout << "exact_mean_abs[n=" << n << ", cond=" << cond.to_string()
            << "] = " << io::format_sig(exact, 12) << " (over "
            << range.total() << " sequences)\n";
  if (mc_samples > 0) {
    RunConfig cfg;
    cfg.dist = Distribution::Rademacher;
    cfg.n = n;
    cfg.samples = mc_samples;
    cfg.qs = {0.5, 1.0};
    cfg.master_seed = mc_seed;
    cfg.cond = cond;
    const RunResult r = run_simulation(cfg, make_progress("exhaust-mc"));
    const double mc = r.acc.mean(0.5, n);
    const double se = stderr_abs(r.acc, n);
    std::cout << "mc_mean_abs = " << io::format_sig(mc, 12) << " +- "
              << io::format_sig(se, 3) << "  |gap|/se = "
              << io::format_sig(std::fabs(mc - exact) / se, 3) << "\n";
  }
  return 0;
}

int cmd_condition(std::uint32_t n, const std::string& cond_text,
                  const std::string& dist_text, std::uint64_t samples,
                  std::uint64_t seed, unsigned workers,
                  const std::string& kernel) {
  if (distribution_from_string(dist_text) != Distribution::Rademacher)
    throw std::invalid_argument(
        "condition estimates sign-conditional constants; only --dist pm1 is "
        "meaningful here");
  const Conditioning eps = Conditioning::parse(cond_text);
  const Estimate est = conditional_constant(n, eps, samples, seed, workers,
                                            kernel, make_progress("condition"));
  std::cout << "C(" << eps.to_string() << ") at n=" << n << " = "
            << io::format_sig(est.value, 10) << " +- "
            << io::format_sig(est.se, 3) << "\n";
  return 0;
}

int cmd_ratio_campaign(const std::vector<std::uint32_t>& kset, std::uint32_t n,
                       std::uint64_t samples, std::uint64_t seed,
                       unsigned workers, const std::string& kernel,
                       const std::string& dir) {
  CampaignCache cache(dir);
  const RatioTable t = ratio_campaign(kset, n, samples, seed, workers, cache,
                                      kernel, make_progress("campaign"));
  std::cout << render_ratio_table(t);
  const Verdict v = product_structure_verdict({t});
  std::cout << render_verdict(v);
  std::cout << "campaign_dir = " << cache.dir().string()
            << " (runs executed " << cache.runs_executed() << ", cache hits "
            << cache.cache_hits() << ")\n";
  return 0;
}

int cmd_report(const std::string& results, const std::string& benchmark,
               const std::vector<std::string>& batches,
               const std::string& campaign_dir, const std::string& plot_dir) {
  if (!results.empty()) {
    const io::ResultTable t = io::parse_results_csv(results);
    std::cout << "results " << results << ": dist=" << t.dist << " n=" << t.n
              << " samples=" << t.samples << " seed=" << t.master_seed
              << " cond=" << t.cond << " quarantined=" << t.quarantined
              << " config_hash=" << t.config_hash << "\n";
    std::uint32_t last_printed = 0;
    for (std::uint32_t n : {1u, 2u, 5u, 10u, 100u, 1000u, 10000u}) {
      if (n > t.n) break;
      const io::ResultRow& r = t.row(n);
      std::cout << "  n=" << n << " mean_abs=" << io::format_sig(r.mean_abs, 10)
                << " scaled=" << io::format_sig(r.scaled_mean, 10)
                << " mean_sq=" << io::format_sig(r.mean_sq, 10) << "\n";
      last_printed = n;
    }
    if (t.n != last_printed) {
      const io::ResultRow& r = t.row(t.n);
      std::cout << "  n=" << t.n << " mean_abs="
                << io::format_sig(r.mean_abs, 10)
                << " scaled=" << io::format_sig(r.scaled_mean, 10)
                << " mean_sq=" << io::format_sig(r.mean_sq, 10) << "\n";
    }
    if (!plot_dir.empty()) {
      const fs::path dir = require_dir(plot_dir);
      io::emit_scaled_curve((dir / "scaled_curve.dat").string(), t);
      std::cout << "plot_data = " << (dir / "scaled_curve.dat").string()
                << "\n";
    }
  }
  if (!benchmark.empty()) {
    if (batches.empty())
      throw std::invalid_argument("--benchmark needs --batches");
    const io::ResultTable bench = io::parse_results_csv(benchmark);
    std::vector<io::ResultTable> bt;
    for (const auto& f : batches) bt.push_back(io::parse_results_csv(f));
    std::vector<const io::ResultTable*> ptrs;
    for (const auto& t : bt) ptrs.push_back(&t);
    const DeviationReport rep = io::deviation_report_from_tables(bench, ptrs);
    std::cout << "deviation report: benchmark " << benchmark << " vs "
              << batches.size() << " batch(es), n=" << rep.n << "\n";
    for (std::size_t b = 0; b < rep.batches.size(); ++b) {
      const auto& bd = rep.batches[b];
      std::cout << "  batch " << (b + 1) << ": mean_delta="
                << io::format_sig(bd.mean, 4)
                << " max_delta=" << io::format_sig(bd.max, 4)
                << " share>=1e-3=" << io::format_sig(bd.share_ge_1e3, 4)
                << "\n";
    }
    std::cout << "  pooled: mean_delta=" << io::format_sig(rep.mean, 4)
              << " max_delta=" << io::format_sig(rep.max, 4)
              << " share>=1e-3=" << io::format_sig(rep.share_ge_1e3, 4) << "\n";
    if (!plot_dir.empty()) {
      const fs::path dir = require_dir(plot_dir);
      io::emit_delta_overlay((dir / "delta_overlay.dat").string(), rep,
                             bench.config_hash);
      std::cout << "plot_data = " << (dir / "delta_overlay.dat").string()
                << "\n";
    }
  }
  if (!campaign_dir.empty()) {
    std::vector<RatioTable> tables;
    for (const auto& e : fs::directory_iterator(campaign_dir)) {
      const std::string name = e.path().filename().string();
      if (name.rfind("ratio", 0) == 0 && e.path().extension() == ".json")
        tables.push_back(parse_ratio_json(e.path()));
    }
    if (tables.empty())
      throw std::invalid_argument("no ratio_*.json files in " + campaign_dir);
    for (const RatioTable& t : tables) std::cout << render_ratio_table(t);
    std::cout << render_verdict(product_structure_verdict(tables));
  }
  if (results.empty() && benchmark.empty() && campaign_dir.empty())
    throw std::invalid_argument(
        "report needs --results, --benchmark/--batches, or --campaign");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mclab: Monte Carlo study of coefficients A(n) of "
      "exp(sum_k x(k)/sqrt(k) z^k) under random sign/Gaussian inputs"};
  app.require_subcommand(1);
  app.add_flag("--quiet", g_quiet, "suppress progress output");

  // ---- simulate ----
  RunConfig cfg;
  std::string dist_text = "complex", moments_text = "0.5,1,2", cond_text;
  std::string out_dir = default_out_dir();
  bool plots = false;
  std::uint64_t trace_points = 2000;
  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo estimate");
  sim->add_option("--dist", dist_text, "complex|real|pm1");
  sim->add_option("--n", cfg.n, "coefficient order")->required();
  sim->add_option("--samples", cfg.samples, "sample count")->required();
  sim->add_option("--seed", cfg.master_seed, "master seed");
  sim->add_option("--moments", moments_text, "exponents q (|A|^{2q})");
  sim->add_option("--cond", cond_text, "conditioning, e.g. 2:+1,4:-1");
  sim->add_flag("--allow-gaussian-cond", cfg.allow_gaussian_conditioning,
                "permit sign conditioning on Gaussian draws");
  sim->add_option("--workers", cfg.workers, "worker threads (0 = all)");
  sim->add_option("--shard-size", cfg.shard_size, "samples per shard");
  sim->add_option("--kernel", cfg.kernel, "scalar|avx2|avx512|neon");
  sim->add_option("--out", out_dir, "output directory (default $MCLAB_OUT or .)");
  sim->add_flag("--histogram", cfg.histogram, "collect |A|, Re, Im histograms");
  sim->add_flag("--trace", cfg.capture_trace, "capture |A(n)| per sample");
  sim->add_option("--trace-points", trace_points, "points in trace.dat");
  sim->add_option("--checkpoint-every", cfg.checkpoint_every_shards,
                  "checkpoint interval in shards (0 = only final)");
  sim->add_option("--checkpoint-path", cfg.checkpoint_path,
                  "checkpoint file (default <out>/checkpoint.json)");
  sim->add_flag("--resume", cfg.resume, "resume from checkpoint");
  sim->add_flag("--plot", plots, "emit gnuplot data files");

  // ---- oracle-check ----
  std::uint32_t on = 20, otrials = 100, ocap = caps::brute_force_order;
  std::uint64_t oseed = 42;
  double otol = 1e-10;
  std::string fixture_dir;
  auto* ora = app.add_subcommand(
      "oracle-check", "fast engine vs exponential partition-sum oracle");
  ora->add_option("--n", on, "max order (<= cap)");
  ora->add_option("--trials", otrials, "random sequences per distribution");
  ora->add_option("--seed", oseed, "seed");
  ora->add_option("--cap", ocap, "oracle order cap");
  ora->add_option("--tol", otol, "max allowed relative gap (exit 2 beyond)");
  ora->add_option("--emit-fixtures", fixture_dir,
                  "write sequence/series fixture CSVs here");

  // ---- exhaust ----
  std::uint32_t xn = 0, symmetry_nmax = 0, xcap = caps::exhaustive_free_indices;
  std::uint64_t mc_samples = 0, mc_seed = 1;
  std::string xcond;
  auto* exh = app.add_subcommand(
      "exhaust", "exact Rademacher expectations by full enumeration");
  exh->add_option("--n", xn, "order");
  exh->add_option("--cond", xcond, "conditioning, e.g. 2:+1");
  exh->add_option("--symmetry-nmax", symmetry_nmax,
                  "verify odd-index symmetry for all n <= this");
  exh->add_option("--mc-samples", mc_samples,
                  "also cross-check against a Monte Carlo run");
  exh->add_option("--mc-seed", mc_seed, "seed for the cross-check run");
  exh->add_option("--cap", xcap, "free-index cap");

  // ---- condition ----
  std::uint32_t cn = 0;
  std::uint64_t csamples = 0, cseed = 0;
  unsigned cworkers = 1;
  std::string ccond, ckernel, cdist = "pm1";
  auto* con = app.add_subcommand(
      "condition", "scaled conditional constant under even-index signs");
  con->add_option("--n", cn, "order")->required();
  con->add_option("--samples", csamples, "sample count")->required();
  con->add_option("--cond", ccond, "even-index signs, e.g. 2:+1,4:-1")
      ->required();
  con->add_option("--dist", cdist, "input law (pm1 only)");
  con->add_option("--seed", cseed, "master seed");
  con->add_option("--workers", cworkers, "worker threads (0 = all)");
  con->add_option("--kernel", ckernel, "kernel variant");

  // ---- ratio-campaign ----
  std::vector<std::uint32_t> kset;
  std::uint32_t rn = 0;
  std::uint64_t rsamples = 0, rseed = 0;
  unsigned rworkers = 1;
  std::string rkernel, rdir;
  auto* rat = app.add_subcommand(
      "ratio-campaign", "product-structure ratio table over a sign grid");
  rat->add_option("--kset", kset, "even indices, e.g. --kset 2 4")->required();
  rat->add_option("--n", rn, "order")->required();
  rat->add_option("--samples", rsamples, "samples per constituent run")
      ->required();
  rat->add_option("--seed", rseed, "campaign seed");
  rat->add_option("--workers", rworkers, "worker threads (0 = all)");
  rat->add_option("--kernel", rkernel, "kernel variant");
  rat->add_option("--dir", rdir, "campaign cache directory")->required();

  // ---- report ----
  std::string rep_results, rep_benchmark, rep_campaign, rep_plot_dir;
  std::vector<std::string> rep_batches;
  auto* rep = app.add_subcommand("report",
                                 "render tables/plots from output files");
  rep->add_option("--results", rep_results, "results CSV to summarize");
  rep->add_option("--benchmark", rep_benchmark,
                  "benchmark results CSV for a deviation report");
  rep->add_option("--batches", rep_batches, "batch results CSVs");
  rep->add_option("--campaign", rep_campaign, "campaign directory");
  rep->add_option("--plot-dir", rep_plot_dir, "emit gnuplot data here");

  for (CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; }))
    s->fallthrough();

  try {
    app.parse(argc, argv);
    if (*sim) {
      cfg.dist = distribution_from_string(dist_text);
      cfg.qs = parse_moments(moments_text);
      cfg.cond = Conditioning::parse(cond_text);
      return cmd_simulate(cfg, out_dir, plots, trace_points);
    }
    if (*ora)
      return cmd_oracle_check(on, otrials, oseed, ocap, otol, fixture_dir);
    if (*exh) {
      if (symmetry_nmax == 0 && xn == 0)
        throw std::invalid_argument("exhaust needs --n or --symmetry-nmax");
      return cmd_exhaust(xn, xcond, symmetry_nmax, mc_samples, mc_seed, xcap);
    }
    if (*con)
      return cmd_condition(cn, ccond, cdist, csamples, cseed, cworkers,
                           ckernel);
    if (*rat)
      return cmd_ratio_campaign(kset, rn, rsamples, rseed, rworkers, rkernel,
                                rdir);
    if (*rep)
      return cmd_report(rep_results, rep_benchmark, rep_batches, rep_campaign,
                        rep_plot_dir);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const invariant_error& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
