#pragma once

#include <complex>
#include <string>
#include <vector>

#include "mclab/montecarlo.hpp"

namespace mclab::io {

// %.{sig}g formatting; 10 significant digits for result tables, 17 for
// fixtures (17 round-trips doubles exactly; 10-digit output re-parses and
// re-prints to the identical string, which is the stability the CSV
// round-trip tests pin down).
std::string format_sig(double v, int sig_digits);

struct ResultRow {
  std::uint32_t n = 0;
  double mean_abs = 0, scaled_mean = 0, mean_sq = 0, mean_fourth = 0,
         stderr_abs = 0;
  std::uint64_t sample_count = 0;
};

struct ResultTable {
  std::string config_hash;  // 16 hex chars, echoed in the file header
  std::string shape_hash;
  std::string dist;
  std::uint32_t n = 0;
  std::uint64_t samples = 0;
  std::uint64_t master_seed = 0;
  std::string cond;
  std::uint64_t quarantined = 0;
  std::vector<ResultRow> rows;  // n = 1..N in order

  const ResultRow& row(std::uint32_t n) const;
};

ResultTable make_result_table(const RunConfig& cfg,
                              const MomentAccumulator& acc);
void write_results_csv(const std::string& path, const ResultTable& t);
ResultTable parse_results_csv(const std::string& path);

struct HistogramFile {
  std::string config_hash;
  std::string kind;  // "abs" | "re" | "im"
  Histogram hist;
};
void write_histogram_csv(const std::string& path, const Histogram& h,
                         const std::string& kind, const RunConfig& cfg);
HistogramFile parse_histogram_csv(const std::string& path);

// Oracle fixtures: an input sequence (k, re_x, im_x) and its coefficient
// series (n, re_A, im_A) at 17 significant digits.
void write_sequence_fixture(const std::string& path, const SampleSequence& x);
SampleSequence parse_sequence_fixture(const std::string& path);
void write_series_fixture(const std::string& path,
                          const std::vector<std::complex<double>>& a);
std::vector<std::complex<double>> parse_series_fixture(const std::string& path);

// Deviation report computed from result files instead of live accumulators.
// All tables must carry the same shape_hash (same distribution, order, and
// moment set); each batch must have a config_hash distinct from the benchmark
// and from every other batch, since a shared hash means a shared seed and the
// comparison would be vacuous.
DeviationReport deviation_report_from_tables(
    const ResultTable& benchmark, const std::vector<const ResultTable*>& batches);

// gnuplot-ready whitespace-separated data files ("plot 'f' using 1:2").
void emit_scaled_curve(const std::string& path, const ResultTable& t);
void emit_trace_points(
    const std::string& path,
    const std::vector<std::pair<std::uint64_t, double>>& pts,
    const std::string& config_hash = "");
void emit_delta_overlay(const std::string& path, const DeviationReport& rep,
                        const std::string& benchmark_hash = "");
void emit_histogram_points(const std::string& path, const Histogram& h,
                           const std::string& config_hash = "");

}  // namespace mclab::io
