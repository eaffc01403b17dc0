#include "mclab/io.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mclab::io {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return in;
}

// Header comment lines: "# key=value" (value may be empty). The first line
// names the format.
std::map<std::string, std::string> read_header(std::ifstream& in,
                                               const std::string& format,
                                               std::string& first_data_line) {
  std::map<std::string, std::string> kv;
  std::string line;
  bool format_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] != '#') {
      first_data_line = line;
      break;
    }
    std::string body = line.substr(1);
    if (!body.empty() && body[0] == ' ') body.erase(0, 1);
    if (!format_seen) {
      if (body != format)
        throw std::invalid_argument("expected '" + format + "' file, got '" +
                                    body + "'");
      format_seen = true;
      continue;
    }
    const auto eq = body.find('=');
    if (eq != std::string::npos)
      kv[body.substr(0, eq)] = body.substr(eq + 1);
  }
  if (!format_seen)
    throw std::invalid_argument("missing '" + format + "' header");
  return kv;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad integer '" + s + "'");
  }
}

constexpr const char* kResultsHeader =
    "n,mean_abs,scaled_mean,mean_sq,mean_fourth,stderr_abs,sample_count";

}  // namespace

std::string format_sig(double v, int sig_digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", sig_digits, v);
  return buf;
}

const ResultRow& ResultTable::row(std::uint32_t want) const {
  if (want < 1 || want > rows.size() || rows[want - 1].n != want)
    throw std::invalid_argument("result table has no row for n=" +
                                std::to_string(want));
  return rows[want - 1];
}

ResultTable make_result_table(const RunConfig& cfg,
                              const MomentAccumulator& acc) {
  ResultTable t;
  t.config_hash = config_hash_hex(cfg);
  t.shape_hash = shape_hash_hex(cfg);
  t.dist = to_string(cfg.dist);
  t.n = cfg.n;
  t.samples = acc.count();
  t.master_seed = cfg.master_seed;
  t.cond = cfg.cond.to_string();
  t.quarantined = acc.quarantined();
  const double nan = std::nan("");
  bool has_q1 = false, has_q2 = false;
  for (double q : acc.qs()) {
    if (q == 1.0) has_q1 = true;
    if (q == 2.0) has_q2 = true;
  }
  t.rows.reserve(cfg.n);
  for (std::uint32_t n = 1; n <= cfg.n; ++n) {
    ResultRow r;
    r.n = n;
    r.mean_abs = acc.mean(0.5, n);
    r.scaled_mean = n >= 2 ? scaled_mean(acc, n) : nan;
    r.mean_sq = has_q1 ? acc.mean(1.0, n) : nan;
    r.mean_fourth = has_q2 ? acc.mean(2.0, n) : nan;
    r.stderr_abs = (has_q1 && acc.count() >= 2) ? stderr_abs(acc, n) : nan;
    r.sample_count = acc.count();
    t.rows.push_back(r);
  }
  return t;
}

void write_results_csv(const std::string& path, const ResultTable& t) {
  auto out = open_out(path);
  out << "# mclab-results v1\n";
  out << "# config_hash=" << t.config_hash << "\n";
  out << "# shape_hash=" << t.shape_hash << "\n";
  out << "# dist=" << t.dist << "\n";
  out << "# n=" << t.n << "\n";
  out << "# samples=" << t.samples << "\n";
  out << "# seed=" << t.master_seed << "\n";
  out << "# cond=" << t.cond << "\n";
  out << "# quarantined=" << t.quarantined << "\n";
  out << kResultsHeader << "\n";
  for (const ResultRow& r : t.rows) {
    out << r.n << ',' << format_sig(r.mean_abs, 10) << ','
        << format_sig(r.scaled_mean, 10) << ',' << format_sig(r.mean_sq, 10)
        << ',' << format_sig(r.mean_fourth, 10) << ','
        << format_sig(r.stderr_abs, 10) << ',' << r.sample_count << "\n";
  }
  if (!out) throw std::invalid_argument("short write on " + path);
}

ResultTable parse_results_csv(const std::string& path) {
  auto in = open_in(path);
  std::string data_line;
  auto kv = read_header(in, "mclab-results v1", data_line);
  ResultTable t;
  t.config_hash = kv.at("config_hash");
  t.shape_hash = kv.at("shape_hash");
  t.dist = kv.at("dist");
  t.n = static_cast<std::uint32_t>(to_u64(kv.at("n")));
  t.samples = to_u64(kv.at("samples"));
  t.master_seed = to_u64(kv.at("seed"));
  t.cond = kv.count("cond") ? kv.at("cond") : "";
  t.quarantined = to_u64(kv.at("quarantined"));
  if (data_line != kResultsHeader)
    throw std::invalid_argument("unexpected results column header in " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 7)
      throw std::invalid_argument("bad results row '" + line + "'");
    ResultRow r;
    r.n = static_cast<std::uint32_t>(to_u64(f[0]));
    r.mean_abs = to_double(f[1]);
    r.scaled_mean = to_double(f[2]);
    r.mean_sq = to_double(f[3]);
    r.mean_fourth = to_double(f[4]);
    r.stderr_abs = to_double(f[5]);
    r.sample_count = to_u64(f[6]);
    t.rows.push_back(r);
  }
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (t.rows[i].n != i + 1)
      throw std::invalid_argument("results rows out of order in " + path);
  if (t.rows.size() != t.n)
    throw std::invalid_argument("results row count mismatch in " + path);
  return t;
}

void write_histogram_csv(const std::string& path, const Histogram& h,
                         const std::string& kind, const RunConfig& cfg) {
  auto out = open_out(path);
  out << "# mclab-histogram v1\n";
  out << "# config_hash=" << config_hash_hex(cfg) << "\n";
  out << "# shape_hash=" << shape_hash_hex(cfg) << "\n";
  out << "# kind=" << kind << "\n";
  out << "bin_low,bin_high,count\n";
  out << "-inf," << format_sig(h.lo, 17) << ',' << h.underflow << "\n";
  const double w = (h.hi - h.lo) / double(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << format_sig(h.lo + double(i) * w, 17) << ','
        << format_sig(h.lo + double(i + 1) * w, 17) << ',' << h.counts[i]
        << "\n";
  }
  out << format_sig(h.hi, 17) << ",inf," << h.overflow << "\n";
  if (!out) throw std::invalid_argument("short write on " + path);
}

HistogramFile parse_histogram_csv(const std::string& path) {
  auto in = open_in(path);
  std::string data_line;
  auto kv = read_header(in, "mclab-histogram v1", data_line);
  if (data_line != "bin_low,bin_high,count")
    throw std::invalid_argument("unexpected histogram header in " + path);
  HistogramFile hf;
  hf.config_hash = kv.at("config_hash");
  hf.kind = kv.at("kind");
  std::vector<std::array<double, 2>> edges;
  std::vector<std::uint64_t> counts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 3)
      throw std::invalid_argument("bad histogram row '" + line + "'");
    const double lo = f[0] == "-inf" ? -HUGE_VAL : to_double(f[0]);
    const double hi = f[1] == "inf" ? HUGE_VAL : to_double(f[1]);
    edges.push_back({lo, hi});
    counts.push_back(to_u64(f[2]));
  }
  if (edges.size() < 3)
    throw std::invalid_argument("histogram file too short: " + path);
  const std::size_t bins = edges.size() - 2;
  hf.hist = Histogram(edges[1][0], edges[edges.size() - 2][1],
                      static_cast<std::uint32_t>(bins));
  hf.hist.underflow = counts.front();
  hf.hist.overflow = counts.back();
  for (std::size_t i = 0; i < bins; ++i) hf.hist.counts[i] = counts[i + 1];
  return hf;
}

void write_sequence_fixture(const std::string& path, const SampleSequence& x) {
  auto out = open_out(path);
  out << "# mclab-sequence v1\n";
  out << "# dist=" << to_string(x.dist()) << "\n";
  out << "# n=" << x.size() << "\n";
  out << "k,re_x,im_x\n";
  for (std::uint32_t k = 1; k <= x.size(); ++k) {
    const auto v = x.value(k);
    out << k << ',' << format_sig(v.real(), 17) << ','
        << format_sig(v.imag(), 17) << "\n";
  }
}

SampleSequence parse_sequence_fixture(const std::string& path) {
  auto in = open_in(path);
  std::string data_line;
  auto kv = read_header(in, "mclab-sequence v1", data_line);
  if (data_line != "k,re_x,im_x")
    throw std::invalid_argument("unexpected sequence header in " + path);
  const auto n = static_cast<std::uint32_t>(to_u64(kv.at("n")));
  SampleSequence x(distribution_from_string(kv.at("dist")), n);
  std::string line;
  std::uint32_t seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 3)
      throw std::invalid_argument("bad sequence row '" + line + "'");
    const auto k = static_cast<std::uint32_t>(to_u64(f[0]));
    if (k < 1 || k > n) throw std::invalid_argument("sequence index off range");
    x.set_value(k, {to_double(f[1]), to_double(f[2])});
    ++seen;
  }
  if (seen != n) throw std::invalid_argument("sequence fixture incomplete");
  return x;
}

void write_series_fixture(const std::string& path,
                          const std::vector<std::complex<double>>& a) {
  auto out = open_out(path);
  out << "# mclab-series v1\n";
  out << "# order=" << (a.size() - 1) << "\n";
  out << "n,re_A,im_A\n";
  for (std::size_t n = 0; n < a.size(); ++n)
    out << n << ',' << format_sig(a[n].real(), 17) << ','
        << format_sig(a[n].imag(), 17) << "\n";
}

std::vector<std::complex<double>> parse_series_fixture(
    const std::string& path) {
  auto in = open_in(path);
  std::string data_line;
  auto kv = read_header(in, "mclab-series v1", data_line);
  if (data_line != "n,re_A,im_A")
    throw std::invalid_argument("unexpected series header in " + path);
  const auto order = to_u64(kv.at("order"));
  std::vector<std::complex<double>> a(order + 1);
  std::string line;
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 3)
      throw std::invalid_argument("bad series row '" + line + "'");
    const auto n = to_u64(f[0]);
    if (n >= a.size()) throw std::invalid_argument("series index off range");
    a[n] = {to_double(f[1]), to_double(f[2])};
    ++seen;
  }
  if (seen != a.size()) throw std::invalid_argument("series fixture incomplete");
  return a;
}

DeviationReport deviation_report_from_tables(
    const ResultTable& benchmark,
    const std::vector<const ResultTable*>& batches) {
  if (batches.empty()) throw std::invalid_argument("no batches");
  DeviationReport rep;
  rep.n = benchmark.n;
  if (rep.n < 1) throw std::invalid_argument("need n >= 1");
  std::vector<std::string> hashes{benchmark.config_hash};
  double pooled_sum = 0;
  std::uint64_t pooled_cnt = 0, pooled_ge = 0;
  for (const ResultTable* b : batches) {
    if (b->shape_hash != benchmark.shape_hash)
      throw std::invalid_argument(
          "shape_hash mismatch: batch " + b->shape_hash + " vs benchmark " +
          benchmark.shape_hash + " (different dist, order, or moment set)");
    for (const std::string& h : hashes)
      if (h == b->config_hash)
        throw std::invalid_argument("config_hash " + h +
                                    " appears twice: runs share a seed, the "
                                    "deviation comparison would be vacuous");
    hashes.push_back(b->config_hash);
    BatchDeviation bd;
    bd.delta.resize(rep.n);
    std::uint64_t ge = 0;
    for (std::uint32_t n = 1; n <= rep.n; ++n) {
      const double d =
          std::fabs(benchmark.row(n).mean_abs - b->row(n).mean_abs);
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

void emit_scaled_curve(const std::string& path, const ResultTable& t) {
  auto out = open_out(path);
  out << "# config_hash=" << t.config_hash << "\n";
  out << "# n scaled_mean scaled_stderr\n";
  const std::uint32_t start = t.n >= 10 ? 10 : 2;
  for (std::uint32_t n = start; n <= t.n; ++n) {
    const ResultRow& r = t.row(n);
    const double scale = std::pow(std::log(double(n)), 0.25);
    out << n << ' ' << format_sig(r.scaled_mean, 10) << ' '
        << format_sig(r.stderr_abs * scale, 10) << "\n";
  }
}

void emit_trace_points(
    const std::string& path,
    const std::vector<std::pair<std::uint64_t, double>>& pts,
    const std::string& config_hash) {
  auto out = open_out(path);
  if (!config_hash.empty()) out << "# config_hash=" << config_hash << "\n";
  out << "# samples running_mean_deviation\n";
  for (const auto& [s, d] : pts) out << s << ' ' << format_sig(d, 10) << "\n";
}

void emit_delta_overlay(const std::string& path, const DeviationReport& rep,
                        const std::string& benchmark_hash) {
  auto out = open_out(path);
  if (!benchmark_hash.empty())
    out << "# benchmark_config_hash=" << benchmark_hash << "\n";
  out << "# n";
  for (std::size_t b = 0; b < rep.batches.size(); ++b)
    out << " delta_batch" << (b + 1);
  out << "\n";
  for (std::uint32_t n = 1; n <= rep.n; ++n) {
    out << n;
    for (const auto& b : rep.batches)
      out << ' ' << format_sig(b.delta[n - 1], 10);
    out << "\n";
  }
}

void emit_histogram_points(const std::string& path, const Histogram& h,
                           const std::string& config_hash) {
  auto out = open_out(path);
  if (!config_hash.empty()) out << "# config_hash=" << config_hash << "\n";
  out << "# bin_mid count\n";
  const double w = (h.hi - h.lo) / double(h.counts.size());
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << format_sig(h.lo + (double(i) + 0.5) * w, 10) << ' ' << h.counts[i]
        << "\n";
}

}  // namespace mclab::io
