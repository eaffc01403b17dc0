#include "mclab/campaign.hpp"

#include <cctype>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "mclab/philox.hpp"

namespace mclab {

namespace {
using nlohmann::json;

std::string sanitize(const std::string& name) {
  std::string s;
  for (char c : name)
    s += (std::isalnum(static_cast<unsigned char>(c)) || c == '+' ||
          c == '-' || c == '_')
             ? c
             : '_';
  return s;
}

json estimate_to_json(const Estimate& e) {
  return json{{"value", e.value}, {"se", e.se}};
}
Estimate estimate_from_json(const json& j) {
  return Estimate{j.at("value").get<double>(), j.at("se").get<double>()};
}
}  // namespace

CampaignCache::CampaignCache(const std::filesystem::path& dir) : dir_(dir) {
  std::filesystem::create_directories(dir_);
  load_manifest();
}

void CampaignCache::load_manifest() {
  const auto path = dir_ / "manifest.json";
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed campaign manifest: " +
                                std::string(e.what()));
  }
  if (j.value("format", "") != std::string("mclab-campaign") ||
      j.value("version", 0) != 1)
    throw std::invalid_argument("not a v1 campaign manifest: " +
                                path.string());
  for (const auto& [name, e] : j.at("runs").items())
    entries_[name] = Entry{e.at("config_hash").get<std::string>(),
                           e.at("file").get<std::string>()};
}

void CampaignCache::save_manifest() const {
  json runs = json::object();
  for (const auto& [name, e] : entries_)
    runs[name] = json{{"config_hash", e.hash}, {"file", e.file}};
  json j{{"format", "mclab-campaign"}, {"version", 1}, {"runs", runs}};
  const auto path = dir_ / "manifest.json";
  const auto tmp = dir_ / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out)
      throw std::invalid_argument("cannot write manifest " + tmp.string());
    out << j.dump(2);
  }
  std::filesystem::rename(tmp, path);
}

const io::ResultTable& CampaignCache::get(const std::string& name,
                                          const RunConfig& cfg,
                                          const ProgressFn& progress) {
  const std::string hash = config_hash_hex(cfg);
  if (auto it = loaded_.find(name);
      it != loaded_.end() && it->second.config_hash == hash) {
    ++hits_;
    return it->second;
  }
  if (auto it = entries_.find(name);
      it != entries_.end() && it->second.hash == hash) {
    const auto file = dir_ / it->second.file;
    if (std::filesystem::exists(file)) {
      io::ResultTable t = io::parse_results_csv(file.string());
      if (t.config_hash == hash) {
        ++hits_;
        return loaded_[name] = std::move(t);
      }
      // stale or tampered file: fall through and rerun
    }
  }
  const RunResult r = run_simulation(cfg, progress);
  ++runs_;
  io::ResultTable t = io::make_result_table(cfg, r.acc);
  const std::string file = sanitize(name) + ".csv";
  io::write_results_csv((dir_ / file).string(), t);
  entries_[name] = Entry{hash, file};
  save_manifest();
  return loaded_[name] = std::move(t);
}

std::uint64_t derive_seed(std::uint64_t campaign_seed, const std::string& tag) {
  return splitmix64(campaign_seed ^ fnv1a64(tag));
}

namespace {

Estimate estimate_at(const io::ResultTable& t, std::uint32_t n) {
  const io::ResultRow& r = t.row(n);
  const double scale = std::pow(std::log(double(n)), 0.25);
  return Estimate{r.scaled_mean, r.stderr_abs * scale};
}

std::string kset_suffix(const std::vector<std::uint32_t>& kset) {
  std::string s;
  for (std::uint32_t k : kset) s += "_" + std::to_string(k);
  return s;
}

}  // namespace

RatioTable ratio_campaign(const std::vector<std::uint32_t>& kset,
                          std::uint32_t n, std::uint64_t samples_per_run,
                          std::uint64_t campaign_seed, unsigned workers,
                          CampaignCache& cache, const std::string& kernel,
                          const ProgressFn& progress) {
  if (kset.empty()) throw std::invalid_argument("empty index set");
  if (kset.size() > 12)
    throw std::invalid_argument("index set too large (2^|K| runs)");
  for (std::size_t i = 0; i < kset.size(); ++i) {
    if (kset[i] % 2 != 0 || kset[i] < 2 || kset[i] > n)
      throw std::invalid_argument(
          "index set must contain even indices within [2, n]");
    if (i > 0 && kset[i] <= kset[i - 1])
      throw std::invalid_argument("index set must be strictly ascending");
  }
  if (n < 2) throw std::invalid_argument("need n >= 2");

  auto run_tagged = [&](const std::string& tag,
                        const Conditioning& cond) -> Estimate {
    RunConfig cfg;
    cfg.dist = Distribution::Rademacher;
    cfg.n = n;
    cfg.samples = samples_per_run;
    cfg.qs = {0.5, 1.0};
    cfg.master_seed = derive_seed(campaign_seed, tag);
    cfg.cond = cond;
    cfg.workers = workers;
    cfg.kernel = kernel;
    return estimate_at(cache.get(tag, cfg, progress), n);
  };

  RatioTable t;
  t.kset = kset;
  t.n = n;
  t.samples_per_run = samples_per_run;
  t.campaign_seed = campaign_seed;
  t.c_uncond = run_tagged("C", {});

  for (std::uint32_t k : kset) {
    Conditioning plus, minus;
    plus.set(k, +1);
    minus.set(k, -1);
    t.singles.push_back({run_tagged("C" + std::to_string(k) + "+", plus),
                         run_tagged("C" + std::to_string(k) + "-", minus)});
  }

  const std::size_t kk = kset.size();
  for (std::uint64_t c = 0; c < (std::uint64_t(1) << kk); ++c) {
    RatioCell cell;
    Conditioning cond;
    std::string tag = "Ceps";
    std::vector<Estimate> singles;
    for (std::size_t j = 0; j < kk; ++j) {
      const bool neg = (c >> (kk - 1 - j)) & 1u;
      const int sign = neg ? -1 : +1;
      cell.eps.push_back(sign);
      cond.set(kset[j], sign);
      tag += "_" + std::to_string(kset[j]) + (neg ? "m" : "p");
      singles.push_back(t.singles[j][neg ? 1 : 0]);
    }
    cell.c_eps = run_tagged(tag, cond);
    cell.rho = product_ratio(cell.c_eps, t.c_uncond, singles);
    t.cells.push_back(std::move(cell));
  }

  write_ratio_json(cache.dir() / ("ratio" + kset_suffix(kset) + ".json"), t);
  write_ratio_csv(cache.dir() / ("ratio" + kset_suffix(kset) + ".csv"), t);
  return t;
}

void write_ratio_csv(const std::filesystem::path& path, const RatioTable& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::string canon = "ratio;n=" + std::to_string(t.n) +
                      ";samples=" + std::to_string(t.samples_per_run) +
                      ";seed=" + std::to_string(t.campaign_seed) + ";kset=";
  for (std::uint32_t k : t.kset) canon += std::to_string(k) + ",";
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canon)));
  out << "# mclab-ratio v1\n";
  out << "# campaign_hash=" << hex << "\n";
  out << "# n=" << t.n << "\n";
  out << "# samples_per_run=" << t.samples_per_run << "\n";
  out << "# campaign_seed=" << t.campaign_seed << "\n";
  out << "# c_uncond=" << io::format_sig(t.c_uncond.value, 10) << "\n";
  out << "# c_uncond_se=" << io::format_sig(t.c_uncond.se, 10) << "\n";
  for (std::size_t i = 0; i < t.kset.size(); ++i) {
    out << "# c" << t.kset[i]
        << "_plus=" << io::format_sig(t.singles[i][0].value, 10)
        << " se=" << io::format_sig(t.singles[i][0].se, 10) << "\n";
    out << "# c" << t.kset[i]
        << "_minus=" << io::format_sig(t.singles[i][1].value, 10)
        << " se=" << io::format_sig(t.singles[i][1].se, 10) << "\n";
  }
  for (std::uint32_t k : t.kset) out << "eps" << k << ",";
  out << "c_eps,c_eps_se,rho,rho_se\n";
  for (const RatioCell& cell : t.cells) {
    for (int s : cell.eps) out << (s > 0 ? "+1" : "-1") << ",";
    out << io::format_sig(cell.c_eps.value, 10) << ","
        << io::format_sig(cell.c_eps.se, 10) << ","
        << io::format_sig(cell.rho.value, 10) << ","
        << io::format_sig(cell.rho.se, 10) << "\n";
  }
}

void write_ratio_json(const std::filesystem::path& path, const RatioTable& t) {
  json singles = json::array();
  for (std::size_t i = 0; i < t.kset.size(); ++i)
    singles.push_back(json{{"k", t.kset[i]},
                           {"plus", estimate_to_json(t.singles[i][0])},
                           {"minus", estimate_to_json(t.singles[i][1])}});
  json cells = json::array();
  for (const RatioCell& c : t.cells)
    cells.push_back(json{{"eps", c.eps},
                         {"c", estimate_to_json(c.c_eps)},
                         {"rho", estimate_to_json(c.rho)}});
  json j{{"format", "mclab-ratio"},
         {"version", 1},
         {"kset", t.kset},
         {"n", t.n},
         {"samples_per_run", t.samples_per_run},
         {"campaign_seed", t.campaign_seed},
         {"c_uncond", estimate_to_json(t.c_uncond)},
         {"singles", singles},
         {"cells", cells}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot write " + path.string());
  out << j.dump(2);
}

RatioTable parse_ratio_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed ratio file " + path.string() +
                                ": " + e.what());
  }
  if (j.value("format", "") != std::string("mclab-ratio") ||
      j.value("version", 0) != 1)
    throw std::invalid_argument("not a v1 ratio file: " + path.string());
  RatioTable t;
  t.kset = j.at("kset").get<std::vector<std::uint32_t>>();
  t.n = j.at("n").get<std::uint32_t>();
  t.samples_per_run = j.at("samples_per_run").get<std::uint64_t>();
  t.campaign_seed = j.at("campaign_seed").get<std::uint64_t>();
  t.c_uncond = estimate_from_json(j.at("c_uncond"));
  for (const auto& s : j.at("singles"))
    t.singles.push_back(
        {estimate_from_json(s.at("plus")), estimate_from_json(s.at("minus"))});
  for (const auto& c : j.at("cells")) {
    RatioCell cell;
    cell.eps = c.at("eps").get<std::vector<int>>();
    cell.c_eps = estimate_from_json(c.at("c"));
    cell.rho = estimate_from_json(c.at("rho"));
    t.cells.push_back(std::move(cell));
  }
  if (t.singles.size() != t.kset.size())
    throw std::invalid_argument("ratio file " + path.string() + " lists " +
                                std::to_string(t.singles.size()) +
                                " single-index constants for " +
                                std::to_string(t.kset.size()) + " indices");
  for (const RatioCell& cell : t.cells)
    if (cell.eps.size() != t.kset.size())
      throw std::invalid_argument("ratio file " + path.string() +
                                  " has a cell whose sign vector does not "
                                  "match the index set");
  return t;
}

}  // namespace mclab
