#include "mclab/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace mclab {

namespace {

using nlohmann::json;

json hist_to_json(const Histogram& h) {
  return json{{"lo", h.lo},
              {"hi", h.hi},
              {"counts", h.counts},
              {"underflow", h.underflow},
              {"overflow", h.overflow}};
}

Histogram hist_from_json(const json& j) {
  Histogram h(j.at("lo").get<double>(), j.at("hi").get<double>(),
              static_cast<std::uint32_t>(j.at("counts").size()));
  h.counts = j.at("counts").get<std::vector<std::uint64_t>>();
  h.underflow = j.at("underflow").get<std::uint64_t>();
  h.overflow = j.at("overflow").get<std::uint64_t>();
  return h;
}

}  // namespace

void save_checkpoint(const std::string& path, const RunConfig& cfg,
                     std::uint64_t shards_done, const MomentAccumulator& acc) {
  json j;
  j["format"] = "mclab-checkpoint";
  j["version"] = 1;
  j["config_hash"] = config_hash_hex(cfg);
  j["config"] = canonical_config(cfg);
  j["shards_done"] = shards_done;
  json ja;
  ja["n"] = acc.n();
  ja["qs"] = acc.qs();
  ja["count"] = acc.count();
  ja["quarantined"] = acc.quarantined();
  json sums = json::array(), comps = json::array();
  for (std::size_t qi = 0; qi < acc.qs().size(); ++qi) {
    sums.push_back(acc.sums(qi));
    comps.push_back(acc.comps(qi));
  }
  ja["sums"] = std::move(sums);
  ja["comps"] = std::move(comps);
  if (acc.has_histograms()) {
    ja["hist_abs"] = hist_to_json(acc.hist_abs());
    ja["hist_re"] = hist_to_json(acc.hist_re());
    ja["hist_im"] = hist_to_json(acc.hist_im());
  }
  j["accumulator"] = std::move(ja);

  // temp + rename so a crash mid-write cannot clobber a good checkpoint
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot write checkpoint " + tmp);
    out << j.dump();
    if (!out) throw std::invalid_argument("short write on checkpoint " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

CheckpointData load_checkpoint(const std::string& path, const RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open checkpoint " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed checkpoint " + path + ": " +
                                e.what());
  }
  if (j.value("format", "") != std::string("mclab-checkpoint") ||
      j.value("version", 0) != 1)
    throw std::invalid_argument("not a v1 checkpoint: " + path);

  CheckpointData out;
  out.config_hash = j.at("config_hash").get<std::string>();
  if (out.config_hash != config_hash_hex(cfg))
    throw std::invalid_argument(
        "checkpoint config hash " + out.config_hash +
        " does not match this run's " + config_hash_hex(cfg) +
        " (a checkpoint only resumes the identical logical run)");
  out.shards_done = j.at("shards_done").get<std::uint64_t>();

  const json& ja = j.at("accumulator");
  const auto n = ja.at("n").get<std::uint32_t>();
  auto qs = ja.at("qs").get<std::vector<double>>();
  const bool hist = ja.contains("hist_abs");
  if (n != cfg.n || qs != cfg.qs || hist != cfg.histogram)
    throw std::invalid_argument("checkpoint accumulator shape mismatch");
  out.acc = MomentAccumulator(n, qs, hist);
  out.acc.load_counts(ja.at("count").get<std::uint64_t>(),
                      ja.at("quarantined").get<std::uint64_t>());
  const json& sums = ja.at("sums");
  const json& comps = ja.at("comps");
  if (sums.size() != qs.size() || comps.size() != qs.size())
    throw std::invalid_argument("checkpoint plane count mismatch");
  for (std::size_t qi = 0; qi < qs.size(); ++qi)
    out.acc.load_plane(qi, sums[qi].get<std::vector<double>>(),
                       comps[qi].get<std::vector<double>>());
  if (hist) {
    out.acc.hist_abs() = hist_from_json(ja.at("hist_abs"));
    out.acc.hist_re() = hist_from_json(ja.at("hist_re"));
    out.acc.hist_im() = hist_from_json(ja.at("hist_im"));
  }
  return out;
}

}  // namespace mclab
