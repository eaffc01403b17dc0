#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "mclab/experiments.hpp"
#include "mclab/io.hpp"

namespace mclab {

// Disk-backed cache of finished runs, keyed by a caller-chosen name. A
// manifest maps name -> (config_hash, csv file); get() reuses the stored
// table when the hash matches and reruns otherwise, so interrupted campaigns
// resume where they left off and re-invocations are free.
class CampaignCache {
 public:
  explicit CampaignCache(const std::filesystem::path& dir);

  const io::ResultTable& get(const std::string& name, const RunConfig& cfg,
                             const ProgressFn& progress = {});

  std::uint64_t runs_executed() const { return runs_; }
  std::uint64_t cache_hits() const { return hits_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  struct Entry {
    std::string hash;
    std::string file;
  };
  std::filesystem::path dir_;
  std::map<std::string, Entry> entries_;
  std::map<std::string, io::ResultTable> loaded_;
  std::uint64_t runs_ = 0, hits_ = 0;

  void load_manifest();
  void save_manifest() const;
};

// Derives the disjoint per-constituent seed for `tag` under a campaign seed.
std::uint64_t derive_seed(std::uint64_t campaign_seed, const std::string& tag);

// Runs (or reloads) every constituent of the ratio diagnostic for one index
// set: the unconditioned constant, both signs of each single-index constant,
// and the full 2^|K| grid of jointly conditioned constants — all Rademacher,
// same n and sample count, disjoint seeds derived from campaign_seed.
// Writes ratio_<kset>.json next to the cached runs and returns the table.
RatioTable ratio_campaign(const std::vector<std::uint32_t>& kset,
                          std::uint32_t n, std::uint64_t samples_per_run,
                          std::uint64_t campaign_seed, unsigned workers,
                          CampaignCache& cache, const std::string& kernel = "",
                          const ProgressFn& progress = {});

void write_ratio_json(const std::filesystem::path& path, const RatioTable& t);

// Flat CSV mirror of the ratio table: one row per sign choice, columns
// eps<k>... then c_eps, c_eps_se, rho, rho_se; constituents echoed in header
// comments along with a campaign hash.
void write_ratio_csv(const std::filesystem::path& path, const RatioTable& t);
RatioTable parse_ratio_json(const std::filesystem::path& path);

}  // namespace mclab
