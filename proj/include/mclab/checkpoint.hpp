#pragma once

#include <optional>
#include <string>

#include "mclab/montecarlo.hpp"

namespace mclab {

struct CheckpointData {
  std::string config_hash;
  std::uint64_t shards_done = 0;
  MomentAccumulator acc;
};

// JSON on disk; doubles serialize with shortest-round-trip formatting, so a
// resumed run continues bit-exactly. Written via temp file + rename.
void save_checkpoint(const std::string& path, const RunConfig& cfg,
                     std::uint64_t shards_done, const MomentAccumulator& acc);

// Throws std::invalid_argument on malformed files or when the file's
// config_hash does not match cfg (a checkpoint only resumes its own run).
CheckpointData load_checkpoint(const std::string& path, const RunConfig& cfg);

}  // namespace mclab
