#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mshine/model.hpp"

namespace mshine {

/// Binary checkpoint layout (all integers and floats little-endian):
///   "MSHN1"
///   u64 N, u64 d, u64 |TripleType|, u64 |MetaPath|
///   X, H, W_hy, W_xh, W_hh, W_rh, R, V_x, V_h, V_y as row-major f32
///   u64 count, then count x (u64 byte length, UTF-8 bytes): node labels
///   u64 count, then count x (u64 byte length, UTF-8 bytes): meta-path ids
struct Checkpoint {
  ModelParams params;
  std::vector<std::string> labels;
  std::vector<std::string> path_ids;
};

/// Writes to a temporary sibling and renames it into place.
void save_checkpoint(const std::filesystem::path& file, const ModelParams& params,
                     const std::vector<std::string>& labels,
                     const std::vector<std::string>& path_ids);

/// Throws DataError on a bad magic, truncation, or inconsistent tables.
Checkpoint load_checkpoint(const std::filesystem::path& file);

/// Rounds every parameter to f32 precision, i.e. what a save/load round trip
/// returns.
ModelParams round_to_f32(ModelParams params);

}  // namespace mshine
