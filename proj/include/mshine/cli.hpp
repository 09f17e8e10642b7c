#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mshine/trainer.hpp"

namespace mshine {

inline constexpr const char* kVersion = "0.1.0";

struct TrainArgs {
  std::filesystem::path nodes;
  std::filesystem::path edges;
  std::optional<std::filesystem::path> metapaths;  // replaces auto-selection
  std::optional<std::size_t> max_half_len;
  std::filesystem::path out = "model.mshn";
  std::filesystem::path log = "train.log";
  std::optional<std::filesystem::path> manifest;   // default: <out>.manifest.json
  TrainConfig config;
};

struct InputDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string tool = "mshine";
  std::string version = kVersion;
  std::string command;
  std::uint64_t seed = 0;
  bool deterministic = true;
  std::map<std::string, std::string> config;
  std::map<std::string, InputDigest> inputs;
  std::vector<std::string> metapaths;
  std::map<std::string, double> timings_ms;
  std::map<std::string, std::string> outputs;  // name -> sha256

  std::string to_json() const;
  /// Temporary sibling plus rename.
  void write(const std::filesystem::path& file) const;
};

/// Hex SHA-256 of a file's bytes. Throws DataError if unreadable.
std::string sha256_file(const std::filesystem::path& file);

/// One meta-path per line (full id or node types only); '#' starts a comment.
/// Any invalid line throws DataError.
std::vector<MetaPath> load_metapaths(const std::filesystem::path& file,
                                     const Schema& schema);

/// Load, select (or read `--metapaths`), train, checkpoint, and write the
/// manifest. Throws DataError on an empty meta-path set.
RunManifest pipeline_train(const TrainArgs& args);

/// Returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace mshine
