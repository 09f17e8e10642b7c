#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mshine/model.hpp"

namespace mshine {

/// File name used for a meta-path's embeddings: the id with ':' replaced by
/// '_', plus ".emb".
std::string embedding_file_name(const std::string& path_id);

/// Basic node rows decoded for one meta-path (N x d).
Table path_embeddings(const ModelParams& params, std::size_t path);

/// Writes one text file per meta-path: a header line "N d", then
/// "<label> v1 ... vd" per node with six significant digits. Returns the
/// files in path order. Throws DataError if the directory is unwritable.
std::vector<std::filesystem::path> export_embeddings(
    const ModelParams& params, const std::vector<std::string>& labels,
    const std::vector<std::string>& path_ids, const std::filesystem::path& out_dir);

struct EmbeddingFile {
  std::vector<std::string> labels;
  Table vectors;
};

EmbeddingFile read_embeddings(const std::filesystem::path& file);

}  // namespace mshine
