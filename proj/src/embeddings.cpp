#include "mshine/embeddings.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mshine/error.hpp"

namespace mshine {

std::string embedding_file_name(const std::string& path_id) {
  std::string name = path_id;
  std::replace(name.begin(), name.end(), ':', '_');
  return name + ".emb";
}

Table path_embeddings(const ModelParams& params, std::size_t path) {
  Table out(params.num_nodes(), params.dim());
  for (NodeId v = 0; v < params.num_nodes(); ++v) {
    hadamard(params.basic.row(v), params.decode_x.row(path), out.row(v));
  }
  return out;
}

std::vector<std::filesystem::path> export_embeddings(
    const ModelParams& params, const std::vector<std::string>& labels,
    const std::vector<std::string>& path_ids, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> files;
  char buf[32];
  for (std::size_t p = 0; p < path_ids.size(); ++p) {
    auto file = out_dir / embedding_file_name(path_ids[p]);
    std::ofstream out(file);
    if (!out) throw DataError("cannot write " + file.string());
    const auto rows = path_embeddings(params, p);
    out << rows.rows() << ' ' << rows.cols() << '\n';
    for (NodeId v = 0; v < rows.rows(); ++v) {
      out << labels[v];
      for (double x : rows.row(v)) {
        std::snprintf(buf, sizeof buf, " %.6g", x);
        out << buf;
      }
      out << '\n';
    }
    if (!out.flush()) throw DataError("failed writing " + file.string());
    files.push_back(std::move(file));
  }
  return files;
}

EmbeddingFile read_embeddings(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  std::size_t n = 0, d = 0;
  if (!(in >> n >> d)) throw DataError(file.string() + ": bad header");
  EmbeddingFile out;
  out.vectors = Table(n, d);
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(in >> out.labels[i])) throw DataError(file.string() + ": truncated");
    for (std::size_t j = 0; j < d; ++j) {
      if (!(in >> out.vectors.at(i, j))) throw DataError(file.string() + ": truncated");
    }
  }
  return out;
}

}  // namespace mshine
