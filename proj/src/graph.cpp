#include "mshine/graph.hpp"

#include <fstream>
#include <sstream>

#include "mshine/error.hpp"

namespace mshine {

namespace {

// ':' and ',' are the separators of meta-path and triple ids.
void check_type_name(std::string_view name) {
  if (name.empty()) throw DataError("empty type name");
  if (name.find_first_of(":,") != std::string_view::npos) {
    throw DataError("type name '" + std::string(name) +
                    "' contains a reserved character (':' or ',')");
  }
}

std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool skippable(std::string_view line) {
  return line.empty() || line.front() == '#';
}

std::string where(const std::filesystem::path& file, std::size_t line_no) {
  return file.string() + ":" + std::to_string(line_no) + ": ";
}

}  // namespace

NodeTypeId Schema::add_node_type(std::string_view name) {
  if (auto found = find_node_type(name)) return *found;
  check_type_name(name);
  auto id = static_cast<NodeTypeId>(node_type_names_.size());
  node_type_names_.emplace_back(name);
  node_type_index_.emplace(std::string(name), id);
  return id;
}

EdgeTypeId Schema::add_edge_type(std::string_view name, NodeTypeId a,
                                 NodeTypeId b) {
  if (index_of(a) >= num_node_types() || index_of(b) >= num_node_types()) {
    throw DataError("edge type '" + std::string(name) +
                    "' references an unknown node type");
  }
  if (auto found = find_edge_type(name)) {
    const auto& info = edge_types_[index_of(*found)];
    if (!info.connects(a, b)) {
      throw DataError("edge type '" + std::string(name) + "' declared as " +
                      node_type_names_[index_of(info.first)] + "-" +
                      node_type_names_[index_of(info.second)] +
                      " but used between " + node_type_names_[index_of(a)] +
                      " and " + node_type_names_[index_of(b)]);
    }
    return *found;
  }
  check_type_name(name);
  auto id = static_cast<EdgeTypeId>(edge_types_.size());
  edge_types_.push_back({std::string(name), a, b});
  edge_type_index_.emplace(std::string(name), id);
  return id;
}

Schema Schema::from_pairs(
    std::span<const std::pair<std::string, std::string>> pairs) {
  Schema s;
  for (const auto& [a, b] : pairs) {
    auto ta = s.add_node_type(a);
    auto tb = s.add_node_type(b);
    s.add_edge_type(a + b, ta, tb);
  }
  return s;
}

std::optional<NodeTypeId> Schema::find_node_type(std::string_view name) const {
  auto it = node_type_index_.find(std::string(name));
  if (it == node_type_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeTypeId> Schema::find_edge_type(std::string_view name) const {
  auto it = edge_type_index_.find(std::string(name));
  if (it == edge_type_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<EdgeTypeId> Schema::edge_types_between(NodeTypeId a,
                                                   NodeTypeId b) const {
  std::vector<EdgeTypeId> out;
  for (std::uint32_t i = 0; i < edge_types_.size(); ++i) {
    if (edge_types_[i].connects(a, b)) out.push_back(static_cast<EdgeTypeId>(i));
  }
  return out;
}

std::optional<NodeId> TypedGraph::find_node(std::string_view label) const {
  auto it = label_index_.find(std::string(label));
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const Neighbor> TypedGraph::neighbors_by_type(NodeId v,
                                                        NodeTypeId t) const {
  if (index_of(t) >= schema_.num_node_types()) {
    throw std::out_of_range("unknown node type id " +
                            std::to_string(index_of(t)));
  }
  auto b = bucket(v, t);
  return {adjacency_.data() + offsets_[b], offsets_[b + 1] - offsets_[b]};
}

std::span<const Neighbor> TypedGraph::neighbors_via(NodeId v, NodeTypeId t,
                                                    EdgeTypeId e) const {
  auto all = neighbors_by_type(v, t);
  auto lo = std::lower_bound(
      all.begin(), all.end(), e,
      [](const Neighbor& n, EdgeTypeId key) { return n.edge_type < key; });
  auto hi = std::upper_bound(
      lo, all.end(), e,
      [](EdgeTypeId key, const Neighbor& n) { return key < n.edge_type; });
  return {lo, hi};
}

std::size_t TypedGraph::degree(NodeId v) const {
  auto first = bucket(v, NodeTypeId{0});
  return offsets_[first + schema_.num_node_types()] - offsets_[first];
}

bool TypedGraph::has_edge(NodeId u, NodeId v, EdgeTypeId e) const {
  auto candidates = neighbors_via(u, node_type_[v], e);
  return std::binary_search(
      candidates.begin(), candidates.end(), Neighbor{v, e},
      [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
}

NodeId TypedGraph::Builder::add_node(std::string_view label,
                                     std::string_view type_name) {
  if (label.empty()) throw DataError("empty node label");
  NodeTypeId type;
  if (fixed_schema_) {
    auto found = schema_.find_node_type(type_name);
    if (!found) {
      throw DataError("node type '" + std::string(type_name) +
                      "' is not part of the schema");
    }
    type = *found;
  } else {
    type = schema_.add_node_type(type_name);
  }
  auto [it, inserted] = label_index_.emplace(
      std::string(label), static_cast<NodeId>(labels_.size()));
  if (!inserted) {
    if (node_type_[it->second] != type) {
      throw DataError("node '" + std::string(label) +
                      "' declared with two different types");
    }
    return it->second;
  }
  labels_.emplace_back(label);
  node_type_.push_back(type);
  return it->second;
}

bool TypedGraph::Builder::add_edge(std::string_view src, std::string_view dst,
                                   std::string_view edge_type_name) {
  auto u = label_index_.find(std::string(src));
  if (u == label_index_.end()) {
    throw DataError("edge references unknown node '" + std::string(src) + "'");
  }
  auto v = label_index_.find(std::string(dst));
  if (v == label_index_.end()) {
    throw DataError("edge references unknown node '" + std::string(dst) + "'");
  }
  EdgeTypeId type;
  if (fixed_schema_) {
    auto found = schema_.find_edge_type(edge_type_name);
    if (!found) {
      throw DataError("edge type '" + std::string(edge_type_name) +
                      "' is not part of the schema");
    }
    type = *found;
  } else {
    type = schema_.add_edge_type(edge_type_name, node_type_[u->second],
                                 node_type_[v->second]);
  }
  return add_edge(u->second, v->second, type);
}

bool TypedGraph::Builder::add_edge(NodeId u, NodeId v, EdgeTypeId type) {
  if (u >= labels_.size() || v >= labels_.size()) {
    throw DataError("edge endpoint out of range");
  }
  const auto& info = schema_.edge_type(type);
  if (!info.connects(node_type_[u], node_type_[v])) {
    throw DataError("edge " + labels_[u] + " - " + labels_[v] +
                    " does not match the endpoint types of '" + info.name + "'");
  }
  auto& types = seen_[pair_key(u, v)];
  if (std::find(types.begin(), types.end(), type) != types.end()) return false;
  types.push_back(type);
  edges_.push_back({u, v, type});
  return true;
}

TypedGraph TypedGraph::Builder::build() && {
  TypedGraph g;
  g.schema_ = std::move(schema_);
  g.labels_ = std::move(labels_);
  g.label_index_ = std::move(label_index_);
  g.node_type_ = std::move(node_type_);
  g.edges_ = std::move(edges_);

  const std::size_t n = g.labels_.size();
  const std::size_t types = g.schema_.num_node_types();
  std::vector<std::size_t> counts(n * types + 1, 0);
  for (const auto& e : g.edges_) {
    ++counts[g.bucket(e.u, g.node_type_[e.v])];
    if (e.u != e.v) ++counts[g.bucket(e.v, g.node_type_[e.u])];
  }
  g.offsets_.assign(n * types + 1, 0);
  for (std::size_t b = 0; b < n * types; ++b) {
    g.offsets_[b + 1] = g.offsets_[b] + counts[b];
  }
  g.adjacency_.resize(g.offsets_.back());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : g.edges_) {
    g.adjacency_[cursor[g.bucket(e.u, g.node_type_[e.v])]++] = {e.v, e.type};
    if (e.u != e.v) {
      g.adjacency_[cursor[g.bucket(e.v, g.node_type_[e.u])]++] = {e.u, e.type};
    }
  }
  for (std::size_t b = 0; b < n * types; ++b) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[b]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[b + 1]),
              [](const Neighbor& a, const Neighbor& b) {
                return std::pair(a.edge_type, a.node) <
                       std::pair(b.edge_type, b.node);
              });
  }

  g.nodes_by_type_.assign(types, {});
  g.rank_in_type_.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    auto& members = g.nodes_by_type_[index_of(g.node_type_[v])];
    g.rank_in_type_[v] = members.size();
    members.push_back(v);
  }
  return g;
}

TypedGraph load_graph(const std::filesystem::path& node_file,
                      const std::filesystem::path& edge_file) {
  TypedGraph::Builder builder;

  std::ifstream nodes(node_file);
  if (!nodes) throw DataError("cannot open node file " + node_file.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(nodes, line)) {
    ++line_no;
    auto view = trim_cr(line);
    if (skippable(view)) continue;
    auto fields = split_tabs(view);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw DataError(where(node_file, line_no) +
                      "expected '<label>\\t<node_type>'");
    }
    try {
      builder.add_node(fields[0], fields[1]);
    } catch (const DataError& e) {
      throw DataError(where(node_file, line_no) + e.what());
    }
  }

  std::ifstream edges(edge_file);
  if (!edges) throw DataError("cannot open edge file " + edge_file.string());
  line_no = 0;
  while (std::getline(edges, line)) {
    ++line_no;
    auto view = trim_cr(line);
    if (skippable(view)) continue;
    auto fields = split_tabs(view);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        fields[2].empty()) {
      throw DataError(where(edge_file, line_no) +
                      "expected '<src>\\t<dst>\\t<edge_type>'");
    }
    try {
      builder.add_edge(fields[0], fields[1], fields[2]);
    } catch (const DataError& e) {
      throw DataError(where(edge_file, line_no) + e.what());
    }
  }
  return std::move(builder).build();
}

void save_graph(const TypedGraph& g, const std::filesystem::path& node_file,
                const std::filesystem::path& edge_file) {
  std::ofstream nodes(node_file);
  if (!nodes) throw DataError("cannot write " + node_file.string());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    nodes << g.label(v) << '\t' << g.schema().node_type_name(g.node_type(v))
          << '\n';
  }
  std::ofstream edges(edge_file);
  if (!edges) throw DataError("cannot write " + edge_file.string());
  for (const auto& e : g.edges()) {
    edges << g.label(e.u) << '\t' << g.label(e.v) << '\t'
          << g.schema().edge_type(e.type).name << '\n';
  }
}

}  // namespace mshine
