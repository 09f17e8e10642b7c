#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mshine {

using NodeId = std::uint32_t;

enum class NodeTypeId : std::uint32_t {};
enum class EdgeTypeId : std::uint32_t {};

constexpr std::uint32_t index_of(NodeTypeId t) { return static_cast<std::uint32_t>(t); }
constexpr std::uint32_t index_of(EdgeTypeId t) { return static_cast<std::uint32_t>(t); }

/// Declared endpoint pair of an edge type. `first`/`second` keep the order in
/// which the type was first seen; the pair itself is unordered.
struct EdgeTypeInfo {
  std::string name;
  NodeTypeId first;
  NodeTypeId second;

  bool connects(NodeTypeId a, NodeTypeId b) const {
    return (first == a && second == b) || (first == b && second == a);
  }
  bool is_self_relation() const { return first == second; }
};

struct Neighbor {
  NodeId node;
  EdgeTypeId edge_type;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct Edge {
  NodeId u;
  NodeId v;
  EdgeTypeId type;
};

/// Node and edge types of a network, independent of any instance data.
class Schema {
 public:
  Schema() = default;

  NodeTypeId add_node_type(std::string_view name);
  /// Registers an edge type between two (possibly equal) node types. Throws
  /// DataError if the name is already bound to a different endpoint pair.
  EdgeTypeId add_edge_type(std::string_view name, NodeTypeId a, NodeTypeId b);

  /// Builds a schema from endpoint-type name pairs. Edge types are named by
  /// concatenating the endpoint names, e.g. {"U","M"} -> "UM".
  static Schema from_pairs(
      std::span<const std::pair<std::string, std::string>> pairs);

  std::size_t num_node_types() const { return node_type_names_.size(); }
  std::size_t num_edge_types() const { return edge_types_.size(); }

  const std::string& node_type_name(NodeTypeId t) const {
    return node_type_names_.at(index_of(t));
  }
  const EdgeTypeInfo& edge_type(EdgeTypeId e) const {
    return edge_types_.at(index_of(e));
  }
  const std::vector<EdgeTypeInfo>& edge_types() const { return edge_types_; }
  const std::vector<std::string>& node_type_names() const {
    return node_type_names_;
  }

  std::optional<NodeTypeId> find_node_type(std::string_view name) const;
  std::optional<EdgeTypeId> find_edge_type(std::string_view name) const;

  /// All edge types whose endpoint pair is {a, b}.
  std::vector<EdgeTypeId> edge_types_between(NodeTypeId a, NodeTypeId b) const;

  friend bool operator==(const Schema& lhs, const Schema& rhs) {
    return lhs.node_type_names_ == rhs.node_type_names_ &&
           lhs.edge_types_.size() == rhs.edge_types_.size() &&
           std::equal(lhs.edge_types_.begin(), lhs.edge_types_.end(),
                      rhs.edge_types_.begin(),
                      [](const EdgeTypeInfo& a, const EdgeTypeInfo& b) {
                        return a.name == b.name && a.connects(b.first, b.second);
                      });
  }

 private:
  std::vector<std::string> node_type_names_;
  std::vector<EdgeTypeInfo> edge_types_;
  std::unordered_map<std::string, NodeTypeId> node_type_index_;
  std::unordered_map<std::string, EdgeTypeId> edge_type_index_;
};

/// Undirected typed multigraph. Immutable once built; adjacency is stored as
/// one CSR bucket per (node, neighbor node type), each bucket sorted by
/// (edge type, neighbor).
class TypedGraph {
 public:
  class Builder;

  std::size_t num_nodes() const { return labels_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const Schema& schema() const { return schema_; }

  NodeTypeId node_type(NodeId v) const { return node_type_[v]; }
  const std::string& label(NodeId v) const { return labels_[v]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<NodeId> find_node(std::string_view label) const;

  const std::vector<Edge>& edges() const { return edges_; }

  /// Neighbors of `v` whose node type is `t`. Throws std::out_of_range for an
  /// unknown node type.
  std::span<const Neighbor> neighbors_by_type(NodeId v, NodeTypeId t) const;
  /// Neighbors of `v` of type `t` reached through edge type `e`.
  std::span<const Neighbor> neighbors_via(NodeId v, NodeTypeId t,
                                          EdgeTypeId e) const;
  std::size_t degree(NodeId v) const;

  const std::vector<NodeId>& nodes_of_type(NodeTypeId t) const {
    return nodes_by_type_.at(index_of(t));
  }
  /// Position of `v` within nodes_of_type(node_type(v)).
  std::size_t rank_in_type(NodeId v) const { return rank_in_type_[v]; }

  bool has_edge(NodeId u, NodeId v, EdgeTypeId e) const;

 private:
  std::size_t bucket(NodeId v, NodeTypeId t) const {
    return static_cast<std::size_t>(v) * schema_.num_node_types() + index_of(t);
  }

  Schema schema_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> label_index_;
  std::vector<NodeTypeId> node_type_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<std::vector<NodeId>> nodes_by_type_;
  std::vector<std::size_t> rank_in_type_;
};

/// Incremental construction with validation. Node ids are assigned densely in
/// insertion order.
class TypedGraph::Builder {
 public:
  Builder() = default;
  /// Starts from a fixed schema; edges must then use its edge types.
  explicit Builder(Schema schema) : schema_(std::move(schema)), fixed_schema_(true) {}

  /// Throws DataError on a duplicate label or a label whose type conflicts.
  NodeId add_node(std::string_view label, std::string_view type_name);
  /// Returns false when the edge duplicates an earlier (u, v, type) triple.
  /// Throws DataError on unknown nodes or inconsistent endpoint types.
  bool add_edge(std::string_view src, std::string_view dst,
                std::string_view edge_type_name);
  bool add_edge(NodeId u, NodeId v, EdgeTypeId type);

  const Schema& schema() const { return schema_; }
  TypedGraph build() &&;

 private:
  Schema schema_;
  bool fixed_schema_ = false;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> label_index_;
  std::vector<NodeTypeId> node_type_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::vector<EdgeTypeId>> seen_;
};

/// Reads the tab-separated node and edge files. Errors carry the file name and
/// 1-based line number.
TypedGraph load_graph(const std::filesystem::path& node_file,
                      const std::filesystem::path& edge_file);

/// Writes the graph back in the input formats.
void save_graph(const TypedGraph& g, const std::filesystem::path& node_file,
                const std::filesystem::path& edge_file);

inline const Schema& schema_of(const TypedGraph& g) { return g.schema(); }

}  // namespace mshine
