#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mshine/graph.hpp"

namespace mshine {

/// Symmetric sequence of node types joined by edge types. The id alternates
/// node and edge type names separated by ':', e.g. "U:UM:M:MA:A:MA:M:UM:U".
struct MetaPath {
  std::vector<NodeTypeId> node_types;
  std::vector<EdgeTypeId> edge_types;
  std::string id;

  std::size_t length() const { return node_types.size(); }

  friend bool operator==(const MetaPath& a, const MetaPath& b) {
    return a.node_types == b.node_types && a.edge_types == b.edge_types;
  }
};

/// Type of a three-element walk: prev type, first edge type, center type,
/// second edge type, next type. Direction matters (U-M-A != A-M-U).
struct TripleType {
  NodeTypeId prev;
  EdgeTypeId first_edge;
  NodeTypeId center;
  EdgeTypeId second_edge;
  NodeTypeId next;

  friend auto operator<=>(const TripleType&, const TripleType&) = default;
};

using TripleSet = std::set<TripleType>;

/// Builds a MetaPath from types, checking every step against the schema and
/// requiring the path to read the same backwards. Throws DataError.
MetaPath make_metapath(const Schema& schema, std::vector<NodeTypeId> node_types,
                       std::vector<EdgeTypeId> edge_types);

/// Parses either the full id form ("A:PA:P:PA:A") or the node-types-only form
/// ("A:P:A"), which is accepted when each consecutive pair has exactly one
/// edge type. Throws DataError.
MetaPath parse_metapath(const Schema& schema, std::string_view text);

std::string triple_id(const Schema& schema, const TripleType& t);

/// Triple types seen while walking the meta-path back and forth forever.
/// Throws std::invalid_argument for paths shorter than three node types.
TripleSet decompose(const MetaPath& m);

/// Every palindromic meta-path whose half length (edges from the first node
/// type to the center, a center edge counting as one) is at most
/// `max_half_len`. Paths of fewer than three node types are not produced; a
/// self-relation appears as its three-node spelling T:E:T:E:T.
std::vector<MetaPath> enumerate_symmetric(const Schema& schema,
                                          std::size_t max_half_len);

/// Enumeration bound used by select_initial when none is given.
inline std::size_t default_max_half_len(const Schema& schema) {
  return schema.num_edge_types() + 1;
}

/// Initial meta-path set, sorted by id:
///  1. symmetric paths whose half walk does not revisit a node type,
///  2. one path per distinct TripleSet, the shortest (then smallest id) kept,
///  3. paths whose TripleSet is a proper subset of another's dropped.
std::vector<MetaPath> select_initial(const Schema& schema,
                                     std::optional<std::size_t> max_half_len = {});

/// Dense numbering of all triple types used by a list of meta-paths, plus the
/// path <-> triple-type incidence. Triple ids are assigned in id-string order.
class TripleIndex {
 public:
  TripleIndex() = default;
  TripleIndex(const Schema& schema, const std::vector<MetaPath>& paths);

  std::size_t size() const { return types_.size(); }
  std::size_t num_paths() const { return triples_of_path_.size(); }

  const TripleType& type(std::size_t i) const { return types_.at(i); }
  const std::string& id(std::size_t i) const { return ids_.at(i); }
  std::optional<std::size_t> find(const TripleType& t) const;

  /// Meta-path indices whose decomposition contains triple type `i`.
  const std::vector<std::size_t>& paths_of(std::size_t i) const {
    return paths_of_triple_.at(i);
  }
  /// Triple indices of path `p`, ascending.
  const std::vector<std::size_t>& triples_of(std::size_t p) const {
    return triples_of_path_.at(p);
  }

 private:
  std::vector<TripleType> types_;
  std::vector<std::string> ids_;
  std::map<TripleType, std::size_t> lookup_;
  std::vector<std::vector<std::size_t>> paths_of_triple_;
  std::vector<std::vector<std::size_t>> triples_of_path_;
};

/// Map from triple id to the ids of the meta-paths containing it.
std::map<std::string, std::vector<std::string>> triple_types_of(
    const Schema& schema, const std::vector<MetaPath>& paths);

}  // namespace mshine
