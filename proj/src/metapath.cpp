#include "mshine/metapath.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "mshine/error.hpp"

namespace mshine {

namespace {

std::string path_id(const Schema& schema, const std::vector<NodeTypeId>& nodes,
                    const std::vector<EdgeTypeId>& edges) {
  std::string id = schema.node_type_name(nodes.front());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    id += ':';
    id += schema.edge_type(edges[i]).name;
    id += ':';
    id += schema.node_type_name(nodes[i + 1]);
  }
  return id;
}

std::vector<std::string_view> split_colons(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(':', start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

struct HalfWalk {
  std::vector<NodeTypeId> nodes;
  std::vector<EdgeTypeId> edges;
};

MetaPath odd_palindrome(const Schema& schema, const HalfWalk& w) {
  std::vector<NodeTypeId> nodes = w.nodes;
  nodes.insert(nodes.end(), w.nodes.rbegin() + 1, w.nodes.rend());
  std::vector<EdgeTypeId> edges = w.edges;
  edges.insert(edges.end(), w.edges.rbegin(), w.edges.rend());
  auto id = path_id(schema, nodes, edges);
  return {std::move(nodes), std::move(edges), std::move(id)};
}

MetaPath even_palindrome(const Schema& schema, const HalfWalk& w,
                         EdgeTypeId center) {
  std::vector<NodeTypeId> nodes = w.nodes;
  nodes.insert(nodes.end(), w.nodes.rbegin(), w.nodes.rend());
  std::vector<EdgeTypeId> edges = w.edges;
  edges.push_back(center);
  edges.insert(edges.end(), w.edges.rbegin(), w.edges.rend());
  auto id = path_id(schema, nodes, edges);
  return {std::move(nodes), std::move(edges), std::move(id)};
}

// Depth-first over half walks. With `simple`, a walk may not revisit a node
// type, except the single self-relation step T-T that spells the two-node
// palindrome T:E:T in three nodes.
std::vector<MetaPath> palindromes(const Schema& schema, std::size_t max_half_len,
                                  bool simple) {
  std::vector<MetaPath> out;
  if (max_half_len == 0) return out;

  // Adjacent (edge type, node type) steps from every node type.
  std::vector<std::vector<std::pair<EdgeTypeId, NodeTypeId>>> steps(
      schema.num_node_types());
  for (std::uint32_t e = 0; e < schema.num_edge_types(); ++e) {
    const auto& info = schema.edge_types()[e];
    auto id = static_cast<EdgeTypeId>(e);
    steps[index_of(info.first)].emplace_back(id, info.second);
    if (!info.is_self_relation()) {
      steps[index_of(info.second)].emplace_back(id, info.first);
    }
  }

  HalfWalk walk;
  std::function<void()> extend = [&] {
    const std::size_t edges_so_far = walk.edges.size();
    const NodeTypeId last = walk.nodes.back();
    if (edges_so_far >= 1) out.push_back(odd_palindrome(schema, walk));
    // Even palindromes need at least four nodes; half length = edges + 1.
    if (edges_so_far >= 1 && edges_so_far + 1 <= max_half_len) {
      for (const auto& [e, t] : steps[index_of(last)]) {
        if (t == last) out.push_back(even_palindrome(schema, walk, e));
      }
    }
    if (edges_so_far == max_half_len) return;
    for (const auto& [e, t] : steps[index_of(last)]) {
      if (simple) {
        bool revisits =
            std::find(walk.nodes.begin(), walk.nodes.end(), t) != walk.nodes.end();
        bool self_step = edges_so_far == 0 && t == last;
        if (revisits && !self_step) continue;
        if (self_step) {
          // T:E:T:E:T is terminal; do not grow it further.
          walk.nodes.push_back(t);
          walk.edges.push_back(e);
          out.push_back(odd_palindrome(schema, walk));
          walk.nodes.pop_back();
          walk.edges.pop_back();
          continue;
        }
      }
      walk.nodes.push_back(t);
      walk.edges.push_back(e);
      extend();
      walk.nodes.pop_back();
      walk.edges.pop_back();
    }
  };

  for (std::uint32_t t = 0; t < schema.num_node_types(); ++t) {
    walk.nodes = {static_cast<NodeTypeId>(t)};
    walk.edges.clear();
    extend();
  }
  return out;
}

}  // namespace

MetaPath make_metapath(const Schema& schema, std::vector<NodeTypeId> node_types,
                       std::vector<EdgeTypeId> edge_types) {
  if (node_types.empty() || edge_types.size() + 1 != node_types.size()) {
    throw DataError("meta-path needs exactly one edge type between node types");
  }
  if (node_types.size() < 3) {
    throw DataError("meta-path needs at least three node types");
  }
  for (auto t : node_types) {
    if (index_of(t) >= schema.num_node_types()) {
      throw DataError("meta-path uses an unknown node type");
    }
  }
  for (std::size_t i = 0; i < edge_types.size(); ++i) {
    if (index_of(edge_types[i]) >= schema.num_edge_types() ||
        !schema.edge_type(edge_types[i]).connects(node_types[i],
                                                  node_types[i + 1])) {
      throw DataError("meta-path step " + std::to_string(i) +
                      " is not an edge type of the schema");
    }
  }
  if (!std::equal(node_types.begin(), node_types.end(), node_types.rbegin()) ||
      !std::equal(edge_types.begin(), edge_types.end(), edge_types.rbegin())) {
    throw DataError("meta-path " + path_id(schema, node_types, edge_types) +
                    " is not symmetric");
  }
  auto id = path_id(schema, node_types, edge_types);
  return {std::move(node_types), std::move(edge_types), std::move(id)};
}

MetaPath parse_metapath(const Schema& schema, std::string_view text) {
  auto parts = split_colons(text);
  auto node_type = [&](std::string_view name) {
    auto t = schema.find_node_type(name);
    if (!t) throw DataError("unknown node type '" + std::string(name) + "'");
    return *t;
  };

  std::vector<NodeTypeId> nodes;
  std::vector<EdgeTypeId> edges;
  bool full_form = parts.size() >= 3 && parts.size() % 2 == 1 &&
                   schema.find_edge_type(parts[1]).has_value() &&
                   !schema.find_node_type(parts[1]).has_value();
  if (full_form) {
    for (std::size_t i = 0; i < parts.size(); i += 2) {
      nodes.push_back(node_type(parts[i]));
    }
    for (std::size_t i = 1; i < parts.size(); i += 2) {
      auto e = schema.find_edge_type(parts[i]);
      if (!e) throw DataError("unknown edge type '" + std::string(parts[i]) + "'");
      edges.push_back(*e);
    }
  } else {
    for (auto part : parts) nodes.push_back(node_type(part));
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      auto between = schema.edge_types_between(nodes[i], nodes[i + 1]);
      if (between.size() != 1) {
        throw DataError("cannot infer the edge type between " +
                        schema.node_type_name(nodes[i]) + " and " +
                        schema.node_type_name(nodes[i + 1]) + " in '" +
                        std::string(text) + "'");
      }
      edges.push_back(between.front());
    }
  }
  if (nodes.size() == 2 && nodes[0] == nodes[1]) {
    // T:E:T walked back and forth is T:E:T:E:T.
    nodes.push_back(nodes[0]);
    edges.push_back(edges[0]);
  }
  return make_metapath(schema, std::move(nodes), std::move(edges));
}

std::string triple_id(const Schema& schema, const TripleType& t) {
  return schema.node_type_name(t.prev) + ':' +
         schema.edge_type(t.first_edge).name + ':' +
         schema.node_type_name(t.center) + ':' +
         schema.edge_type(t.second_edge).name + ':' +
         schema.node_type_name(t.next);
}

TripleSet decompose(const MetaPath& m) {
  if (m.length() < 3) {
    throw std::invalid_argument("meta-path " + m.id +
                                " has fewer than three node types");
  }
  // Walking a palindrome back and forth repeats it with period length-1, so
  // the node at walk position i is node_types[i mod period].
  const std::size_t period = m.length() - 1;
  TripleSet out;
  for (std::size_t i = 0; i < period; ++i) {
    out.insert({m.node_types[i], m.edge_types[i],
                m.node_types[(i + 1) % period], m.edge_types[(i + 1) % period],
                m.node_types[(i + 2) % period]});
  }
  return out;
}

std::vector<MetaPath> enumerate_symmetric(const Schema& schema,
                                          std::size_t max_half_len) {
  auto out = palindromes(schema, max_half_len, false);
  std::sort(out.begin(), out.end(),
            [](const MetaPath& a, const MetaPath& b) { return a.id < b.id; });
  return out;
}

std::vector<MetaPath> select_initial(const Schema& schema,
                                     std::optional<std::size_t> max_half_len) {
  auto candidates = palindromes(
      schema, max_half_len.value_or(default_max_half_len(schema)), true);
  std::sort(candidates.begin(), candidates.end(),
            [](const MetaPath& a, const MetaPath& b) {
              return std::pair(a.length(), std::string_view(a.id)) <
                     std::pair(b.length(), std::string_view(b.id));
            });

  std::vector<std::pair<TripleSet, MetaPath>> unique;
  for (auto& m : candidates) {
    auto set = decompose(m);
    bool seen = std::any_of(unique.begin(), unique.end(),
                            [&](const auto& u) { return u.first == set; });
    if (!seen) unique.emplace_back(std::move(set), std::move(m));
  }

  auto proper_subset = [](const TripleSet& a, const TripleSet& b) {
    return a.size() < b.size() &&
           std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  std::vector<MetaPath> selected;
  for (const auto& [set, m] : unique) {
    bool contained = std::any_of(unique.begin(), unique.end(), [&](const auto& u) {
      return proper_subset(set, u.first);
    });
    if (!contained) selected.push_back(m);
  }
  std::sort(selected.begin(), selected.end(),
            [](const MetaPath& a, const MetaPath& b) { return a.id < b.id; });
  return selected;
}

TripleIndex::TripleIndex(const Schema& schema, const std::vector<MetaPath>& paths) {
  std::vector<TripleSet> sets;
  sets.reserve(paths.size());
  std::map<std::string, TripleType> by_id;
  for (const auto& m : paths) {
    sets.push_back(decompose(m));
    for (const auto& t : sets.back()) by_id.emplace(triple_id(schema, t), t);
  }
  for (auto& [id, t] : by_id) {
    lookup_.emplace(t, types_.size());
    types_.push_back(t);
    ids_.push_back(id);
  }
  paths_of_triple_.assign(types_.size(), {});
  triples_of_path_.assign(paths.size(), {});
  for (std::size_t p = 0; p < paths.size(); ++p) {
    for (const auto& t : sets[p]) {
      auto i = lookup_.at(t);
      paths_of_triple_[i].push_back(p);
      triples_of_path_[p].push_back(i);
    }
    std::sort(triples_of_path_[p].begin(), triples_of_path_[p].end());
  }
}

std::optional<std::size_t> TripleIndex::find(const TripleType& t) const {
  auto it = lookup_.find(t);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::map<std::string, std::vector<std::string>> triple_types_of(
    const Schema& schema, const std::vector<MetaPath>& paths) {
  std::map<std::string, std::vector<std::string>> out;
  if (paths.empty()) return out;
  TripleIndex index(schema, paths);
  for (std::size_t i = 0; i < index.size(); ++i) {
    auto& ids = out[index.id(i)];
    for (auto p : index.paths_of(i)) ids.push_back(paths[p].id);
  }
  return out;
}

}  // namespace mshine
