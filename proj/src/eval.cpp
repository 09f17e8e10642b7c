#include "mshine/eval.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "mshine/error.hpp"
#include "mshine/trainer.hpp"

namespace mshine {

namespace {

NodeTypeId other_endpoint(const TypedGraph& g, NodeId query, EdgeTypeId edge_type) {
  const auto& info = g.schema().edge_type(edge_type);
  const auto qt = g.node_type(query);
  if (info.first == qt) return info.second;
  if (info.second == qt) return info.first;
  throw DataError("node '" + g.label(query) + "' cannot be an endpoint of '" +
                  info.name + "'");
}

}  // namespace

RelevanceScorer::RelevanceScorer(const ModelParams& params, const TypedGraph& g,
                                 const TripleIndex& index, NodeId query,
                                 EdgeTypeId edge_type)
    : params_(&params), candidate_type_(other_endpoint(g, query, edge_type)) {
  const auto query_type = g.node_type(query);
  for (std::size_t t = 0; t < index.size(); ++t) {
    const auto& type = index.type(t);
    if (type.center != query_type || type.second_edge != edge_type ||
        type.next != candidate_type_) {
      continue;
    }
    const auto preds = g.neighbors_via(query, type.prev, type.first_edge);
    for (auto path : index.paths_of(t)) {
      LinkContext ctx{path, t, {}};
      if (preds.empty()) {
        ctx.states.push_back(decode_state(params, query, path));
      }
      for (const auto& pred : preds) {
        ctx.states.push_back(forward(params, pred.node, query, t, path).state);
      }
      contexts_.push_back(std::move(ctx));
    }
  }
  if (contexts_.empty()) {
    throw DataError("no selected meta-path predicts '" +
                    g.schema().edge_type(edge_type).name + "' from node '" +
                    g.label(query) + "'");
  }
}

double RelevanceScorer::relevance(NodeId candidate) const {
  double total = 0.0;
  for (const auto& ctx : contexts_) {
    double sum = 0.0;
    for (const auto& s : ctx.states) {
      sum += log_sigmoid(score(*params_, s, candidate, ctx.path));
    }
    total += sum / static_cast<double>(ctx.states.size());
  }
  return total / static_cast<double>(contexts_.size());
}

double relevance(const ModelParams& params, const TypedGraph& g,
                 const TripleIndex& index, NodeId query, NodeId candidate,
                 EdgeTypeId edge_type) {
  return RelevanceScorer(params, g, index, query, edge_type).relevance(candidate);
}

std::vector<NodeId> rank_by_scores(std::span<const NodeId> candidates,
                                   std::span<const double> scores) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return candidates[a] < candidates[b];
  });
  std::vector<NodeId> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(candidates[i]);
  return out;
}

RankingResult rank_candidates(const ModelParams& params, const TypedGraph& g,
                              const TripleIndex& index, NodeId query,
                              EdgeTypeId edge_type) {
  RelevanceScorer scorer(params, g, index, query, edge_type);
  std::vector<NodeId> candidates;
  std::vector<double> scores;
  for (NodeId c : g.nodes_of_type(scorer.candidate_type())) {
    if (c == query || g.has_edge(query, c, edge_type)) continue;
    candidates.push_back(c);
    scores.push_back(scorer.relevance(c));
  }
  RankingResult r;
  r.query = query;
  r.ranked = rank_by_scores(candidates, scores);
  return r;
}

std::vector<HeldOutEdge> load_heldout(const std::filesystem::path& file,
                                      const TypedGraph& g, EdgeTypeId edge_type) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open held-out file " + file.string());
  const auto& name = g.schema().edge_type(edge_type).name;
  std::vector<HeldOutEdge> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto where = file.string() + ":" + std::to_string(line_no) + ": ";
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      throw DataError(where + "expected '<src>\\t<dst>\\t<edge_type>'");
    }
    auto src = g.find_node(line.substr(0, t1));
    auto dst = g.find_node(line.substr(t1 + 1, t2 - t1 - 1));
    if (!src || !dst) throw DataError(where + "unknown node");
    if (line.substr(t2 + 1) != name) continue;
    if (!g.schema().edge_type(edge_type).connects(g.node_type(*src),
                                                  g.node_type(*dst))) {
      throw DataError(where + "endpoint types do not match '" + name + "'");
    }
    out.push_back({*src, *dst});
  }
  return out;
}

std::vector<RankingResult> rank_heldout(const ModelParams& params,
                                        const TypedGraph& g,
                                        const TripleIndex& index,
                                        std::span<const HeldOutEdge> heldout,
                                        EdgeTypeId edge_type) {
  std::vector<NodeId> queries;
  std::unordered_map<NodeId, std::vector<NodeId>> relevant;
  for (const auto& e : heldout) {
    auto [it, inserted] = relevant.try_emplace(e.query);
    if (inserted) queries.push_back(e.query);
    it->second.push_back(e.target);
  }
  std::vector<RankingResult> out;
  out.reserve(queries.size());
  for (NodeId q : queries) {
    auto r = rank_candidates(params, g, index, q, edge_type);
    std::unordered_set<NodeId> ranked(r.ranked.begin(), r.ranked.end());
    for (NodeId t : relevant[q]) {
      if (ranked.contains(t)) r.relevant.insert(t);
    }
    out.push_back(std::move(r));
  }
  return out;
}

LinkReport link_report(std::span<const RankingResult> results,
                       std::span<const std::size_t> ks) {
  LinkReport rep;
  rep.ks.assign(ks.begin(), ks.end());
  for (auto k : ks) {
    rep.precision.push_back(mean_precision_at_k(results, k));
    rep.recall.push_back(mean_recall_at_k(results, k));
    rep.map.push_back(map_score(results, k));
  }
  rep.mrr = mrr_score(results);
  double random = 0.0;
  for (const auto& r : results) {
    if (r.relevant.empty()) continue;
    ++rep.queries;
    random += random_expected_rr(r.ranked.size(), r.relevant.size());
  }
  rep.random_mrr = rep.queries == 0 ? 0.0 : random / static_cast<double>(rep.queries);
  return rep;
}

}  // namespace mshine
