#pragma once

#include <filesystem>
#include <vector>

#include "mshine/metapath.hpp"
#include "mshine/metrics.hpp"
#include "mshine/model.hpp"

namespace mshine {

/// One (meta-path, triple type) pair in which the query sits at the center
/// and the candidate is the predicted next node.
struct LinkContext {
  std::size_t path;
  std::size_t triple_type;
  /// One state per valid predecessor of the query, or the query's own
  /// decoded stored state when it has none.
  std::vector<Vec> states;
};

/// Relevance of candidates to a fixed query for one predicted edge type:
/// the uniform mean over contexts of the mean over predecessor states of
/// log s(score).
class RelevanceScorer {
 public:
  /// Throws DataError when no selected meta-path has a matching context.
  RelevanceScorer(const ModelParams& params, const TypedGraph& g,
                  const TripleIndex& index, NodeId query, EdgeTypeId edge_type);

  double relevance(NodeId candidate) const;
  NodeTypeId candidate_type() const { return candidate_type_; }
  const std::vector<LinkContext>& contexts() const { return contexts_; }

 private:
  const ModelParams* params_;
  NodeTypeId candidate_type_;
  std::vector<LinkContext> contexts_;
};

double relevance(const ModelParams& params, const TypedGraph& g,
                 const TripleIndex& index, NodeId query, NodeId candidate,
                 EdgeTypeId edge_type);

/// Sorts `candidates` by descending score, ties by ascending node id.
std::vector<NodeId> rank_by_scores(std::span<const NodeId> candidates,
                                   std::span<const double> scores);

/// Ranks every node of the edge type's other endpoint type, except the query
/// and nodes already linked to it through `edge_type` in `g`.
RankingResult rank_candidates(const ModelParams& params, const TypedGraph& g,
                              const TripleIndex& index, NodeId query,
                              EdgeTypeId edge_type);

struct LinkReport {
  std::vector<std::size_t> ks;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> map;
  double mrr = 0.0;
  /// Mean over queries of the expected MRR of a uniformly random ranking.
  double random_mrr = 0.0;
  std::size_t queries = 0;
};

struct HeldOutEdge {
  NodeId query;
  NodeId target;
};

/// Reads held-out edges (edge-file format) for one edge type. The first
/// column is the query. Throws DataError on unknown nodes or types.
std::vector<HeldOutEdge> load_heldout(const std::filesystem::path& file,
                                      const TypedGraph& g, EdgeTypeId edge_type);

/// Ranks candidates for every distinct query, in order of first appearance.
std::vector<RankingResult> rank_heldout(const ModelParams& params,
                                        const TypedGraph& g,
                                        const TripleIndex& index,
                                        std::span<const HeldOutEdge> heldout,
                                        EdgeTypeId edge_type);

LinkReport link_report(std::span<const RankingResult> results,
                       std::span<const std::size_t> ks);

}  // namespace mshine
