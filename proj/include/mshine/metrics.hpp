#pragma once

#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "mshine/graph.hpp"

namespace mshine {

/// Candidates in descending relevance, with the held-out true neighbors.
struct RankingResult {
  NodeId query = 0;
  std::vector<NodeId> ranked;
  std::unordered_set<NodeId> relevant;
};

/// Number of relevant nodes in the first min(k, |ranked|) positions.
std::size_t hits_at_k(const RankingResult& r, std::size_t k);

/// hits@k / k, with k clipped to the ranking length. k must be >= 1.
double precision_at_k(const RankingResult& r, std::size_t k);

/// hits@k / |relevant|; nullopt when nothing is relevant.
std::optional<double> recall_at_k(const RankingResult& r, std::size_t k);

/// (1/k) * sum_{j<=k} Pre@j * relevant@j, k clipped to the ranking length.
double average_precision_at_k(const RankingResult& r, std::size_t k);

/// 1 / position of the first relevant node, 0 when none is ranked.
double reciprocal_rank(const RankingResult& r);

/// Means over queries with a non-empty relevant set. Return 0 when no query
/// qualifies.
double map_score(std::span<const RankingResult> results, std::size_t k);
double mrr_score(std::span<const RankingResult> results);
double mean_precision_at_k(std::span<const RankingResult> results, std::size_t k);
double mean_recall_at_k(std::span<const RankingResult> results, std::size_t k);

/// Expected reciprocal rank of the first relevant node when `relevant` of
/// `total` candidates are placed uniformly at random.
double random_expected_rr(std::size_t total, std::size_t relevant);

}  // namespace mshine
