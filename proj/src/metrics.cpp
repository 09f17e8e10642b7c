#include "mshine/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace mshine {

namespace {

std::size_t clip(const RankingResult& r, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  return std::min(k, r.ranked.size());
}

bool is_relevant(const RankingResult& r, std::size_t pos) {
  return r.relevant.contains(r.ranked[pos]);
}

template <typename F>
double mean_over_relevant(std::span<const RankingResult> results, F metric) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : results) {
    if (r.relevant.empty()) continue;
    sum += metric(r);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

}  // namespace

std::size_t hits_at_k(const RankingResult& r, std::size_t k) {
  const auto limit = clip(r, k);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < limit; ++i) hits += is_relevant(r, i) ? 1 : 0;
  return hits;
}

double precision_at_k(const RankingResult& r, std::size_t k) {
  const auto limit = clip(r, k);
  if (limit == 0) return 0.0;
  return static_cast<double>(hits_at_k(r, k)) / static_cast<double>(limit);
}

std::optional<double> recall_at_k(const RankingResult& r, std::size_t k) {
  if (r.relevant.empty()) return std::nullopt;
  return static_cast<double>(hits_at_k(r, k)) /
         static_cast<double>(r.relevant.size());
}

double average_precision_at_k(const RankingResult& r, std::size_t k) {
  const auto limit = clip(r, k);
  if (limit == 0) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t j = 0; j < limit; ++j) {
    if (!is_relevant(r, j)) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(j + 1);
  }
  return sum / static_cast<double>(limit);
}

double reciprocal_rank(const RankingResult& r) {
  for (std::size_t i = 0; i < r.ranked.size(); ++i) {
    if (is_relevant(r, i)) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double map_score(std::span<const RankingResult> results, std::size_t k) {
  return mean_over_relevant(
      results, [k](const RankingResult& r) { return average_precision_at_k(r, k); });
}

double mrr_score(std::span<const RankingResult> results) {
  return mean_over_relevant(results, reciprocal_rank);
}

double mean_precision_at_k(std::span<const RankingResult> results, std::size_t k) {
  return mean_over_relevant(
      results, [k](const RankingResult& r) { return precision_at_k(r, k); });
}

double mean_recall_at_k(std::span<const RankingResult> results, std::size_t k) {
  return mean_over_relevant(
      results, [k](const RankingResult& r) { return *recall_at_k(r, k); });
}

double random_expected_rr(std::size_t total, std::size_t relevant) {
  if (relevant == 0 || total == 0) return 0.0;
  relevant = std::min(relevant, total);
  // P(first relevant at position i) = C(total-i, relevant-1) / C(total, relevant)
  // computed as a running product: P(no relevant in the first i-1 positions)
  // times P(position i relevant | that).
  double expected = 0.0;
  double none_before = 1.0;
  for (std::size_t i = 1; i <= total - relevant + 1; ++i) {
    const double remaining = static_cast<double>(total - i + 1);
    const double here = static_cast<double>(relevant) / remaining;
    expected += none_before * here / static_cast<double>(i);
    none_before *= 1.0 - here;
  }
  return expected;
}

}  // namespace mshine
