#include "mshine/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "mshine/error.hpp"

namespace mshine {

namespace {

std::size_t uniform_index(std::size_t n, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

#ifdef NDEBUG
constexpr std::uint64_t kValidateEvery = 100;
#else
constexpr std::uint64_t kValidateEvery = 1;
#endif

}  // namespace

std::optional<NodeId> walk_step(const TypedGraph& g, NodeId v,
                                NodeTypeId next_type, EdgeTypeId edge_type,
                                Rng& rng) {
  auto candidates = g.neighbors_via(v, next_type, edge_type);
  if (candidates.empty()) return std::nullopt;
  return candidates[uniform_index(candidates.size(), rng)].node;
}

bool matches(const TypedGraph& g, const TripleType& t, NodeId prev, NodeId mid,
             NodeId next) {
  const auto n = g.num_nodes();
  if (prev >= n || mid >= n || next >= n) return false;
  return g.node_type(prev) == t.prev && g.node_type(mid) == t.center &&
         g.node_type(next) == t.next && g.has_edge(prev, mid, t.first_edge) &&
         g.has_edge(mid, next, t.second_edge);
}

TripleSampler::TripleSampler(const TypedGraph& g, const TripleIndex& index,
                             NegativeDistribution neg)
    : graph_(&g), index_(&index), neg_(neg) {
  starts_.resize(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto& t = index.type(i);
    for (NodeId a : g.nodes_of_type(t.prev)) {
      for (const auto& b : g.neighbors_via(a, t.center, t.first_edge)) {
        if (has_continuation(b.node, t)) {
          starts_[i].push_back(a);
          break;
        }
      }
    }
  }
  if (neg_ == NegativeDistribution::kDegree75) {
    for (std::uint32_t t = 0; t < g.schema().num_node_types(); ++t) {
      const auto& members = g.nodes_of_type(static_cast<NodeTypeId>(t));
      std::vector<double> cumulative;
      cumulative.reserve(members.size());
      double total = 0.0;
      for (NodeId v : members) {
        total += std::pow(static_cast<double>(g.degree(v)), 0.75);
        cumulative.push_back(total);
      }
      degree_cumulative_.push_back(std::move(cumulative));
    }
  }
}

bool TripleSampler::has_continuation(NodeId mid, const TripleType& t) const {
  return !graph_->neighbors_via(mid, t.next, t.second_edge).empty();
}

std::optional<TrainingTriple> TripleSampler::sample_triple(
    std::size_t triple_type, std::uint32_t metapath, Rng& rng) const {
  const auto& starts = starts_.at(triple_type);
  if (starts.empty()) return std::nullopt;
  const auto& t = index_->type(triple_type);
  NodeId prev = starts[uniform_index(starts.size(), rng)];
  // Redraw the middle step until it can continue; at least one such neighbor
  // exists for every eligible start.
  while (true) {
    auto mid = walk_step(*graph_, prev, t.center, t.first_edge, rng);
    if (!mid) return std::nullopt;
    auto next = walk_step(*graph_, *mid, t.next, t.second_edge, rng);
    if (next) {
      return TrainingTriple{prev, *mid, *next,
                            static_cast<std::uint32_t>(triple_type), metapath};
    }
  }
}

std::vector<NodeId> TripleSampler::negative_sample(NodeId positive,
                                                   std::size_t k,
                                                   Rng& rng) const {
  std::vector<NodeId> out;
  negative_sample_into(positive, k, rng, out);
  return out;
}

void TripleSampler::negative_sample_into(NodeId positive, std::size_t k,
                                         Rng& rng,
                                         std::vector<NodeId>& out) const {
  const auto type = graph_->node_type(positive);
  const auto& members = graph_->nodes_of_type(type);
  if (members.size() < 2) {
    throw NegativeSamplingError(
        "node type '" + graph_->schema().node_type_name(type) +
        "' has no member besides the positive; skip this triple");
  }
  const std::size_t skip = graph_->rank_in_type(positive);

  if (neg_ == NegativeDistribution::kDegree75) {
    const auto& cumulative = degree_cumulative_[index_of(type)];
    const double total = cumulative.back();
    const double own = cumulative[skip] - (skip > 0 ? cumulative[skip - 1] : 0.0);
    if (total - own > 0.0) {
      std::uniform_real_distribution<double> unit(0.0, total);
      for (std::size_t i = 0; i < k; ++i) {
        std::size_t r;
        do {
          auto it = std::upper_bound(cumulative.begin(), cumulative.end(), unit(rng));
          r = std::min<std::size_t>(
              static_cast<std::size_t>(it - cumulative.begin()), members.size() - 1);
        } while (r == skip);
        out.push_back(members[r]);
      }
      return;
    }
    // Every other member has degree zero; fall back to uniform.
  }
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t r = uniform_index(members.size() - 1, rng);
    if (r >= skip) ++r;
    out.push_back(members[r]);
  }
}

std::vector<std::size_t> auto_samples_per_type(const TypedGraph& g,
                                               const TripleIndex& index) {
  std::vector<std::size_t> sharing(g.schema().num_node_types(), 0);
  for (std::size_t i = 0; i < index.size(); ++i) {
    ++sharing[index_of(index.type(i).center)];
  }
  std::vector<std::size_t> out(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    auto center = index.type(i).center;
    auto members = g.nodes_of_type(center).size();
    auto share = sharing[index_of(center)];
    out[i] = std::max<std::size_t>(1, (members + share - 1) / share);
  }
  return out;
}

BatchStream::BatchStream(const TripleSampler& sampler,
                         const std::vector<MetaPath>& paths,
                         const StreamConfig& config, std::size_t worker,
                         std::size_t workers)
    : sampler_(&sampler), config_(config), rng_(config.seed) {
  if (config_.batch_size == 0) {
    throw std::invalid_argument("batch_size must be at least 1");
  }
  if (workers == 0 || worker >= workers) {
    throw std::invalid_argument("invalid worker partition");
  }
  const auto& g = sampler.graph();
  const auto& index = sampler.index();
  if (index.num_paths() != paths.size()) {
    throw std::invalid_argument("triple index built for a different path list");
  }
  samples_ = config_.samples_per_type > 0
                 ? std::vector<std::size_t>(index.size(), config_.samples_per_type)
                 : auto_samples_per_type(g, index);

  std::vector<bool> warned(index.size(), false);
  std::size_t position = 0;
  for (std::uint32_t p = 0; p < paths.size(); ++p) {
    for (auto t : index.triples_of(p)) {
      const auto& type = index.type(t);
      bool feasible = !sampler.eligible_starts(t).empty() &&
                      g.nodes_of_type(type.next).size() >= 2;
      if (!feasible) {
        if (!warned[t] && worker == 0) {
          spdlog::warn("skipping triple type {}: {}", index.id(t),
                       sampler.eligible_starts(t).empty()
                           ? "no eligible start node"
                           : "target type has a single node");
        }
        warned[t] = true;
        continue;
      }
      if (position++ % workers != worker) continue;
      std::size_t batches =
          (samples_[t] + config_.batch_size - 1) / config_.batch_size;
      plan_.push_back({p, static_cast<std::uint32_t>(t), batches});
    }
  }
}

std::size_t BatchStream::batches_per_epoch() const {
  std::size_t total = 0;
  for (const auto& e : plan_) total += e.batches;
  return total;
}

bool BatchStream::next(Batch& out) {
  if (entry_ >= plan_.size()) {
    entry_ = 0;
    batch_in_entry_ = 0;
    return false;
  }
  const auto& e = plan_[entry_];
  const auto& g = sampler_->graph();
  const auto& type = sampler_->index().type(e.triple_type);

  out.metapath = e.metapath;
  out.triple_type = e.triple_type;
  out.negative_k = config_.negative_k;
  out.triples.clear();
  out.negatives.clear();
  while (out.triples.size() < config_.batch_size) {
    auto triple = sampler_->sample_triple(e.triple_type, e.metapath, rng_);
    if (!triple) throw std::logic_error("planned triple type cannot be sampled");
    if (emitted_++ % kValidateEvery == 0 &&
        !matches(g, type, triple->prev, triple->mid, triple->next)) {
      throw std::logic_error("sampled triple violates its type");
    }
    out.triples.push_back(*triple);
    sampler_->negative_sample_into(triple->next, config_.negative_k, rng_,
                                   out.negatives);
  }

  if (++batch_in_entry_ == e.batches) {
    batch_in_entry_ = 0;
    ++entry_;
  }
  return true;
}

}  // namespace mshine
