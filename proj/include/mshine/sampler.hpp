#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mshine/graph.hpp"
#include "mshine/metapath.hpp"

namespace mshine {

using Rng = std::mt19937_64;

/// Seeds used by independent phases are derived from the run seed by fixed
/// offsets so that changing one phase never perturbs another.
enum class SeedPhase : std::uint64_t {
  kInit = 0x1000,
  kSampler = 0x2000,
  kEval = 0x3000,
  kClassify = 0x4000,
};

inline std::uint64_t derive_seed(std::uint64_t seed, SeedPhase phase,
                                 std::uint64_t worker = 0) {
  return seed + static_cast<std::uint64_t>(phase) + 7919 * worker;
}

struct TrainingTriple {
  NodeId prev;
  NodeId mid;
  NodeId next;
  std::uint32_t triple_type;  // TripleIndex id
  std::uint32_t metapath;     // index into the meta-path list

  friend bool operator==(const TrainingTriple&, const TrainingTriple&) = default;
};

enum class NegativeDistribution { kUniform, kDegree75 };

/// One uniform Def.-4 transition: a neighbor of `v` of type `next_type`
/// through `edge_type`, or nullopt when there is none.
std::optional<NodeId> walk_step(const TypedGraph& g, NodeId v,
                                NodeTypeId next_type, EdgeTypeId edge_type,
                                Rng& rng);

/// True when (prev, mid, next) is a concrete instance of `t`.
bool matches(const TypedGraph& g, const TripleType& t, NodeId prev, NodeId mid,
             NodeId next);

/// Draws triples and negatives over a fixed graph and triple index.
/// Holds only precomputed read-only tables; all randomness comes from the
/// caller's Rng.
class TripleSampler {
 public:
  TripleSampler(const TypedGraph& g, const TripleIndex& index,
                NegativeDistribution neg = NegativeDistribution::kUniform);

  /// Nodes of the prev type that have at least one full continuation.
  const std::vector<NodeId>& eligible_starts(std::size_t triple_type) const {
    return starts_.at(triple_type);
  }

  std::optional<TrainingTriple> sample_triple(std::size_t triple_type,
                                              std::uint32_t metapath,
                                              Rng& rng) const;

  /// K draws of the positive's node type, never the positive itself. Throws
  /// NegativeSamplingError if the type has no other member.
  std::vector<NodeId> negative_sample(NodeId positive, std::size_t k,
                                      Rng& rng) const;
  void negative_sample_into(NodeId positive, std::size_t k, Rng& rng,
                            std::vector<NodeId>& out) const;

  const TypedGraph& graph() const { return *graph_; }
  const TripleIndex& index() const { return *index_; }

 private:
  bool has_continuation(NodeId mid, const TripleType& t) const;

  const TypedGraph* graph_;
  const TripleIndex* index_;
  NegativeDistribution neg_;
  std::vector<std::vector<NodeId>> starts_;
  // Per node type, running sums of degree^0.75 (kDegree75 only).
  std::vector<std::vector<double>> degree_cumulative_;
};

inline std::vector<NodeId> negative_sample(const TripleSampler& s,
                                           NodeId positive, std::size_t k,
                                           Rng& rng) {
  return s.negative_sample(positive, k, rng);
}

struct StreamConfig {
  std::size_t batch_size = 30;
  std::size_t negative_k = 5;
  std::size_t samples_per_type = 0;  // 0 = auto
  std::uint64_t seed = 0;
};

/// Triples of a single (meta-path, triple type) pair with K negatives each,
/// stored flat: negatives[i*K .. i*K+K) belong to triples[i].
struct Batch {
  std::uint32_t metapath = 0;
  std::uint32_t triple_type = 0;
  std::vector<TrainingTriple> triples;
  std::vector<NodeId> negatives;
  std::size_t negative_k = 0;

  std::span<const NodeId> negatives_of(std::size_t i) const {
    return {negatives.data() + i * negative_k, negative_k};
  }
};

/// Epoch-structured batch producer. Meta-paths are visited in list order and
/// each path's triple types in index order; every (path, type) pair yields
/// ceil(samples / B) full batches.
class BatchStream {
 public:
  /// With `workers` > 1, this stream covers the plan entries whose position
  /// is congruent to `worker` modulo `workers`.
  BatchStream(const TripleSampler& sampler, const std::vector<MetaPath>& paths,
              const StreamConfig& config, std::size_t worker = 0,
              std::size_t workers = 1);

  /// Fills `out` with the next batch of the current epoch. Returns false and
  /// rewinds to the next epoch once the epoch is exhausted.
  bool next(Batch& out);

  /// Number of batches this stream produces per epoch.
  std::size_t batches_per_epoch() const;

  /// Triples drawn per epoch for a triple type.
  std::size_t samples_for(std::size_t triple_type) const {
    return samples_.at(triple_type);
  }

 private:
  struct PlanEntry {
    std::uint32_t metapath;
    std::uint32_t triple_type;
    std::size_t batches;
  };

  const TripleSampler* sampler_;
  StreamConfig config_;
  Rng rng_;
  std::vector<PlanEntry> plan_;
  std::vector<std::size_t> samples_;
  std::size_t entry_ = 0;
  std::size_t batch_in_entry_ = 0;
  std::uint64_t emitted_ = 0;
};

/// Samples per epoch for each triple type when samples_per_type is auto:
/// ceil(|nodes of the center type| / |triple types sharing that center|).
std::vector<std::size_t> auto_samples_per_type(const TypedGraph& g,
                                               const TripleIndex& index);

}  // namespace mshine
