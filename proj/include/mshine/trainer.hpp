#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "mshine/metapath.hpp"
#include "mshine/model.hpp"
#include "mshine/sampler.hpp"

namespace mshine {

struct TrainConfig {
  std::size_t dim = 128;
  std::size_t negative_k = 5;
  std::size_t batch_size = 30;
  std::size_t epochs = 1000;
  double learning_rate = 0.025;
  double min_learning_rate = 0.0001;
  std::uint64_t seed = 0;
  NegativeDistribution neg_distribution = NegativeDistribution::kUniform;
  std::size_t samples_per_type = 0;  // 0 = auto
  std::size_t checkpoint_every = 0;  // 0 = never
  bool scale_negatives = true;       // the 1/K factor on the negative term
  std::size_t workers = 1;           // > 1 opts into racy row updates

  /// Throws std::invalid_argument when a count is zero or a rate is not
  /// positive.
  void validate() const;
};

struct LossReport {
  std::size_t epoch = 0;  // 1-based
  double loss_pre = 0.0;
  double loss_state = 0.0;
  std::vector<double> path_loss_pre;
  std::vector<double> path_loss_state;
};

/// Rows of a tall table that received gradient, in first-touch order.
class SparseRows {
 public:
  explicit SparseRows(std::size_t dim = 0) : dim_(dim) {}

  std::span<double> row(std::uint32_t key);
  const double* find(std::uint32_t key) const;
  const std::vector<std::uint32_t>& keys() const { return keys_; }
  std::span<const double> row_at(std::size_t slot) const {
    return {values_.data() + slot * dim_, dim_};
  }
  bool empty() const { return keys_.empty(); }

 private:
  std::size_t dim_;
  std::vector<std::uint32_t> keys_;
  std::vector<double> values_;
  std::unordered_map<std::uint32_t, std::size_t> slot_;
};

struct Gradients {
  explicit Gradients(std::size_t dim);

  SparseRows basic, state, target, relation, decode_x, decode_h, decode_y;
  Table w_xh, w_hh, w_rh;
};

struct BatchResult {
  double loss = 0.0;        // mean of loss_pre + loss_state
  double loss_pre = 0.0;    // mean
  double loss_state = 0.0;  // mean
  Gradients grads;
};

/// -[log s(y+) + c * sum_i log s(-y_i)] with c = 1/K when scale_negatives,
/// else 1. Throws DivergenceError on a non-finite value.
double loss_pre(const ModelParams& p, const TrainingTriple& t,
                std::span<const NodeId> negatives, bool scale_negatives = true);

/// L2 distance between the center node's decoded stored state and its newly
/// computed state.
double loss_state(const ModelParams& p, const TrainingTriple& t);

/// Mean over triples of loss_pre + loss_state with exact gradients for every
/// touched row and the dense transforms. `negatives` holds K ids per triple.
BatchResult batch_objective(const ModelParams& p,
                            std::span<const TrainingTriple> triples,
                            std::span<const NodeId> negatives, std::size_t k,
                            bool scale_negatives = true);

inline BatchResult batch_objective(const ModelParams& p, const Batch& b,
                                   bool scale_negatives = true) {
  return batch_objective(p, b.triples, b.negatives, b.negative_k, scale_negatives);
}

/// theta -= lr * grad on every touched row. Throws DivergenceError naming the
/// tensor if an updated value is non-finite.
void sgd_step(ModelParams& p, const Gradients& grads, double lr);

struct TrainHooks {
  std::function<void(const LossReport&)> on_report;
  std::function<void(std::size_t epoch, const ModelParams&)> on_checkpoint;
};

struct TrainResult {
  ModelParams params;
  std::vector<LossReport> reports;
};

/// Runs `epochs` passes over the batch stream. With workers == 1 the result is
/// a pure function of (graph, paths, config).
TrainResult train(const TypedGraph& g, const std::vector<MetaPath>& paths,
                  const TrainConfig& config, const TrainHooks& hooks = {});

double log_sigmoid(double x);

}  // namespace mshine
