#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mshine/model.hpp"

namespace mshine {

/// Node labels, possibly several classes per node.
struct NodeLabels {
  std::vector<NodeId> nodes;
  std::vector<std::vector<std::uint32_t>> classes;  // sorted, per node
  std::vector<std::string> class_names;

  std::size_t num_classes() const { return class_names.size(); }
  bool multi_label() const;
};

/// Parses `<label>\t<class>[,<class>...]`; `node_labels` maps node ids to
/// labels. Throws DataError.
NodeLabels load_labels(const std::filesystem::path& file,
                       const std::vector<std::string>& node_labels);

struct F1Scores {
  double macro = 0.0;
  double micro = 0.0;
};

/// F1 from per-class true/false positive counts. Macro averages the classes
/// that occur in the truth or the predictions.
F1Scores f1_scores(const std::vector<std::vector<std::uint32_t>>& truth,
                   const std::vector<std::vector<std::uint32_t>>& predicted,
                   std::size_t num_classes);

/// One-vs-rest L2-regularized logistic regression on standardized features,
/// fitted by full-batch gradient descent.
class LogisticOvR {
 public:
  struct Options {
    double l2 = 1e-3;
    double step = 0.5;
    std::size_t iterations = 300;
  };

  LogisticOvR() = default;
  explicit LogisticOvR(Options options) : options_(options) {}

  void fit(const std::vector<std::vector<double>>& features,
           const std::vector<std::vector<std::uint32_t>>& classes,
           std::size_t num_classes);
  /// Per-class probabilities for one feature vector.
  std::vector<double> predict_proba(std::span<const double> features) const;
  /// Classes with probability >= 0.5, or the single argmax when
  /// `single_label`.
  std::vector<std::uint32_t> predict(std::span<const double> features,
                                     bool single_label) const;

 private:
  Options options_{};
  std::vector<double> mean_, scale_;
  std::vector<std::vector<double>> weights_;  // per class, dim + 1 (bias last)
};

/// Mean f1 over `repetitions` random splits at `train_ratio`. `embeddings`
/// is indexed by node id. A split missing a class in its training part is
/// redrawn once, then DataError is thrown.
F1Scores classify(const Table& embeddings, const NodeLabels& labels,
                  double train_ratio, std::size_t repetitions, Rng& rng);

}  // namespace mshine
