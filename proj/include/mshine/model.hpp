#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mshine/sampler.hpp"

namespace mshine {

using Vec = std::vector<double>;

/// Row-major matrix with span row views.
class Table {
 public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Table&, const Table&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Every trainable tensor of the model.
///   basic     N x d   node inputs
///   state     N x d   stored node states
///   target    N x d   output rows scored against states
///   w_xh, w_hh, w_rh  d x d transforms shared by all meta-paths
///   relation  |TripleType| x d
///   decode_x, decode_h, decode_y  |MetaPath| x d Hadamard decoders
struct ModelParams {
  Table basic;
  Table state;
  Table target;
  Table w_xh;
  Table w_hh;
  Table w_rh;
  Table relation;
  Table decode_x;
  Table decode_h;
  Table decode_y;

  std::size_t num_nodes() const { return basic.rows(); }
  std::size_t dim() const { return basic.cols(); }
  std::size_t num_triple_types() const { return relation.rows(); }
  std::size_t num_paths() const { return decode_x.rows(); }

  /// The ten tensors in checkpoint order.
  std::array<Table*, 10> tensors();
  std::array<const Table*, 10> tensors() const;

  bool all_finite() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

inline constexpr std::array<const char*, 10> kTensorNames = {
    "X", "H", "W_hy", "W_xh", "W_hh", "W_rh", "R", "V_x", "V_h", "V_y"};

/// basic ~ N(0, 0.1); state = target = 0; transforms and relation vectors
/// ~ N(0, 0.1); decoders all ones. Throws std::invalid_argument on a zero count.
ModelParams init_params(std::size_t num_nodes, std::size_t dim,
                        std::size_t num_triple_types, std::size_t num_paths,
                        Rng& rng);

// Meta-path decoders (Hadamard product with the path's vector).
Vec decode_basic(const ModelParams& p, NodeId v, std::size_t path);
Vec decode_state(const ModelParams& p, NodeId v, std::size_t path);
Vec decode_target(const ModelParams& p, NodeId v, std::size_t path);

void hadamard(std::span<const double> a, std::span<const double> b,
              std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);

/// Intermediates of one recurrent step, kept for backpropagation.
struct ForwardTrace {
  Vec basic_mid;   // decoded basic row of the center node
  Vec state_prev;  // decoded stored state of the previous node
  Vec state;       // tanh(W_xh x + W_hh h + W_rh r)
};

ForwardTrace forward(const ModelParams& p, NodeId prev, NodeId mid,
                     std::size_t triple_type, std::size_t path);

/// New meta-path state of the center node of `t`.
Vec compute_state(const ModelParams& p, const TrainingTriple& t);

/// Decoded target row of `target` dotted with `state`.
double score(const ModelParams& p, std::span<const double> state, NodeId target,
             std::size_t path);

/// Softmax of scores over a candidate set of one node type. Throws
/// std::invalid_argument for an empty or mixed-type set.
Vec predict_prob(const ModelParams& p, const TypedGraph& g,
                 std::span<const double> state, std::span<const NodeId> candidates,
                 std::size_t path);

}  // namespace mshine
