#include "mshine/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mshine {

std::array<Table*, 10> ModelParams::tensors() {
  return {&basic, &state, &target, &w_xh, &w_hh, &w_rh,
          &relation, &decode_x, &decode_h, &decode_y};
}

std::array<const Table*, 10> ModelParams::tensors() const {
  return {&basic, &state, &target, &w_xh, &w_hh, &w_rh,
          &relation, &decode_x, &decode_h, &decode_y};
}

bool ModelParams::all_finite() const {
  for (const auto* t : tensors()) {
    for (double v : t->data()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

ModelParams init_params(std::size_t num_nodes, std::size_t dim,
                        std::size_t num_triple_types, std::size_t num_paths,
                        Rng& rng) {
  if (num_nodes == 0 || dim == 0 || num_triple_types == 0 || num_paths == 0) {
    throw std::invalid_argument("model dimensions must all be at least 1");
  }
  std::normal_distribution<double> normal(0.0, 0.1);
  auto gaussian = [&](Table& t) {
    for (auto& v : t.data()) v = normal(rng);
  };

  ModelParams p;
  p.basic = Table(num_nodes, dim);
  p.state = Table(num_nodes, dim);
  p.target = Table(num_nodes, dim);
  p.w_xh = Table(dim, dim);
  p.w_hh = Table(dim, dim);
  p.w_rh = Table(dim, dim);
  p.relation = Table(num_triple_types, dim);
  p.decode_x = Table(num_paths, dim, 1.0);
  p.decode_h = Table(num_paths, dim, 1.0);
  p.decode_y = Table(num_paths, dim, 1.0);
  gaussian(p.basic);
  gaussian(p.w_xh);
  gaussian(p.w_hh);
  gaussian(p.w_rh);
  gaussian(p.relation);
  return p;
}

void hadamard(std::span<const double> a, std::span<const double> b,
              std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

namespace {

Vec decoded(const Table& rows, const Table& decoders, NodeId v, std::size_t path) {
  Vec out(rows.cols());
  hadamard(rows.row(v), decoders.row(path), out);
  return out;
}

// out += M * x for a d x d row-major matrix.
void gemv_add(const Table& m, std::span<const double> x, std::span<double> out) {
  for (std::size_t r = 0; r < m.rows(); ++r) out[r] += dot(m.row(r), x);
}

}  // namespace

Vec decode_basic(const ModelParams& p, NodeId v, std::size_t path) {
  return decoded(p.basic, p.decode_x, v, path);
}

Vec decode_state(const ModelParams& p, NodeId v, std::size_t path) {
  return decoded(p.state, p.decode_h, v, path);
}

Vec decode_target(const ModelParams& p, NodeId v, std::size_t path) {
  return decoded(p.target, p.decode_y, v, path);
}

ForwardTrace forward(const ModelParams& p, NodeId prev, NodeId mid,
                     std::size_t triple_type, std::size_t path) {
  ForwardTrace trace;
  trace.basic_mid = decode_basic(p, mid, path);
  trace.state_prev = decode_state(p, prev, path);
  trace.state.assign(p.dim(), 0.0);
  gemv_add(p.w_xh, trace.basic_mid, trace.state);
  gemv_add(p.w_hh, trace.state_prev, trace.state);
  gemv_add(p.w_rh, p.relation.row(triple_type), trace.state);
  for (auto& v : trace.state) v = std::tanh(v);
  return trace;
}

Vec compute_state(const ModelParams& p, const TrainingTriple& t) {
  return forward(p, t.prev, t.mid, t.triple_type, t.metapath).state;
}

double score(const ModelParams& p, std::span<const double> state, NodeId target,
             std::size_t path) {
  const auto row = p.target.row(target);
  const auto decoder = p.decode_y.row(path);
  double sum = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) sum += row[i] * decoder[i] * state[i];
  return sum;
}

Vec predict_prob(const ModelParams& p, const TypedGraph& g,
                 std::span<const double> state, std::span<const NodeId> candidates,
                 std::size_t path) {
  if (candidates.empty()) throw std::invalid_argument("empty candidate set");
  const auto type = g.node_type(candidates.front());
  Vec out(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (g.node_type(candidates[i]) != type) {
      throw std::invalid_argument("candidates must share one node type");
    }
    out[i] = score(p, state, candidates[i], path);
  }
  const double top = *std::max_element(out.begin(), out.end());
  double total = 0.0;
  for (auto& v : out) {
    v = std::exp(v - top);
    total += v;
  }
  for (auto& v : out) v /= total;
  return out;
}

}  // namespace mshine
