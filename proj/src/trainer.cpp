#include "mshine/trainer.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include <spdlog/spdlog.h>

#include "mshine/error.hpp"

namespace mshine {

void TrainConfig::validate() const {
  if (dim == 0 || negative_k == 0 || batch_size == 0 || workers == 0) {
    throw std::invalid_argument("dim, neg, batch and workers must be at least 1");
  }
  if (!(learning_rate > 0.0) || !(min_learning_rate > 0.0)) {
    throw std::invalid_argument("learning rates must be positive");
  }
}

std::span<double> SparseRows::row(std::uint32_t key) {
  auto [it, inserted] = slot_.emplace(key, keys_.size());
  if (inserted) {
    keys_.push_back(key);
    values_.resize(values_.size() + dim_, 0.0);
  }
  return {values_.data() + it->second * dim_, dim_};
}

const double* SparseRows::find(std::uint32_t key) const {
  auto it = slot_.find(key);
  if (it == slot_.end()) return nullptr;
  return values_.data() + it->second * dim_;
}

Gradients::Gradients(std::size_t dim)
    : basic(dim), state(dim), target(dim), relation(dim), decode_x(dim),
      decode_h(dim), decode_y(dim), w_xh(dim, dim), w_hh(dim, dim), w_rh(dim, dim) {}

double log_sigmoid(double x) {
  return x < 0.0 ? x - std::log1p(std::exp(x)) : -std::log1p(std::exp(-x));
}

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double negative_scale(std::size_t k, bool scale_negatives) {
  return scale_negatives ? 1.0 / static_cast<double>(k) : 1.0;
}

double state_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

// out += M^T v
void gemv_t_add(const Table& m, std::span<const double> v, std::span<double> out) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c] * v[r];
  }
}

// m += w * a b^T
void outer_add(Table& m, double w, std::span<const double> a,
               std::span<const double> b) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    const double s = w * a[r];
    for (std::size_t c = 0; c < m.cols(); ++c) row[c] += s * b[c];
  }
}

// grad_rows[key] += w * g o factor
void add_scaled_product(SparseRows& rows, std::uint32_t key, double w,
                        std::span<const double> g, std::span<const double> factor) {
  auto row = rows.row(key);
  for (std::size_t i = 0; i < row.size(); ++i) row[i] += w * g[i] * factor[i];
}

struct TripleLoss {
  double pre = 0.0;
  double state = 0.0;
};

// Adds `weight` times the gradient of one triple's loss into `grads`.
TripleLoss accumulate(const ModelParams& p, const TrainingTriple& t,
                      std::span<const NodeId> negatives, double neg_scale,
                      double weight, Gradients& grads) {
  const std::size_t d = p.dim();
  const auto path = static_cast<std::uint32_t>(t.metapath);
  const auto trace = forward(p, t.prev, t.mid, t.triple_type, t.metapath);
  const auto& s = trace.state;
  const auto vy = p.decode_y.row(path);
  const auto vh = p.decode_h.row(path);
  const auto vx = p.decode_x.row(path);

  TripleLoss loss;
  Vec grad_state(d, 0.0);
  Vec decoded(d);
  Vec grad_decoded(d);
  auto target_term = [&](NodeId u, bool positive) {
    hadamard(p.target.row(u), vy, decoded);
    const double y = dot(decoded, s);
    double coef;
    if (positive) {
      loss.pre -= log_sigmoid(y);
      coef = sigmoid(y) - 1.0;
    } else {
      loss.pre -= neg_scale * log_sigmoid(-y);
      coef = neg_scale * sigmoid(y);
    }
    for (std::size_t i = 0; i < d; ++i) {
      grad_state[i] += coef * decoded[i];
      grad_decoded[i] = coef * s[i];
    }
    add_scaled_product(grads.target, u, weight, grad_decoded, vy);
    add_scaled_product(grads.decode_y, path, weight, grad_decoded, p.target.row(u));
  };
  target_term(t.next, true);
  for (NodeId u : negatives) target_term(u, false);

  const auto stored = decode_state(p, t.mid, path);
  loss.state = state_distance(stored, s);
  if (loss.state > 0.0) {
    Vec unit(d);
    for (std::size_t i = 0; i < d; ++i) {
      unit[i] = (stored[i] - s[i]) / loss.state;
      grad_state[i] -= unit[i];
    }
    add_scaled_product(grads.state, t.mid, weight, unit, vh);
    add_scaled_product(grads.decode_h, path, weight, unit, p.state.row(t.mid));
  }

  if (!std::isfinite(loss.pre) || !std::isfinite(loss.state)) {
    throw DivergenceError("non-finite loss");
  }

  Vec grad_pre(d);
  for (std::size_t i = 0; i < d; ++i) grad_pre[i] = grad_state[i] * (1.0 - s[i] * s[i]);

  const auto relation = p.relation.row(t.triple_type);
  outer_add(grads.w_xh, weight, grad_pre, trace.basic_mid);
  outer_add(grads.w_hh, weight, grad_pre, trace.state_prev);
  outer_add(grads.w_rh, weight, grad_pre, relation);

  Vec back(d, 0.0);
  gemv_t_add(p.w_xh, grad_pre, back);
  add_scaled_product(grads.basic, t.mid, weight, back, vx);
  add_scaled_product(grads.decode_x, path, weight, back, p.basic.row(t.mid));

  std::fill(back.begin(), back.end(), 0.0);
  gemv_t_add(p.w_hh, grad_pre, back);
  add_scaled_product(grads.state, t.prev, weight, back, vh);
  add_scaled_product(grads.decode_h, path, weight, back, p.state.row(t.prev));

  std::fill(back.begin(), back.end(), 0.0);
  gemv_t_add(p.w_rh, grad_pre, back);
  auto r = grads.relation.row(t.triple_type);
  for (std::size_t i = 0; i < d; ++i) r[i] += weight * back[i];
  return loss;
}

void apply_rows(Table& table, const SparseRows& rows, double lr, const char* name) {
  for (std::size_t slot = 0; slot < rows.keys().size(); ++slot) {
    auto dst = table.row(rows.keys()[slot]);
    auto g = rows.row_at(slot);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] -= lr * g[i];
      if (!std::isfinite(dst[i])) {
        throw DivergenceError(std::string("parameter ") + name + " row " +
                              std::to_string(rows.keys()[slot]) +
                              " became non-finite");
      }
    }
  }
}

void apply_dense(Table& table, const Table& grad, double lr, const char* name) {
  auto& dst = table.data();
  const auto& g = grad.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] -= lr * g[i];
    if (!std::isfinite(dst[i])) {
      throw DivergenceError(std::string("parameter ") + name + " became non-finite");
    }
  }
}

}  // namespace

double loss_pre(const ModelParams& p, const TrainingTriple& t,
                std::span<const NodeId> negatives, bool scale_negatives) {
  const auto s = compute_state(p, t);
  const double c = negative_scale(negatives.size(), scale_negatives);
  double loss = -log_sigmoid(score(p, s, t.next, t.metapath));
  for (NodeId u : negatives) loss -= c * log_sigmoid(-score(p, s, u, t.metapath));
  if (!std::isfinite(loss)) throw DivergenceError("non-finite prediction loss");
  return loss;
}

double loss_state(const ModelParams& p, const TrainingTriple& t) {
  return state_distance(decode_state(p, t.mid, t.metapath), compute_state(p, t));
}

BatchResult batch_objective(const ModelParams& p,
                            std::span<const TrainingTriple> triples,
                            std::span<const NodeId> negatives, std::size_t k,
                            bool scale_negatives) {
  if (triples.empty()) throw std::invalid_argument("empty batch");
  if (negatives.size() != triples.size() * k) {
    throw std::invalid_argument("expected K negatives per triple");
  }
  BatchResult out{0.0, 0.0, 0.0, Gradients(p.dim())};
  const double weight = 1.0 / static_cast<double>(triples.size());
  const double neg_scale = negative_scale(k, scale_negatives);
  for (std::size_t i = 0; i < triples.size(); ++i) {
    auto loss = accumulate(p, triples[i], negatives.subspan(i * k, k), neg_scale,
                           weight, out.grads);
    out.loss_pre += weight * loss.pre;
    out.loss_state += weight * loss.state;
  }
  out.loss = out.loss_pre + out.loss_state;
  if (!std::isfinite(out.loss)) throw DivergenceError("non-finite batch loss");
  return out;
}

void sgd_step(ModelParams& p, const Gradients& grads, double lr) {
  apply_rows(p.basic, grads.basic, lr, "X");
  apply_rows(p.state, grads.state, lr, "H");
  apply_rows(p.target, grads.target, lr, "W_hy");
  apply_rows(p.relation, grads.relation, lr, "R");
  apply_rows(p.decode_x, grads.decode_x, lr, "V_x");
  apply_rows(p.decode_h, grads.decode_h, lr, "V_h");
  apply_rows(p.decode_y, grads.decode_y, lr, "V_y");
  apply_dense(p.w_xh, grads.w_xh, lr, "W_xh");
  apply_dense(p.w_hh, grads.w_hh, lr, "W_hh");
  apply_dense(p.w_rh, grads.w_rh, lr, "W_rh");
}

namespace {

struct EpochTotals {
  std::vector<double> pre;
  std::vector<double> state;
  std::vector<std::size_t> batches;

  explicit EpochTotals(std::size_t paths)
      : pre(paths, 0.0), state(paths, 0.0), batches(paths, 0) {}

  void add(const EpochTotals& other) {
    for (std::size_t i = 0; i < pre.size(); ++i) {
      pre[i] += other.pre[i];
      state[i] += other.state[i];
      batches[i] += other.batches[i];
    }
  }
};

// Row updates under the racy contract: sparse rows are written without
// synchronization, dense transforms under `dense_mutex`.
void racy_step(ModelParams& p, const Gradients& grads, double lr,
               std::mutex& dense_mutex) {
  apply_rows(p.basic, grads.basic, lr, "X");
  apply_rows(p.state, grads.state, lr, "H");
  apply_rows(p.target, grads.target, lr, "W_hy");
  apply_rows(p.relation, grads.relation, lr, "R");
  apply_rows(p.decode_x, grads.decode_x, lr, "V_x");
  apply_rows(p.decode_h, grads.decode_h, lr, "V_h");
  apply_rows(p.decode_y, grads.decode_y, lr, "V_y");
  std::lock_guard lock(dense_mutex);
  apply_dense(p.w_xh, grads.w_xh, lr, "W_xh");
  apply_dense(p.w_hh, grads.w_hh, lr, "W_hh");
  apply_dense(p.w_rh, grads.w_rh, lr, "W_rh");
}

}  // namespace

TrainResult train(const TypedGraph& g, const std::vector<MetaPath>& paths,
                  const TrainConfig& config, const TrainHooks& hooks) {
  config.validate();
  if (paths.empty()) throw std::invalid_argument("no meta-paths to train");

  const TripleIndex index(g.schema(), paths);
  Rng init_rng(derive_seed(config.seed, SeedPhase::kInit));
  TrainResult result{init_params(g.num_nodes(), config.dim, index.size(),
                                 paths.size(), init_rng),
                     {}};
  if (config.epochs == 0) return result;

  const TripleSampler sampler(g, index, config.neg_distribution);
  std::vector<BatchStream> streams;
  for (std::size_t w = 0; w < config.workers; ++w) {
    StreamConfig sc{config.batch_size, config.negative_k, config.samples_per_type,
                    derive_seed(config.seed, SeedPhase::kSampler, w)};
    streams.emplace_back(sampler, paths, sc, w, config.workers);
  }
  std::size_t per_epoch = 0;
  for (const auto& s : streams) per_epoch += s.batches_per_epoch();
  if (per_epoch == 0) throw DataError("no trainable triple type in the graph");

  const double total_steps = static_cast<double>(per_epoch * config.epochs);
  auto rate_at = [&](std::size_t step) {
    double progress = static_cast<double>(step) / total_steps;
    return config.learning_rate +
           (config.min_learning_rate - config.learning_rate) * progress;
  };

  auto& params = result.params;
  std::mutex dense_mutex;
  std::size_t step = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochTotals totals(paths.size());
    if (config.workers == 1) {
      Batch batch;
      while (streams[0].next(batch)) {
        auto r = batch_objective(params, batch, config.scale_negatives);
        sgd_step(params, r.grads, rate_at(step++));
        totals.pre[batch.metapath] += r.loss_pre;
        totals.state[batch.metapath] += r.loss_state;
        ++totals.batches[batch.metapath];
      }
    } else {
      std::vector<EpochTotals> partial(config.workers, EpochTotals(paths.size()));
      std::vector<std::exception_ptr> errors(config.workers);
      const std::size_t epoch_start = step;
      {
        std::vector<std::jthread> threads;
        for (std::size_t w = 0; w < config.workers; ++w) {
          threads.emplace_back([&, w] {
            try {
              Batch batch;
              std::size_t local = 0;
              while (streams[w].next(batch)) {
                auto r = batch_objective(params, batch, config.scale_negatives);
                // Approximate global position for the decay schedule.
                auto at = epoch_start + local++ * config.workers + w;
                racy_step(params, r.grads, rate_at(std::min(at, per_epoch * epoch)),
                          dense_mutex);
                partial[w].pre[batch.metapath] += r.loss_pre;
                partial[w].state[batch.metapath] += r.loss_state;
                ++partial[w].batches[batch.metapath];
              }
            } catch (...) {
              errors[w] = std::current_exception();
            }
          });
        }
      }
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
      for (const auto& part : partial) totals.add(part);
      step = per_epoch * epoch;
    }

    LossReport report;
    report.epoch = epoch;
    std::size_t batches = 0;
    for (std::size_t p = 0; p < paths.size(); ++p) {
      report.loss_pre += totals.pre[p];
      report.loss_state += totals.state[p];
      batches += totals.batches[p];
      auto n = static_cast<double>(std::max<std::size_t>(1, totals.batches[p]));
      report.path_loss_pre.push_back(totals.pre[p] / n);
      report.path_loss_state.push_back(totals.state[p] / n);
    }
    report.loss_pre /= static_cast<double>(batches);
    report.loss_state /= static_cast<double>(batches);
    if (!std::isfinite(report.loss_pre) || !std::isfinite(report.loss_state)) {
      throw DivergenceError("non-finite loss in epoch " + std::to_string(epoch));
    }
    spdlog::debug("epoch {}: loss_pre {:.6f} loss_state {:.6f}", epoch,
                  report.loss_pre, report.loss_state);
    if (hooks.on_report) hooks.on_report(report);
    result.reports.push_back(std::move(report));
    if (hooks.on_checkpoint && config.checkpoint_every > 0 &&
        epoch % config.checkpoint_every == 0) {
      hooks.on_checkpoint(epoch, params);
    }
  }
  return result;
}

}  // namespace mshine
