#include "mshine/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "mshine/error.hpp"

namespace mshine {

bool NodeLabels::multi_label() const {
  return std::any_of(classes.begin(), classes.end(),
                     [](const auto& c) { return c.size() != 1; });
}

NodeLabels load_labels(const std::filesystem::path& file,
                       const std::vector<std::string>& node_labels) {
  std::unordered_map<std::string, NodeId> node_index;
  for (NodeId v = 0; v < node_labels.size(); ++v) node_index.emplace(node_labels[v], v);
  std::ifstream in(file);
  if (!in) throw DataError("cannot open labels file " + file.string());
  NodeLabels out;
  std::unordered_map<std::string, std::uint32_t> class_index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto where = file.string() + ":" + std::to_string(line_no) + ": ";
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab + 1 == line.size()) {
      throw DataError(where + "expected '<label>\\t<class>[,<class>...]'");
    }
    auto node = node_index.find(line.substr(0, tab));
    if (node == node_index.end()) throw DataError(where + "unknown node '" + line.substr(0, tab) + "'");
    std::vector<std::uint32_t> classes;
    std::size_t start = tab + 1;
    while (start <= line.size()) {
      auto comma = line.find(',', start);
      auto name = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                 : comma - start);
      if (name.empty()) throw DataError(where + "empty class name");
      auto [it, inserted] = class_index.try_emplace(
          name, static_cast<std::uint32_t>(out.class_names.size()));
      if (inserted) out.class_names.push_back(name);
      classes.push_back(it->second);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    out.nodes.push_back(node->second);
    out.classes.push_back(std::move(classes));
  }
  if (out.nodes.empty()) throw DataError(file.string() + " has no labels");
  return out;
}

F1Scores f1_scores(const std::vector<std::vector<std::uint32_t>>& truth,
                   const std::vector<std::vector<std::uint32_t>>& predicted,
                   std::size_t num_classes) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("truth and predictions differ in length");
  }
  std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& t = truth[i];
    const auto& p = predicted[i];
    for (auto c : p) {
      if (std::find(t.begin(), t.end(), c) != t.end()) ++tp[c];
      else ++fp[c];
    }
    for (auto c : t) {
      if (std::find(p.begin(), p.end(), c) == p.end()) ++fn[c];
    }
  }
  std::size_t all_tp = 0, all_fp = 0, all_fn = 0, active = 0;
  double macro = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    all_tp += tp[c];
    all_fp += fp[c];
    all_fn += fn[c];
    const auto denom = 2 * tp[c] + fp[c] + fn[c];
    if (denom == 0) continue;
    ++active;
    macro += 2.0 * static_cast<double>(tp[c]) / static_cast<double>(denom);
  }
  F1Scores out;
  out.macro = active == 0 ? 0.0 : macro / static_cast<double>(active);
  const auto denom = 2 * all_tp + all_fp + all_fn;
  out.micro = denom == 0 ? 0.0
                         : 2.0 * static_cast<double>(all_tp) / static_cast<double>(denom);
  return out;
}

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void LogisticOvR::fit(const std::vector<std::vector<double>>& features,
                      const std::vector<std::vector<std::uint32_t>>& classes,
                      std::size_t num_classes) {
  if (features.empty()) throw std::invalid_argument("no training samples");
  const std::size_t n = features.size();
  const std::size_t d = features.front().size();

  mean_.assign(d, 0.0);
  scale_.assign(d, 0.0);
  for (const auto& x : features) {
    for (std::size_t j = 0; j < d; ++j) mean_[j] += x[j];
  }
  for (auto& m : mean_) m /= static_cast<double>(n);
  for (const auto& x : features) {
    for (std::size_t j = 0; j < d; ++j) {
      scale_[j] += (x[j] - mean_[j]) * (x[j] - mean_[j]);
    }
  }
  for (auto& s : scale_) {
    s = std::sqrt(s / static_cast<double>(n));
    s = s > 1e-12 ? 1.0 / s : 0.0;
  }
  std::vector<std::vector<double>> z(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      z[i][j] = (features[i][j] - mean_[j]) * scale_[j];
    }
  }

  weights_.assign(num_classes, std::vector<double>(d + 1, 0.0));
  std::vector<double> grad(d + 1);
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& w = weights_[c];
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = std::find(classes[i].begin(), classes[i].end(), c) != classes[i].end();
    }
    for (std::size_t it = 0; it < options_.iterations; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double a = w[d];
        for (std::size_t j = 0; j < d; ++j) a += w[j] * z[i][j];
        const double err = sigmoid(a) - y[i];
        for (std::size_t j = 0; j < d; ++j) grad[j] += err * z[i][j];
        grad[d] += err;
      }
      for (std::size_t j = 0; j <= d; ++j) {
        grad[j] /= static_cast<double>(n);
        if (j < d) grad[j] += options_.l2 * w[j];
        w[j] -= options_.step * grad[j];
      }
    }
  }
}

std::vector<double> LogisticOvR::predict_proba(std::span<const double> features) const {
  const std::size_t d = mean_.size();
  std::vector<double> out;
  out.reserve(weights_.size());
  for (const auto& w : weights_) {
    double a = w[d];
    for (std::size_t j = 0; j < d; ++j) a += w[j] * (features[j] - mean_[j]) * scale_[j];
    out.push_back(sigmoid(a));
  }
  return out;
}

std::vector<std::uint32_t> LogisticOvR::predict(std::span<const double> features,
                                                bool single_label) const {
  auto proba = predict_proba(features);
  std::vector<std::uint32_t> out;
  if (single_label) {
    auto best = std::max_element(proba.begin(), proba.end()) - proba.begin();
    out.push_back(static_cast<std::uint32_t>(best));
    return out;
  }
  for (std::uint32_t c = 0; c < proba.size(); ++c) {
    if (proba[c] >= 0.5) out.push_back(c);
  }
  return out;
}

F1Scores classify(const Table& embeddings, const NodeLabels& labels,
                  double train_ratio, std::size_t repetitions, Rng& rng) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    throw std::invalid_argument("training ratio must lie in (0, 1)");
  }
  if (repetitions == 0) throw std::invalid_argument("repetitions must be >= 1");
  const std::size_t n = labels.nodes.size();
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_ratio * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw DataError("training ratio leaves an empty train or test split");
  }
  for (auto v : labels.nodes) {
    if (v >= embeddings.rows()) throw DataError("labeled node has no embedding");
  }
  const bool single = !labels.multi_label();

  auto covers_all = [&](const std::vector<std::size_t>& order) {
    std::vector<bool> seen(labels.num_classes(), false);
    for (std::size_t i = 0; i < n_train; ++i) {
      for (auto c : labels.classes[order[i]]) seen[c] = true;
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };

  F1Scores sum;
  std::vector<std::size_t> order(n);
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    if (!covers_all(order)) {
      std::shuffle(order.begin(), order.end(), rng);
      if (!covers_all(order)) {
        throw DataError("a class is missing from the training split");
      }
    }
    std::vector<std::vector<double>> x_train;
    std::vector<std::vector<std::uint32_t>> y_train;
    for (std::size_t i = 0; i < n_train; ++i) {
      auto row = embeddings.row(labels.nodes[order[i]]);
      x_train.emplace_back(row.begin(), row.end());
      y_train.push_back(labels.classes[order[i]]);
    }
    LogisticOvR model;
    model.fit(x_train, y_train, labels.num_classes());
    std::vector<std::vector<std::uint32_t>> truth, predicted;
    for (std::size_t i = n_train; i < n; ++i) {
      truth.push_back(labels.classes[order[i]]);
      predicted.push_back(model.predict(embeddings.row(labels.nodes[order[i]]), single));
    }
    auto f1 = f1_scores(truth, predicted, labels.num_classes());
    sum.macro += f1.macro;
    sum.micro += f1.micro;
  }
  sum.macro /= static_cast<double>(repetitions);
  sum.micro /= static_cast<double>(repetitions);
  return sum;
}

}  // namespace mshine
