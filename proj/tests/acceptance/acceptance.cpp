// One PASS/FAIL line per acceptance criterion; exit status is the failure count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <numeric>
#include <spdlog/spdlog.h>

#include "../support.hpp"
#include "mshine/checkpoint.hpp"
#include "mshine/classify.hpp"
#include "mshine/cli.hpp"
#include "mshine/embeddings.hpp"
#include "mshine/eval.hpp"
#include "mshine/metapath.hpp"
#include "mshine/metrics.hpp"
#include "mshine/model.hpp"
#include "mshine/trainer.hpp"

using namespace mshine;
using mshine::testing::community_hin;
using mshine::testing::random_hin;
using mshine::testing::schema_from;
using mshine::testing::TempDir;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>
table_schemas() {
  return {
      {"Douban", {{"U", "U"}, {"U", "G"}, {"U", "M"}, {"M", "A"}, {"M", "D"}}},
      {"DBLP", {{"P", "A"}, {"P", "V"}, {"P", "T"}}},
      {"Cora", {{"P", "P"}, {"P", "T"}, {"P", "A"}}},
      {"IMDB", {{"M", "U"}, {"M", "A"}, {"M", "D"}, {"M", "G"}}},
      {"Yelp", {{"Ca", "B"}, {"Ci", "B"}, {"B", "U"}, {"U", "U"}}},
  };
}

Outcome selection_oracle() {
  const std::vector<std::size_t> expected = {15, 6, 6, 10, 10};
  auto schemas = table_schemas();
  std::string detail;
  bool ok = true;
  for (std::size_t i = 0; i < schemas.size(); ++i) {
    auto schema = schema_from(schemas[i].second);
    auto t = Clock::now();
    auto n = select_initial(schema).size();
    auto secs = seconds_since(t);
    ok = ok && n == expected[i] && secs < 1.0;
    detail += schemas[i].first + "=" + std::to_string(n) + " ";
  }
  return {ok, detail + "(want 15 6 6 10 10)"};
}

TripleSet unrolled_triples(const MetaPath& m) {
  // Bounce back and forth over the path: 4(l-1)+1 node positions.
  const std::size_t l = m.length();
  std::vector<NodeTypeId> nodes;
  std::vector<EdgeTypeId> edges;
  std::size_t pos = 0;
  int dir = 1;
  nodes.push_back(m.node_types[0]);
  for (std::size_t step = 0; step < 4 * (l - 1); ++step) {
    if (pos == l - 1) dir = -1;
    if (pos == 0) dir = 1;
    std::size_t next = dir > 0 ? pos + 1 : pos - 1;
    edges.push_back(m.edge_types[std::min(pos, next)]);
    nodes.push_back(m.node_types[next]);
    pos = next;
  }
  TripleSet out;
  for (std::size_t i = 0; i + 2 < nodes.size(); ++i) {
    out.insert({nodes[i], edges[i], nodes[i + 1], edges[i + 1], nodes[i + 2]});
  }
  return out;
}

MetaPath random_symmetric(const Schema& schema, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick_type(0, schema.num_node_types() - 1);
  std::uniform_int_distribution<std::size_t> pick_half(1, 4);
  for (;;) {
    std::vector<NodeTypeId> nodes{static_cast<NodeTypeId>(pick_type(rng))};
    std::vector<EdgeTypeId> edges;
    const auto half = pick_half(rng);
    for (std::size_t s = 0; s < half; ++s) {
      std::vector<std::pair<EdgeTypeId, NodeTypeId>> steps;
      for (std::size_t e = 0; e < schema.num_edge_types(); ++e) {
        const auto& info = schema.edge_types()[e];
        const auto at = nodes.back();
        if (info.first == at) steps.emplace_back(static_cast<EdgeTypeId>(e), info.second);
        else if (info.second == at) steps.emplace_back(static_cast<EdgeTypeId>(e), info.first);
      }
      auto [e, t] = steps[std::uniform_int_distribution<std::size_t>(0, steps.size() - 1)(rng)];
      edges.push_back(e);
      nodes.push_back(t);
    }
    auto back_nodes = nodes;
    auto back_edges = edges;
    std::bernoulli_distribution even(0.5);
    std::vector<EdgeTypeId> self;
    for (auto e : schema.edge_types_between(nodes.back(), nodes.back())) self.push_back(e);
    if (!self.empty() && even(rng)) {
      edges.push_back(self.front());
      nodes.push_back(nodes.back());
    }
    for (std::size_t i = back_nodes.size() - 1; i-- > 0;) nodes.push_back(back_nodes[i]);
    for (std::size_t i = back_edges.size(); i-- > 0;) edges.push_back(back_edges[i]);
    if (nodes.size() < 3) continue;
    return make_metapath(schema, nodes, edges);
  }
}

Outcome decomposition_oracle() {
  auto douban = schema_from(table_schemas()[0].second);
  auto umamu = parse_metapath(douban, "U:M:A:M:U");
  auto got = decompose(umamu);
  std::set<std::string> ids;
  for (const auto& t : got) ids.insert(triple_id(douban, t));
  const std::set<std::string> want = {"U:UM:M:MA:A", "M:MA:A:MA:M", "A:MA:M:UM:U",
                                      "M:UM:U:UM:M"};
  bool ok = ids == want;
  Rng rng(11);
  std::size_t checked = 0;
  for (const auto& [name, pairs] : table_schemas()) {
    auto schema = schema_from(pairs);
    for (int i = 0; i < 20; ++i, ++checked) {
      auto m = random_symmetric(schema, rng);
      if (decompose(m) != unrolled_triples(m)) {
        ok = false;
        std::printf("  decompose mismatch on %s\n", m.id.c_str());
      }
    }
  }
  return {ok, "UMAMU plus " + std::to_string(checked) + " random paths"};
}

struct Problem {
  TypedGraph graph;
  std::vector<MetaPath> paths;
  TripleIndex index;
};

Problem small_problem(std::uint64_t seed) {
  Rng rng(seed);
  Problem pb;
  pb.graph = random_hin(4, 0.4, rng);
  pb.paths = select_initial(pb.graph.schema());
  pb.index = TripleIndex(pb.graph.schema(), pb.paths);
  return pb;
}

void randomize(ModelParams& p, Rng& rng, double sd) {
  std::normal_distribution<double> n(0.0, sd);
  for (auto* t : p.tensors()) {
    for (auto& x : t->data()) x = n(rng);
  }
  for (auto* t : {&p.decode_x, &p.decode_h, &p.decode_y}) {
    for (auto& x : t->data()) x += 1.0;
  }
}

std::vector<TrainingTriple> draw_triples(const Problem& pb, const TripleSampler& s,
                                         std::size_t n, Rng& rng) {
  std::vector<TrainingTriple> out;
  std::vector<std::pair<std::size_t, std::uint32_t>> pairs;
  for (std::uint32_t m = 0; m < pb.paths.size(); ++m) {
    for (auto t : pb.index.triples_of(m)) pairs.emplace_back(t, m);
  }
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  while (out.size() < n) {
    auto [t, m] = pairs[pick(rng)];
    if (auto tr = s.sample_triple(t, m, rng)) out.push_back(*tr);
  }
  return out;
}

Outcome gradient_check() {
  auto t0 = Clock::now();
  auto pb = small_problem(3);
  Rng rng(5);
  auto p = init_params(pb.graph.num_nodes(), 8, pb.index.size(), pb.paths.size(), rng);
  randomize(p, rng, 0.5);
  TripleSampler sampler(pb.graph, pb.index);
  auto triples = draw_triples(pb, sampler, 20, rng);
  const std::size_t k = 3;
  std::vector<NodeId> negatives;
  for (const auto& t : triples) sampler.negative_sample_into(t.next, k, rng, negatives);

  auto analytic = batch_objective(p, triples, negatives, k).grads;
  auto loss_at = [&](ModelParams& q) { return batch_objective(q, triples, negatives, k).loss; };

  auto sparse = [](const SparseRows& rows, const Table& shape) {
    Table full(shape.rows(), shape.cols());
    for (std::size_t s = 0; s < rows.keys().size(); ++s) {
      auto src = rows.row_at(s);
      std::copy(src.begin(), src.end(), full.row(rows.keys()[s]).begin());
    }
    return full;
  };
  const std::array<Table, 10> grads = {
      sparse(analytic.basic, p.basic),       sparse(analytic.state, p.state),
      sparse(analytic.target, p.target),     analytic.w_xh,
      analytic.w_hh,                         analytic.w_rh,
      sparse(analytic.relation, p.relation), sparse(analytic.decode_x, p.decode_x),
      sparse(analytic.decode_h, p.decode_h), sparse(analytic.decode_y, p.decode_y)};

  const double h = 1e-4;
  double worst = 0.0;
  std::string worst_name;
  auto tensors = p.tensors();
  for (std::size_t g = 0; g < tensors.size(); ++g) {
    auto& data = tensors[g]->data();
    double diff = 0.0, norm_a = 0.0, norm_n = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double keep = data[i];
      data[i] = keep + h;
      const double up = loss_at(p);
      data[i] = keep - h;
      const double down = loss_at(p);
      data[i] = keep;
      const double numeric = (up - down) / (2 * h);
      const double a = grads[g].data()[i];
      diff += (a - numeric) * (a - numeric);
      norm_a += a * a;
      norm_n += numeric * numeric;
    }
    const double rel = std::sqrt(diff) / std::max(std::sqrt(std::max(norm_a, norm_n)), 1e-12);
    if (rel > worst) {
      worst = rel;
      worst_name = kTensorNames[g];
    }
  }
  const double secs = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "worst relative error %.2e (%s), %.1fs", worst,
                worst_name.c_str(), secs);
  return {worst <= 1e-4 && secs < 30.0, buf};
}

Outcome loss_anchors() {
  auto pb = small_problem(7);
  Rng rng(1);
  auto p = init_params(pb.graph.num_nodes(), 8, pb.index.size(), pb.paths.size(), rng);
  for (auto* t : p.tensors()) std::fill(t->data().begin(), t->data().end(), 0.0);
  TripleSampler sampler(pb.graph, pb.index);
  auto triples = draw_triples(pb, sampler, 10, rng);
  double worst_pre = 0.0;
  for (const auto& t : triples) {
    auto negatives = sampler.negative_sample(t.next, 5, rng);
    worst_pre = std::max(worst_pre, std::abs(loss_pre(p, t, negatives) - 2 * std::log(2.0)));
  }
  // Stored decoded state set to the freshly computed one.
  auto q = init_params(pb.graph.num_nodes(), 8, pb.index.size(), pb.paths.size(), rng);
  randomize(q, rng, 0.3);
  double worst_state = 0.0;
  for (const auto& t : triples) {
    auto s = compute_state(q, t);
    auto row = q.state.row(t.mid);
    auto vh = q.decode_h.row(t.metapath);
    for (std::size_t i = 0; i < s.size(); ++i) row[i] = s[i] / vh[i];
    worst_state = std::max(worst_state, loss_state(q, t));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "|loss_pre - 1.386294| <= %.1e, loss_state <= %.1e",
                worst_pre, worst_state);
  return {worst_pre <= 1e-9 && worst_state <= 1e-12, buf};
}

Outcome softmax_contract() {
  auto pb = small_problem(9);
  Rng rng(2);
  const auto& g = pb.graph;
  double worst_sum = 0.0, worst_shift = 0.0;
  std::normal_distribution<double> n(0.0, 1.0);
  for (int draw = 0; draw < 1000; ++draw) {
    auto p = init_params(g.num_nodes(), 8, pb.index.size(), pb.paths.size(), rng);
    randomize(p, rng, 1.0);
    const auto type = static_cast<NodeTypeId>(draw % g.schema().num_node_types());
    const auto& candidates = g.nodes_of_type(type);
    Vec state(8);
    for (auto& x : state) x = n(rng);
    const std::size_t path = static_cast<std::size_t>(draw) % pb.paths.size();
    auto probs = predict_prob(p, g, state, candidates, path);
    double sum = 0.0;
    for (double x : probs) sum += x;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    // Adding one vector to every candidate's target row shifts all scores by
    // the same amount.
    Vec delta(8);
    for (auto& x : delta) x = 3.0 * n(rng);
    for (auto c : candidates) {
      auto row = p.target.row(c);
      for (std::size_t i = 0; i < 8; ++i) row[i] += delta[i];
    }
    auto shifted = predict_prob(p, g, state, candidates, path);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      worst_shift = std::max(worst_shift, std::abs(probs[i] - shifted[i]));
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |sum-1| %.1e, max shift change %.1e", worst_sum,
                worst_shift);
  return {worst_sum <= 1e-9 && worst_shift <= 1e-9, buf};
}

Outcome walk_uniformity() {
  TypedGraph::Builder b;
  b.add_node("a", "A");
  for (const char* x : {"b0", "b1", "b2"}) {
    b.add_node(x, "B");
    b.add_edge("a", x, "AB");
  }
  b.add_node("c", "C");
  b.add_edge("a", "c", "AC");
  auto g = std::move(b).build();
  const auto a = *g.find_node("a");
  const auto tb = *g.schema().find_node_type("B");
  const auto e = *g.schema().find_edge_type("AB");
  Rng rng(17);
  std::unordered_map<NodeId, int> counts;
  const int draws = 30000;
  for (int i = 0; i < draws; ++i) ++counts[*walk_step(g, a, tb, e, rng)];
  double chi2 = 0.0;
  const double expected = draws / 3.0;
  for (auto [v, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  const double p = std::exp(-chi2 / 2.0);  // chi-square survival, 2 dof
  char buf[96];
  std::snprintf(buf, sizeof buf, "chi2=%.3f p=%.3f", chi2, p);
  return {counts.size() == 3 && p > 0.01, buf};
}

Outcome metric_oracle() {
  bool ok = true;
  {
    RankingResult r{0, {1, 0, 2}, {0}};
    ok = ok && precision_at_k(r, 3) == 1.0 / 3.0;
    RankingResult s{0, {0, 1}, {0}};
    ok = ok && average_precision_at_k(s, 2) == 0.5;
  }
  Rng rng(23);
  std::vector<RankingResult> all;
  for (int q = 0; q < 1000; ++q) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 20)(rng);
    std::vector<NodeId> ranked(n);
    std::iota(ranked.begin(), ranked.end(), 0);
    std::shuffle(ranked.begin(), ranked.end(), rng);
    std::vector<NodeId> rel;
    std::bernoulli_distribution coin(0.25);
    for (NodeId v = 0; v < n; ++v) {
      if (coin(rng)) rel.push_back(v);
    }
    RankingResult r{static_cast<NodeId>(1000 + q), ranked, {rel.begin(), rel.end()}};
    auto is_rel = [&](NodeId v) { return std::find(rel.begin(), rel.end(), v) != rel.end(); };
    for (std::size_t k = 1; k <= 22; ++k) {
      const std::size_t kk = std::min(k, n);
      std::size_t hits = 0;
      double ap = 0.0;
      for (std::size_t j = 1; j <= kk; ++j) {
        if (is_rel(ranked[j - 1])) {
          ++hits;
          ap += static_cast<double>(hits) / static_cast<double>(j);
        }
      }
      ok = ok && precision_at_k(r, k) == static_cast<double>(hits) / static_cast<double>(kk);
      ok = ok && average_precision_at_k(r, k) == ap / static_cast<double>(kk);
      auto rec = recall_at_k(r, k);
      if (rel.empty()) ok = ok && !rec;
      else ok = ok && rec && *rec == static_cast<double>(hits) / static_cast<double>(rel.size());
    }
    double rr = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (is_rel(ranked[j])) {
        rr = 1.0 / static_cast<double>(j + 1);
        break;
      }
    }
    ok = ok && reciprocal_rank(r) == rr;
    all.push_back(std::move(r));
  }
  return {ok, "worked values and 1000 random rankings"};
}

struct Trained {
  testing::CommunityHin hin;
  std::vector<MetaPath> paths;
  TrainResult result;
  double seconds;
};

TrainConfig community_config() {
  TrainConfig c;
  c.dim = 16;
  c.epochs = 200;
  c.seed = 42;
  // Batch gradients are means, so the step size is larger than the default.
  c.learning_rate = 0.5;
  c.samples_per_type = 200;
  return c;
}

const Trained& community_model() {
  static const Trained trained = [] {
    Trained t{community_hin(1234), {}, {}, 0.0};
    t.paths = select_initial(t.hin.graph.schema());
    auto start = Clock::now();
    t.result = train(t.hin.graph, t.paths, community_config());
    t.seconds = seconds_since(start);
    return t;
  }();
  return trained;
}

std::vector<HeldOutEdge> heldout_of(const Trained& t) {
  std::vector<HeldOutEdge> out;
  for (const auto& [u, i] : t.hin.heldout) {
    out.push_back({*t.hin.graph.find_node(u), *t.hin.graph.find_node(i)});
  }
  return out;
}

Outcome link_signal() {
  auto start = Clock::now();
  const auto& t = community_model();
  const auto& g = t.hin.graph;
  TripleIndex index(g.schema(), t.paths);
  const auto e = *g.schema().find_edge_type("UI");
  auto held = heldout_of(t);
  auto results = rank_heldout(t.result.params, g, index, held, e);
  const std::size_t ks[] = {1, 3, 10};
  auto rep = link_report(results, ks);
  const double secs = seconds_since(start);
  char buf[160];
  std::snprintf(buf, sizeof buf, "MRR %.3f vs random %.3f (%.1fx), %zu queries, %.1fs",
                rep.mrr, rep.random_mrr, rep.mrr / rep.random_mrr, rep.queries, secs);
  return {rep.queries > 0 && rep.mrr >= 5.0 * rep.random_mrr && secs < 120.0, buf};
}

// Items only: one node type, as in the usual per-type protocol.
NodeLabels community_labels(const Trained& t) {
  NodeLabels labels;
  labels.class_names = {"0", "1"};
  for (const auto& [label, comm] : t.hin.community) {
    if (label.front() != 'I') continue;
    labels.nodes.push_back(*t.hin.graph.find_node(label));
    labels.classes.push_back({static_cast<std::uint32_t>(comm)});
  }
  return labels;
}

double mean_f1(const ModelParams& p, const NodeLabels& labels, std::uint64_t seed) {
  double sum = 0.0;
  for (std::size_t m = 0; m < p.num_paths(); ++m) {
    Rng rng(derive_seed(seed, SeedPhase::kClassify, m));
    sum += classify(path_embeddings(p, m), labels, 0.8, 10, rng).micro;
  }
  return sum / static_cast<double>(p.num_paths());
}

Outcome classification_signal() {
  const auto& t = community_model();
  auto labels = community_labels(t);
  const auto seed = community_config().seed;
  const double trained = mean_f1(t.result.params, labels, seed);
  Rng rng(derive_seed(seed, SeedPhase::kInit));
  const auto& g = t.hin.graph;
  TripleIndex index(g.schema(), t.paths);
  auto fresh = init_params(g.num_nodes(), 16, index.size(), t.paths.size(), rng);
  const double untrained = mean_f1(fresh, labels, seed);
  char buf[128];
  std::snprintf(buf, sizeof buf, "f1-micro trained %.3f, untrained %.3f", trained, untrained);
  return {trained >= 0.9 && untrained <= 0.65, buf};
}

Outcome determinism() {
  TempDir dir;
  auto hin = community_hin(99);
  save_graph(hin.graph, dir / "nodes.tsv", dir / "edges.tsv");
  std::string held;
  for (const auto& [u, i] : hin.heldout) held += u + "\t" + i + "\tUI\n";
  testing::write_file(dir / "heldout.tsv", held);

  auto run = [&](const std::string& tag) {
    TrainArgs args;
    args.nodes = dir / "nodes.tsv";
    args.edges = dir / "edges.tsv";
    args.out = dir / (tag + ".mshn");
    args.log = dir / (tag + ".log");
    args.config.dim = 16;
    args.config.epochs = 20;
    args.config.seed = 7;
    auto manifest = pipeline_train(args);
    auto ck = load_checkpoint(args.out);
    const auto& g = hin.graph;
    std::vector<MetaPath> paths;
    for (const auto& id : ck.path_ids) paths.push_back(parse_metapath(g.schema(), id));
    TripleIndex index(g.schema(), paths);
    auto e = *g.schema().find_edge_type("UI");
    auto heldout = load_heldout(dir / "heldout.tsv", g, e);
    const std::size_t ks[] = {1, 3, 10};
    auto rep = link_report(rank_heldout(ck.params, g, index, heldout, e), ks);
    std::string table;
    for (std::size_t i = 0; i < rep.ks.size(); ++i) {
      table += std::to_string(rep.precision[i]) + std::to_string(rep.recall[i]) +
               std::to_string(rep.map[i]);
    }
    table += std::to_string(rep.mrr);
    NodeLabels labels;
    labels.class_names = {"0", "1"};
    for (const auto& [label, comm] : hin.community) {
      labels.nodes.push_back(*g.find_node(label));
      labels.classes.push_back({static_cast<std::uint32_t>(comm)});
    }
    Rng rng(derive_seed(7, SeedPhase::kClassify));
    auto f1 = classify(path_embeddings(ck.params, 0), labels, 0.6, 5, rng);
    table += std::to_string(f1.macro) + std::to_string(f1.micro);
    return std::make_pair(testing::read_file(args.out), table);
  };
  auto a = run("a");
  auto b = run("b");
  const bool same_bytes = !a.first.empty() && a.first == b.first;
  const bool same_tables = a.second == b.second;
  return {same_bytes && same_tables,
          std::string("checkpoints ") + (same_bytes ? "identical" : "differ") +
              ", metric tables " + (same_tables ? "identical" : "differ")};
}

Outcome export_parity() {
  const auto& t = community_model();
  TempDir dir;
  std::vector<std::string> ids;
  for (const auto& m : t.paths) ids.push_back(m.id);
  const auto& p = t.result.params;
  auto files = export_embeddings(p, t.hin.graph.labels(), ids, dir.path());
  double worst = 0.0;
  bool shape_ok = files.size() == ids.size();
  for (std::size_t m = 0; m < files.size(); ++m) {
    auto file = read_embeddings(files[m]);
    shape_ok = shape_ok && file.vectors.rows() == p.num_nodes() && file.labels == t.hin.graph.labels();
    for (NodeId v = 0; v < p.num_nodes() && shape_ok; ++v) {
      for (std::size_t i = 0; i < p.dim(); ++i) {
        const double expect = p.basic.at(v, i) * p.decode_x.at(m, i);
        worst = std::max(worst, std::abs(file.vectors.at(v, i) - expect));
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu files, max |file - X*V_x| %.1e", files.size(), worst);
  return {shape_ok && worst <= 1e-5, buf};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"meta-path selection counts", selection_oracle},
      {"triple decomposition", decomposition_oracle},
      {"analytic gradients", gradient_check},
      {"loss anchors", loss_anchors},
      {"heterogeneous softmax", softmax_contract},
      {"walk-step uniformity", walk_uniformity},
      {"ranking metrics", metric_oracle},
      {"link prediction signal", link_signal},
      {"classification signal", classification_signal},
      {"determinism", determinism},
      {"embedding export parity", export_parity},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
