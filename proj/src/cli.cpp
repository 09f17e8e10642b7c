#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mshine/checkpoint.hpp"
#include "mshine/classify.hpp"
#include "mshine/cli.hpp"
#include "mshine/embeddings.hpp"
#include "mshine/error.hpp"
#include "mshine/eval.hpp"
#include "mshine/log.hpp"

namespace mshine {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string neg_name(NegativeDistribution d) {
  return d == NegativeDistribution::kDegree75 ? "degree75" : "uniform";
}

std::string fmt_double(double x) { return fmt::format("{}", x); }

std::string join_triples(const Schema& schema, const MetaPath& m) {
  std::string out;
  for (const auto& t : decompose(m)) {
    if (!out.empty()) out += ',';
    out += triple_id(schema, t);
  }
  return out;
}

/// Rebuilds the checkpoint's meta-paths against a schema.
std::vector<MetaPath> paths_of_checkpoint(const Checkpoint& ck, const Schema& schema) {
  std::vector<MetaPath> paths;
  for (const auto& id : ck.path_ids) {
    try {
      paths.push_back(parse_metapath(schema, id));
    } catch (const DataError& e) {
      throw DataError("checkpoint meta-path '" + id + "' does not fit the graph: " + e.what());
    }
  }
  return paths;
}

void check_labels(const Checkpoint& ck, const TypedGraph& g) {
  if (ck.labels.size() != g.num_nodes()) {
    throw DataError(fmt::format("checkpoint has {} nodes, graph has {}", ck.labels.size(),
                                g.num_nodes()));
  }
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (ck.labels[v] != g.label(v)) {
      throw DataError("checkpoint node " + std::to_string(v) + " is '" + ck.labels[v] +
                      "', graph has '" + g.label(v) + "'");
    }
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw CLI::ValidationError(what, "bad value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError(what, "empty list");
  return out;
}

int select_cmd(const std::string& nodes, const std::string& edges,
               std::optional<std::size_t> max_half_len) {
  auto g = load_graph(nodes, edges);
  for (const auto& m : select_initial(g.schema(), max_half_len)) {
    std::cout << m.id << '\t' << join_triples(g.schema(), m) << '\n';
  }
  return 0;
}

int export_cmd(const std::string& model, const std::string& out_dir) {
  auto ck = load_checkpoint(model);
  for (const auto& f : export_embeddings(ck.params, ck.labels, ck.path_ids, out_dir)) {
    std::cout << f.string() << '\n';
  }
  return 0;
}

int eval_link_cmd(const std::string& model, const std::string& nodes,
                  const std::string& edges, const std::string& heldout,
                  const std::string& edge_type, const std::string& ks_text) {
  auto ks = parse_list<std::size_t>(ks_text, "--k");
  for (auto k : ks) {
    if (k == 0) throw CLI::ValidationError("--k", "k must be at least 1");
  }
  auto g = load_graph(nodes, edges);
  auto ck = load_checkpoint(model);
  check_labels(ck, g);
  auto paths = paths_of_checkpoint(ck, g.schema());
  TripleIndex index(g.schema(), paths);
  auto e = g.schema().find_edge_type(edge_type);
  if (!e) throw DataError("unknown edge type '" + edge_type + "'");
  auto held = load_heldout(heldout, g, *e);
  auto results = rank_heldout(ck.params, g, index, held, *e);
  auto rep = link_report(results, ks);
  std::cout << "k\tprecision\trecall\tmap\n";
  for (std::size_t i = 0; i < rep.ks.size(); ++i) {
    std::cout << fmt::format("{}\t{:.6f}\t{:.6f}\t{:.6f}\n", rep.ks[i], rep.precision[i],
                             rep.recall[i], rep.map[i]);
  }
  std::cout << fmt::format("mrr\t{:.6f}\nrandom_mrr\t{:.6f}\nqueries\t{}\n", rep.mrr,
                           rep.random_mrr, rep.queries);
  return 0;
}

int eval_classify_cmd(const std::string& model, const std::string& labels_file,
                      const std::string& ratio_text, std::size_t reps,
                      const std::string& which, std::uint64_t seed) {
  auto ratios = parse_list<double>(ratio_text, "--ratio");
  for (auto r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw CLI::ValidationError("--ratio", "ratios lie in (0, 1)");
  }
  if (reps == 0) throw CLI::ValidationError("--reps", "must be at least 1");
  auto ck = load_checkpoint(model);
  auto labels = load_labels(labels_file, ck.labels);
  std::vector<std::size_t> chosen;
  for (std::size_t p = 0; p < ck.path_ids.size(); ++p) {
    if (which == "all" || which == ck.path_ids[p]) chosen.push_back(p);
  }
  if (chosen.empty()) throw DataError("checkpoint has no meta-path '" + which + "'");
  std::cout << "metapath\tratio\tf1_macro\tf1_micro\n";
  for (auto p : chosen) {
    auto emb = path_embeddings(ck.params, p);
    for (auto r : ratios) {
      Rng rng(derive_seed(seed, SeedPhase::kClassify, p));
      auto f1 = classify(emb, labels, r, reps, rng);
      std::cout << fmt::format("{}\t{}\t{:.6f}\t{:.6f}\n", ck.path_ids[p], r, f1.macro,
                               f1.micro);
    }
  }
  return 0;
}

}  // namespace

std::vector<MetaPath> load_metapaths(const std::filesystem::path& file,
                                     const Schema& schema) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open meta-path file " + file.string());
  std::vector<MetaPath> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    try {
      auto m = parse_metapath(schema, line.substr(start));
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(std::move(m));
    } catch (const DataError& e) {
      throw DataError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

RunManifest pipeline_train(const TrainArgs& args) {
  const auto& config = args.config;
  config.validate();
  RunManifest manifest;
  manifest.command = "train";
  manifest.seed = config.seed;
  manifest.deterministic = config.workers == 1;
  manifest.config = {
      {"dim", std::to_string(config.dim)},
      {"neg", std::to_string(config.negative_k)},
      {"batch", std::to_string(config.batch_size)},
      {"epochs", std::to_string(config.epochs)},
      {"lr", fmt_double(config.learning_rate)},
      {"min_lr", fmt_double(config.min_learning_rate)},
      {"neg_distribution", neg_name(config.neg_distribution)},
      {"samples_per_type", config.samples_per_type == 0 ? "auto"
                                                        : std::to_string(config.samples_per_type)},
      {"checkpoint_every", std::to_string(config.checkpoint_every)},
      {"scale_negatives", config.scale_negatives ? "true" : "false"},
      {"workers", std::to_string(config.workers)},
      {"max_half_len", args.max_half_len ? std::to_string(*args.max_half_len) : "default"},
  };
  manifest.inputs["nodes"] = {args.nodes.string(), sha256_file(args.nodes)};
  manifest.inputs["edges"] = {args.edges.string(), sha256_file(args.edges)};
  if (args.metapaths) {
    manifest.inputs["metapaths"] = {args.metapaths->string(), sha256_file(*args.metapaths)};
  }
  if (!manifest.deterministic) {
    spdlog::warn("workers={} updates rows racily; results are not reproducible",
                 config.workers);
  }

  auto t = Clock::now();
  auto g = load_graph(args.nodes, args.edges);
  manifest.timings_ms["load"] = elapsed_ms(t);
  spdlog::info("loaded {} nodes, {} edges", g.num_nodes(), g.num_edges());

  t = Clock::now();
  auto paths = args.metapaths ? load_metapaths(*args.metapaths, g.schema())
                              : select_initial(g.schema(), args.max_half_len);
  manifest.timings_ms["select"] = elapsed_ms(t);
  if (paths.empty()) throw DataError("the meta-path set is empty");
  std::vector<std::string> path_ids;
  for (const auto& m : paths) {
    path_ids.push_back(m.id);
    spdlog::info("meta-path {}", m.id);
  }
  manifest.metapaths = path_ids;

  std::ofstream log(args.log, std::ios::app);
  if (!log) throw DataError("cannot open " + args.log.string());
  TrainHooks hooks;
  hooks.on_report = [&](const LossReport& r) {
    log << fmt::format("{}\t{:.9g}\t{:.9g}\n", r.epoch, r.loss_pre, r.loss_state);
    log.flush();
    spdlog::info("epoch {} loss_pre {:.6f} loss_state {:.6f}", r.epoch, r.loss_pre,
                 r.loss_state);
  };
  hooks.on_checkpoint = [&](std::size_t epoch, const ModelParams& p) {
    save_checkpoint(args.out, p, g.labels(), path_ids);
    spdlog::debug("checkpoint after epoch {}", epoch);
  };

  t = Clock::now();
  auto result = train(g, paths, config, hooks);
  manifest.timings_ms["train"] = elapsed_ms(t);

  t = Clock::now();
  save_checkpoint(args.out, result.params, g.labels(), path_ids);
  manifest.timings_ms["save"] = elapsed_ms(t);
  manifest.outputs["checkpoint"] = sha256_file(args.out);

  auto manifest_file = args.manifest.value_or(std::filesystem::path(args.out.string() + ".manifest.json"));
  manifest.write(manifest_file);
  return manifest;
}

int run_cli(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Heterogeneous network embedding with meta-path triples", "mshine"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string nodes, edges;
  std::optional<std::size_t> max_half_len;
  auto* select = app.add_subcommand("select-metapaths", "Print the initial meta-path set");
  select->add_option("--nodes", nodes, "Node file")->required();
  select->add_option("--edges", edges, "Edge file")->required();
  select->add_option("--max-half-len", max_half_len, "Enumeration bound on half-path length")
      ->check(CLI::PositiveNumber);

  TrainArgs targs;
  std::string metapaths_file, manifest_file, neg_dist = "uniform";
  auto* tr = app.add_subcommand("train", "Train and write a checkpoint");
  tr->add_option("--nodes", targs.nodes, "Node file")->required();
  tr->add_option("--edges", targs.edges, "Edge file")->required();
  tr->add_option("--metapaths", metapaths_file, "Meta-paths to train instead of the selected set");
  tr->add_option("--max-half-len", targs.max_half_len)->check(CLI::PositiveNumber);
  tr->add_option("--dim", targs.config.dim)->capture_default_str();
  tr->add_option("--neg", targs.config.negative_k)->capture_default_str();
  tr->add_option("--batch", targs.config.batch_size)->capture_default_str();
  tr->add_option("--epochs", targs.config.epochs)->capture_default_str();
  tr->add_option("--lr", targs.config.learning_rate)->capture_default_str();
  tr->add_option("--min-lr", targs.config.min_learning_rate)->capture_default_str();
  tr->add_option("--seed", targs.config.seed)->capture_default_str();
  tr->add_option("--workers", targs.config.workers)->capture_default_str();
  tr->add_option("--checkpoint-every", targs.config.checkpoint_every)->capture_default_str();
  tr->add_option("--samples-per-type", targs.config.samples_per_type, "0 = auto")
      ->capture_default_str();
  tr->add_option("--neg-distribution", neg_dist)
      ->check(CLI::IsMember({"uniform", "degree75"}))
      ->capture_default_str();
  tr->add_option("--scale-negatives", targs.config.scale_negatives)->capture_default_str();
  tr->add_option("--out", targs.out)->capture_default_str();
  tr->add_option("--log", targs.log)->capture_default_str();
  tr->add_option("--manifest", manifest_file, "Default: <out>.manifest.json");

  std::string model, out_dir;
  auto* ex = app.add_subcommand("export", "Write per-meta-path embedding files");
  ex->add_option("--model", model)->required();
  ex->add_option("--out-dir", out_dir)->required();

  std::string heldout, edge_type, ks = "1,3,10";
  auto* link = app.add_subcommand("eval-link", "Rank held-out links");
  link->add_option("--model", model)->required();
  link->add_option("--nodes", nodes)->required();
  link->add_option("--edges", edges)->required();
  link->add_option("--heldout", heldout)->required();
  link->add_option("--edge-type", edge_type)->required();
  link->add_option("--k", ks)->capture_default_str();

  std::string labels, ratios = "0.2,0.4,0.6,0.8", which = "all";
  std::size_t reps = 10;
  std::uint64_t seed = 0;
  auto* cls = app.add_subcommand("eval-classify", "Node classification on embeddings");
  cls->add_option("--model", model)->required();
  cls->add_option("--labels", labels)->required();
  cls->add_option("--ratio", ratios)->capture_default_str();
  cls->add_option("--reps", reps)->capture_default_str();
  cls->add_option("--metapath", which, "Meta-path id or 'all'")->capture_default_str();
  cls->add_option("--seed", seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*select) return select_cmd(nodes, edges, max_half_len);
    if (*tr) {
      if (!metapaths_file.empty()) targs.metapaths = metapaths_file;
      if (!manifest_file.empty()) targs.manifest = manifest_file;
      targs.config.neg_distribution = neg_dist == "degree75" ? NegativeDistribution::kDegree75
                                                            : NegativeDistribution::kUniform;
      pipeline_train(targs);
      return 0;
    }
    if (*ex) return export_cmd(model, out_dir);
    if (*link) return eval_link_cmd(model, nodes, edges, heldout, edge_type, ks);
    if (*cls) return eval_classify_cmd(model, labels, ratios, reps, which, seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DivergenceError& e) {
    std::cerr << "error: diverged: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace mshine
