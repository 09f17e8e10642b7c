#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mshine/checkpoint.hpp"
#include "mshine/classify.hpp"
#include "mshine/cli.hpp"
#include "mshine/embeddings.hpp"
#include "mshine/error.hpp"
#include "mshine/eval.hpp"

namespace py = pybind11;
using namespace mshine;

namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

std::vector<std::string> triple_ids(const Schema& schema, const MetaPath& m) {
  std::vector<std::string> out;
  for (const auto& t : decompose(m)) out.push_back(triple_id(schema, t));
  return out;
}

std::vector<std::pair<std::string, std::vector<std::string>>> selected(
    const Schema& schema, std::optional<std::size_t> bound) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& m : select_initial(schema, bound)) out.emplace_back(m.id, triple_ids(schema, m));
  return out;
}

py::array_t<double> to_numpy(const Table& t) {
  py::array_t<double> a({t.rows(), t.cols()});
  std::copy(t.data().begin(), t.data().end(), a.mutable_data());
  return a;
}

std::size_t path_index(const Checkpoint& ck, const std::string& id) {
  auto it = std::find(ck.path_ids.begin(), ck.path_ids.end(), id);
  if (it == ck.path_ids.end()) throw DataError("checkpoint has no meta-path '" + id + "'");
  return static_cast<std::size_t>(it - ck.path_ids.begin());
}

}  // namespace

PYBIND11_MODULE(_mshine, m) {
  m.doc() = "Meta-path triple embeddings for heterogeneous networks";
  m.attr("__version__") = kVersion;

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);

  m.def("select_metapaths",
        [](const std::filesystem::path& nodes, const std::filesystem::path& edges,
           std::optional<std::size_t> max_half_len) {
          auto g = load_graph(nodes, edges);
          return selected(g.schema(), max_half_len);
        },
        py::arg("nodes"), py::arg("edges"), py::arg("max_half_len") = py::none(),
        "Initial meta-paths of a graph as (id, triple ids) pairs.");

  m.def("select_for_schema",
        [](const Pairs& pairs, std::optional<std::size_t> max_half_len) {
          return selected(Schema::from_pairs(pairs), max_half_len);
        },
        py::arg("pairs"), py::arg("max_half_len") = py::none(),
        "Initial meta-paths for a schema given as endpoint type pairs.");

  m.def("decompose",
        [](const Pairs& pairs, const std::string& path) {
          auto schema = Schema::from_pairs(pairs);
          return triple_ids(schema, parse_metapath(schema, path));
        },
        py::arg("pairs"), py::arg("path"));

  m.def("train",
        [](const std::filesystem::path& nodes, const std::filesystem::path& edges,
           const std::filesystem::path& out, const std::filesystem::path& log,
           std::size_t dim, std::size_t neg, std::size_t batch, std::size_t epochs, double lr,
           double min_lr, std::uint64_t seed, std::size_t workers, std::size_t samples_per_type,
           bool scale_negatives, const std::string& neg_distribution,
           std::optional<std::filesystem::path> metapaths) {
          TrainArgs args;
          args.nodes = nodes;
          args.edges = edges;
          args.out = out;
          args.log = log;
          args.metapaths = metapaths;
          auto& c = args.config;
          c.dim = dim;
          c.negative_k = neg;
          c.batch_size = batch;
          c.epochs = epochs;
          c.learning_rate = lr;
          c.min_learning_rate = min_lr;
          c.seed = seed;
          c.workers = workers;
          c.samples_per_type = samples_per_type;
          c.scale_negatives = scale_negatives;
          if (neg_distribution == "degree75") c.neg_distribution = NegativeDistribution::kDegree75;
          else if (neg_distribution != "uniform")
            throw std::invalid_argument("neg_distribution is 'uniform' or 'degree75'");
          py::gil_scoped_release release;
          return pipeline_train(args).to_json();
        },
        py::arg("nodes"), py::arg("edges"), py::arg("out"), py::arg("log"),
        py::arg("dim") = 128, py::arg("neg") = 5, py::arg("batch") = 30,
        py::arg("epochs") = 1000, py::arg("lr") = 0.025, py::arg("min_lr") = 0.0001,
        py::arg("seed") = 0, py::arg("workers") = 1, py::arg("samples_per_type") = 0,
        py::arg("scale_negatives") = true, py::arg("neg_distribution") = "uniform",
        py::arg("metapaths") = py::none(),
        "Train and checkpoint; returns the run manifest as JSON text.");

  m.def("embeddings",
        [](const std::filesystem::path& model, const std::string& path) {
          auto ck = load_checkpoint(model);
          return py::make_tuple(ck.labels, to_numpy(path_embeddings(ck.params, path_index(ck, path))));
        },
        py::arg("model"), py::arg("metapath"),
        "(labels, N x d array) of basic embeddings decoded for one meta-path.");

  m.def("metapath_ids",
        [](const std::filesystem::path& model) { return load_checkpoint(model).path_ids; },
        py::arg("model"));

  m.def("export",
        [](const std::filesystem::path& model, const std::filesystem::path& out_dir) {
          auto ck = load_checkpoint(model);
          return export_embeddings(ck.params, ck.labels, ck.path_ids, out_dir);
        },
        py::arg("model"), py::arg("out_dir"));

  m.def("eval_link",
        [](const std::filesystem::path& model, const std::filesystem::path& nodes,
           const std::filesystem::path& edges, const std::filesystem::path& heldout,
           const std::string& edge_type, std::vector<std::size_t> ks) {
          auto g = load_graph(nodes, edges);
          auto ck = load_checkpoint(model);
          std::vector<MetaPath> paths;
          for (const auto& id : ck.path_ids) paths.push_back(parse_metapath(g.schema(), id));
          TripleIndex index(g.schema(), paths);
          auto e = g.schema().find_edge_type(edge_type);
          if (!e) throw DataError("unknown edge type '" + edge_type + "'");
          auto held = load_heldout(heldout, g, *e);
          auto rep = link_report(rank_heldout(ck.params, g, index, held, *e), ks);
          py::dict d;
          d["k"] = rep.ks;
          d["precision"] = rep.precision;
          d["recall"] = rep.recall;
          d["map"] = rep.map;
          d["mrr"] = rep.mrr;
          d["random_mrr"] = rep.random_mrr;
          d["queries"] = rep.queries;
          return d;
        },
        py::arg("model"), py::arg("nodes"), py::arg("edges"), py::arg("heldout"),
        py::arg("edge_type"), py::arg("k") = std::vector<std::size_t>{1, 3, 10});

  m.def("eval_classify",
        [](const std::filesystem::path& model, const std::filesystem::path& labels_file,
           const std::string& metapath, double ratio, std::size_t reps, std::uint64_t seed) {
          auto ck = load_checkpoint(model);
          auto labels = load_labels(labels_file, ck.labels);
          const auto p = path_index(ck, metapath);
          Rng rng(derive_seed(seed, SeedPhase::kClassify, p));
          auto f1 = classify(path_embeddings(ck.params, p), labels, ratio, reps, rng);
          return py::make_tuple(f1.macro, f1.micro);
        },
        py::arg("model"), py::arg("labels"), py::arg("metapath"), py::arg("ratio") = 0.8,
        py::arg("reps") = 10, py::arg("seed") = 0, "(f1_macro, f1_micro)");

  m.def("main",
        [](std::vector<std::string> argv) {
          argv.insert(argv.begin(), "mshine");
          std::vector<char*> ptrs;
          for (auto& a : argv) ptrs.push_back(a.data());
          return run_cli(static_cast<int>(ptrs.size()), ptrs.data());
        },
        py::arg("argv"), "Runs the command-line tool; returns its exit code.");
}
