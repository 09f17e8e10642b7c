#include <gtest/gtest.h>

#include <algorithm>

#include "../support.hpp"
#include "mshine/error.hpp"
#include "mshine/graph.hpp"

namespace mshine {
namespace {

using testing::TempDir;
using testing::write_file;

TypedGraph tiny() {
  TypedGraph::Builder b;
  b.add_node("a1", "A");
  b.add_node("p1", "P");
  b.add_node("p2", "P");
  b.add_node("v1", "V");
  b.add_edge("a1", "p1", "PA");
  b.add_edge("p2", "a1", "PA");
  b.add_edge("p1", "v1", "PV");
  b.add_edge("p1", "p2", "PP");
  return std::move(b).build();
}

TEST(Graph, NeighborsByTypeAndEdge) {
  auto g = tiny();
  auto a1 = *g.find_node("a1");
  auto p = *g.schema().find_node_type("P");
  auto nb = g.neighbors_by_type(a1, p);
  ASSERT_EQ(nb.size(), 2u);
  EXPECT_EQ(g.label(nb[0].node), "p1");
  EXPECT_EQ(g.label(nb[1].node), "p2");
  auto v = *g.schema().find_node_type("V");
  EXPECT_TRUE(g.neighbors_by_type(a1, v).empty());
  auto pp = *g.schema().find_edge_type("PP");
  auto p1 = *g.find_node("p1");
  ASSERT_EQ(g.neighbors_via(p1, p, pp).size(), 1u);
  EXPECT_EQ(g.degree(p1), 3u);
  EXPECT_TRUE(g.has_edge(*g.find_node("p2"), p1, pp));
}

TEST(Graph, UnknownNodeTypeThrows) {
  auto g = tiny();
  EXPECT_THROW(g.neighbors_by_type(0, static_cast<NodeTypeId>(17)), std::out_of_range);
}

TEST(Graph, DuplicateEdgesAreIgnored) {
  TypedGraph::Builder b;
  b.add_node("x", "A");
  b.add_node("y", "B");
  EXPECT_TRUE(b.add_edge("x", "y", "AB"));
  EXPECT_FALSE(b.add_edge("y", "x", "AB"));
  auto g = std::move(b).build();
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_EQ(g.degree(0), 1u);
}

TEST(Graph, SelfLoopAppearsOnce) {
  TypedGraph::Builder b;
  b.add_node("u", "U");
  b.add_edge("u", "u", "UU");
  auto g = std::move(b).build();
  EXPECT_EQ(g.degree(0), 1u);
}

TEST(Graph, ConflictingTypesThrow) {
  TypedGraph::Builder b;
  b.add_node("x", "A");
  EXPECT_THROW(b.add_node("x", "B"), DataError);
  b.add_node("y", "B");
  b.add_node("z", "C");
  b.add_edge("x", "y", "E");
  EXPECT_THROW(b.add_edge("x", "z", "E"), DataError);
  EXPECT_THROW(b.add_edge("x", "nobody", "E"), DataError);
}

TEST(Graph, AdjacencyIsSymmetricOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    auto g = testing::random_hin(6, 0.3, rng);
    std::size_t total = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      for (std::size_t t = 0; t < g.schema().num_node_types(); ++t) {
        auto nb = g.neighbors_by_type(v, static_cast<NodeTypeId>(t));
        EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end(), [](auto& a, auto& b) {
          return std::pair(a.edge_type, a.node) < std::pair(b.edge_type, b.node);
        }));
        for (const auto& n : nb) {
          auto back = g.neighbors_by_type(n.node, g.node_type(v));
          EXPECT_NE(std::find(back.begin(), back.end(), Neighbor{v, n.edge_type}), back.end());
          ++total;
        }
      }
    }
    EXPECT_EQ(total, 2 * g.num_edges());
  }
}

TEST(Graph, LoadReportsFileAndLine) {
  TempDir dir;
  write_file(dir / "n.tsv", "# nodes\na\tA\nb\tB\r\n");
  write_file(dir / "e.tsv", "a\tb\tAB\na\tc\tAB\n");
  try {
    load_graph(dir / "n.tsv", dir / "e.tsv");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("e.tsv:2"), std::string::npos) << e.what();
  }
  write_file(dir / "bad.tsv", "a\tA\tX\n");
  EXPECT_THROW(load_graph(dir / "bad.tsv", dir / "e.tsv"), DataError);
  EXPECT_THROW(load_graph(dir / "missing.tsv", dir / "e.tsv"), DataError);
}

TEST(Graph, SaveLoadRoundTrip) {
  Rng rng(3);
  auto g = testing::random_hin(5, 0.3, rng);
  TempDir dir;
  save_graph(g, dir / "n.tsv", dir / "e.tsv");
  auto h = load_graph(dir / "n.tsv", dir / "e.tsv");
  EXPECT_EQ(h.labels(), g.labels());
  EXPECT_EQ(h.num_edges(), g.num_edges());
  EXPECT_TRUE(h.schema() == g.schema());
  for (const auto& e : g.edges()) {
    auto name = g.schema().edge_type(e.type).name;
    EXPECT_TRUE(h.has_edge(e.u, e.v, *h.schema().find_edge_type(name)));
  }
}

TEST(Schema, FromPairsNamesEdgesByConcatenation) {
  std::vector<std::pair<std::string, std::string>> pairs = {{"P", "A"}, {"P", "V"}};
  auto s = Schema::from_pairs(pairs);
  EXPECT_EQ(s.num_node_types(), 3u);
  ASSERT_TRUE(s.find_edge_type("PA"));
  EXPECT_EQ(s.edge_types_between(*s.find_node_type("A"), *s.find_node_type("P")).size(), 1u);
}

}  // namespace
}  // namespace mshine
