#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "../support.hpp"
#include "mshine/checkpoint.hpp"
#include "mshine/error.hpp"
#include "mshine/model.hpp"

namespace mshine {
namespace {

using testing::TempDir;

TEST(Init, ShapesAndValues) {
  Rng rng(1);
  auto p = init_params(7, 4, 5, 2, rng);
  EXPECT_EQ(p.basic.rows(), 7u);
  EXPECT_EQ(p.w_xh.rows(), 4u);
  EXPECT_EQ(p.relation.rows(), 5u);
  EXPECT_EQ(p.decode_y.rows(), 2u);
  for (double x : p.state.data()) EXPECT_EQ(x, 0.0);
  for (double x : p.target.data()) EXPECT_EQ(x, 0.0);
  for (double x : p.decode_x.data()) EXPECT_EQ(x, 1.0);
  double sq = 0.0;
  for (double x : p.basic.data()) sq += x * x;
  EXPECT_GT(sq, 0.0);
  EXPECT_THROW(init_params(0, 4, 1, 1, rng), std::invalid_argument);
}

TEST(Init, SeedDetermined) {
  Rng a(5), b(5);
  EXPECT_EQ(init_params(6, 3, 2, 2, a), init_params(6, 3, 2, 2, b));
}

TEST(Forward, StateFormula) {
  Rng rng(2);
  auto p = init_params(3, 2, 1, 1, rng);
  for (auto* t : p.tensors()) {
    for (std::size_t i = 0; i < t->data().size(); ++i) t->data()[i] = 0.1 * static_cast<double>(i + 1);
  }
  auto trace = forward(p, 0, 1, 0, 0);
  // Straight-line evaluation of tanh(W_xh (x o v_x) + W_hh (h o v_h) + W_rh r).
  for (std::size_t i = 0; i < 2; ++i) {
    double a = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
      a += p.w_xh.at(i, j) * p.basic.at(1, j) * p.decode_x.at(0, j);
      a += p.w_hh.at(i, j) * p.state.at(0, j) * p.decode_h.at(0, j);
      a += p.w_rh.at(i, j) * p.relation.at(0, j);
    }
    EXPECT_NEAR(trace.state[i], std::tanh(a), 1e-15);
  }
  double sc = 0.0;
  for (std::size_t i = 0; i < 2; ++i) sc += p.target.at(2, i) * p.decode_y.at(0, i) * trace.state[i];
  EXPECT_NEAR(score(p, trace.state, 2, 0), sc, 1e-15);
}

TEST(PredictProb, Errors) {
  TypedGraph::Builder b;
  b.add_node("a", "A");
  b.add_node("b", "B");
  b.add_edge("a", "b", "AB");
  auto g = std::move(b).build();
  Rng rng(3);
  auto p = init_params(2, 2, 1, 1, rng);
  Vec s{0.5, -0.5};
  std::vector<NodeId> none, mixed{0, 1}, one{1};
  EXPECT_THROW(predict_prob(p, g, s, none, 0), std::invalid_argument);
  EXPECT_THROW(predict_prob(p, g, s, mixed, 0), std::invalid_argument);
  EXPECT_NEAR(predict_prob(p, g, s, one, 0)[0], 1.0, 1e-15);
}

TEST(PredictProb, LargeScoresStayFinite) {
  TypedGraph::Builder b;
  b.add_node("a", "A");
  b.add_node("b0", "B");
  b.add_node("b1", "B");
  auto g = std::move(b).build();
  Rng rng(4);
  auto p = init_params(3, 1, 1, 1, rng);
  p.target.at(1, 0) = 1e4;
  p.target.at(2, 0) = -1e4;
  Vec s{1.0};
  std::vector<NodeId> c{1, 2};
  auto probs = predict_prob(p, g, s, c, 0);
  EXPECT_DOUBLE_EQ(probs[0], 1.0);
  EXPECT_DOUBLE_EQ(probs[1], 0.0);
}

TEST(Checkpoint, RoundTripAtFloatPrecision) {
  Rng rng(5);
  auto p = init_params(4, 3, 2, 2, rng);
  p.state.at(1, 2) = 0.123456789123;
  TempDir dir;
  std::vector<std::string> labels{"a", "b", "c", "d"}, ids{"A:AB:B:AB:A", "B:AB:A:AB:B"};
  save_checkpoint(dir / "m.mshn", p, labels, ids);
  EXPECT_FALSE(std::filesystem::exists(dir / "m.mshn.tmp"));
  auto ck = load_checkpoint(dir / "m.mshn");
  EXPECT_EQ(ck.params, round_to_f32(p));
  EXPECT_EQ(ck.labels, labels);
  EXPECT_EQ(ck.path_ids, ids);
  EXPECT_EQ(static_cast<float>(ck.params.state.at(1, 2)), 0.123456789123f);
}

TEST(Checkpoint, RejectsDamagedFiles) {
  Rng rng(6);
  auto p = init_params(2, 2, 1, 1, rng);
  TempDir dir;
  save_checkpoint(dir / "m.mshn", p, {"a", "b"}, {"x"});
  auto bytes = testing::read_file(dir / "m.mshn");
  testing::write_file(dir / "trunc.mshn", bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(load_checkpoint(dir / "trunc.mshn"), DataError);
  testing::write_file(dir / "magic.mshn", "XXXXX" + bytes.substr(5));
  EXPECT_THROW(load_checkpoint(dir / "magic.mshn"), DataError);
  EXPECT_THROW(load_checkpoint(dir / "absent.mshn"), DataError);
  EXPECT_THROW(save_checkpoint(dir / "bad.mshn", p, {"a"}, {"x"}), std::invalid_argument);
}

TEST(Checkpoint, LittleEndianHeader) {
  Rng rng(7);
  auto p = init_params(3, 2, 1, 1, rng);
  TempDir dir;
  save_checkpoint(dir / "m.mshn", p, {"a", "b", "c"}, {"x"});
  auto bytes = testing::read_file(dir / "m.mshn");
  ASSERT_GE(bytes.size(), 37u);
  EXPECT_EQ(bytes.substr(0, 5), "MSHN1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[5]), 3);
  EXPECT_EQ(static_cast<unsigned char>(bytes[13]), 2);
  const std::size_t floats = 3 * 2 * 3 + 2 * 2 * 3 + 1 * 2 + 1 * 2 * 3;
  const std::size_t tables = 8 + 3 * (8 + 1) + 8 + (8 + 1);
  EXPECT_EQ(bytes.size(), 5 + 32 + 4 * floats + tables);
}

}  // namespace
}  // namespace mshine
