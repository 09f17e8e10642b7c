#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mshine/graph.hpp"
#include "mshine/sampler.hpp"

namespace mshine::testing {

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 salt{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() /
            ("mshine-test-" + std::to_string(salt()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream(file, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Schema schema_from(std::vector<std::pair<std::string, std::string>> pairs) {
  return Schema::from_pairs(pairs);
}

/// Random HIN over types A, B, C with edge types AB, BC, BB; every node has
/// at least one neighbor of each adjacent type.
inline TypedGraph random_hin(std::size_t per_type, double p, Rng& rng) {
  TypedGraph::Builder b;
  std::vector<std::vector<std::string>> names(3);
  const char* types[] = {"A", "B", "C"};
  for (int t = 0; t < 3; ++t) {
    for (std::size_t i = 0; i < per_type; ++i) {
      names[t].push_back(std::string(types[t]) + std::to_string(i));
      b.add_node(names[t].back(), types[t]);
    }
  }
  std::bernoulli_distribution coin(p);
  auto link = [&](int s, int t, const char* e) {
    for (std::size_t i = 0; i < per_type; ++i) {
      b.add_edge(names[s][i], names[t][(i + 1) % per_type], e);
      for (std::size_t j = 0; j < per_type; ++j) {
        if (coin(rng)) b.add_edge(names[s][i], names[t][j], e);
      }
    }
  };
  link(0, 1, "AB");
  link(1, 2, "BC");
  for (std::size_t i = 0; i < per_type; ++i) {
    for (std::size_t j = i + 1; j < per_type; ++j) {
      if (coin(rng)) b.add_edge(names[1][i], names[1][j], "BB");
    }
  }
  return std::move(b).build();
}

/// 60-node HIN with two planted communities, each made of three clusters.
/// A cluster has 2 users (U), 7 items (I) and 1 tag (T). Users link to every
/// item of their cluster; items link to their cluster's tag, every other item
/// also to a sibling cluster's tag. A random 10% of the user-item edges is held out.
struct CommunityHin {
  TypedGraph graph;  // without held-out edges
  std::vector<std::pair<std::string, std::string>> heldout;  // user, item
  std::vector<std::pair<std::string, int>> community;        // label, id
};

inline CommunityHin community_hin(std::uint64_t seed) {
  constexpr int kClusters = 6, kUsers = 2, kItems = 7;
  Rng rng(seed);
  auto user = [](int c, int i) { return "U" + std::to_string(c * kUsers + i); };
  auto item = [](int c, int i) { return "I" + std::to_string(c * kItems + i); };
  auto tag = [](int c) { return "T" + std::to_string(c); };
  auto sibling = [](int c) { return c / 3 * 3 + (c + 1) % 3; };

  CommunityHin out;
  TypedGraph::Builder b;
  for (int c = 0; c < kClusters; ++c) {
    for (int i = 0; i < kUsers; ++i) {
      b.add_node(user(c, i), "U");
      out.community.emplace_back(user(c, i), c / 3);
    }
  }
  for (int c = 0; c < kClusters; ++c) {
    for (int i = 0; i < kItems; ++i) {
      b.add_node(item(c, i), "I");
      out.community.emplace_back(item(c, i), c / 3);
    }
  }
  for (int c = 0; c < kClusters; ++c) {
    b.add_node(tag(c), "T");
    out.community.emplace_back(tag(c), c / 3);
  }

  std::vector<std::pair<std::string, std::string>> ui;
  for (int c = 0; c < kClusters; ++c) {
    for (int u = 0; u < kUsers; ++u) {
      for (int i = 0; i < kItems; ++i) ui.emplace_back(user(c, u), item(c, i));
    }
  }
  std::shuffle(ui.begin(), ui.end(), rng);
  const std::size_t held = ui.size() / 10;
  for (std::size_t i = 0; i < ui.size(); ++i) {
    if (i < held) out.heldout.push_back(ui[i]);
    else b.add_edge(ui[i].first, ui[i].second, "UI");
  }
  for (int c = 0; c < kClusters; ++c) {
    for (int i = 0; i < kItems; ++i) {
      b.add_edge(item(c, i), tag(c), "IT");
      if (i % 2 == 0) b.add_edge(item(c, i), tag(sibling(c)), "IT");
    }
  }
  out.graph = std::move(b).build();
  return out;
}

}  // namespace mshine::testing
