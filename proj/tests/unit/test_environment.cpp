#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "gwrw/environment.hpp"

using namespace gwrw;

namespace {

Environment unit_tree(std::uint32_t d, std::uint64_t seed = 1) {
  return Environment(OffspringLaw::deterministic(d), ConductanceLaw::unit(), seed);
}

Environment mixed_tree(std::uint64_t seed, double alpha = 0.5) {
  return Environment(OffspringLaw::parse("1:0.3,2:0.4,3:0.3"),
                     ConductanceLaw(alpha, 0.01, {{0.5, 0.25}, {1.0, 0.5}, {2.0, 0.25}}, 2.0), seed);
}

// Expands the first `count` vertices breadth first.
void grow(Environment& env, std::size_t count) {
  for (NodeId v = kRoot; v < env.size() && v <= count; ++v) env.ensure_children(v);
}

}  // namespace

TEST_CASE("unit binary tree expands to two unit children", "[env]") {
  auto env = unit_tree(2);
  for (NodeId v = kRoot; v < 50; ++v) {
    const auto kids = env.ensure_children(v);
    REQUIRE(kids.size() == 2);
    for (const NodeId c : kids) {
      CHECK(env.edge_conductance(c) == 1.0);
      CHECK(env.generation(c) == env.generation(v) + 1);
      CHECK(env.parent(c) == v);
    }
  }
  CHECK(env.edge_conductance(kRoot) == 1.0);
  CHECK(env.generation(kAncestor) == -1);
}

TEST_CASE("ensure_children is idempotent", "[env]") {
  auto env = mixed_tree(3);
  const auto first = env.ensure_children(kRoot);
  const std::vector<NodeId> ids(first.begin(), first.end());
  const auto size = env.size();
  const auto second = env.ensure_children(kRoot);
  CHECK(std::vector<NodeId>(second.begin(), second.end()) == ids);
  CHECK(env.size() == size);
}

TEST_CASE("virtual ancestor has no sampled children or parent edge", "[env]") {
  auto env = unit_tree(2);
  CHECK_THROWS_WITH(env.ensure_children(kAncestor), "virtual ancestor has no sampled children");
  CHECK_THROWS_WITH(env.edge_conductance(kAncestor), "no parent edge");
  CHECK_THROWS(env.is_mu1_edge(kAncestor));
}

TEST_CASE("replaying a seed reproduces the environment", "[env][determinism]") {
  auto a = mixed_tree(42);
  auto b = mixed_tree(42);
  grow(a, 1000);
  grow(b, 1000);
  REQUIRE(a.size() == b.size());
  for (NodeId v = kRoot; v < a.size(); ++v) {
    REQUIRE(a.edge_conductance(v) == b.edge_conductance(v));
    REQUIRE(a.parent(v) == b.parent(v));
  }
  auto c = mixed_tree(43);
  grow(c, 1000);
  bool differs = c.size() != a.size();
  for (NodeId v = kRoot; !differs && v < a.size(); ++v) differs = a.edge_conductance(v) != c.edge_conductance(v);
  CHECK(differs);
}

TEST_CASE("expansion order does not change realized values", "[env][determinism]") {
  // Grow along two different orders and compare vertices by their path keys.
  auto breadth = mixed_tree(5);
  grow(breadth, 300);
  auto depth = mixed_tree(5);
  std::vector<NodeId> stack{kRoot};
  while (!stack.empty() && depth.size() < 2000) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (depth.generation(v) > 6) continue;
    for (const NodeId c : depth.ensure_children(v)) stack.push_back(c);
  }
  std::map<std::uint64_t, std::pair<double, std::int32_t>> by_key;
  for (NodeId v = kRoot; v < breadth.size(); ++v) {
    by_key[breadth.key(v)] = {breadth.edge_conductance(v), breadth.generation(v)};
  }
  std::size_t matched = 0;
  for (NodeId v = kRoot; v < depth.size(); ++v) {
    const auto it = by_key.find(depth.key(v));
    if (it == by_key.end()) continue;
    ++matched;
    CHECK(it->second.first == depth.edge_conductance(v));
    CHECK(it->second.second == depth.generation(v));
  }
  CHECK(matched > 50);
}

TEST_CASE("epsilon fraction matches alpha", "[env][statistics]") {
  for (const double alpha : {0.3, 0.5, 1.0 - 1e-12}) {
    Environment env(OffspringLaw::deterministic(2), ConductanceLaw(alpha, 0.01, {{1.0, 1.0}}, 1.0), 9);
    std::size_t edges = 0, small = 0;
    for (NodeId v = kRoot; edges < 100000; ++v) {
      for (const NodeId c : env.ensure_children(v)) {
        ++edges;
        small += env.edge_conductance(c) == 0.01;
        CHECK(env.is_mu1_edge(c) == (env.edge_conductance(c) != 0.01));
      }
    }
    const double n = static_cast<double>(edges);
    const double se = std::sqrt(alpha * (1.0 - alpha) / n);
    INFO("alpha = " << alpha);
    // 3 SE for the operation example, 4 SE for the module invariant; the
    // near-1 case has se ~ 3e-9 and must be exact.
    CHECK(std::abs(static_cast<double>(small) / n - alpha) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("alpha = 0 makes every edge a mu1 edge", "[env]") {
  auto env = mixed_tree(8, 0.0);
  grow(env, 2000);
  for (NodeId v = kRoot; v < env.size(); ++v) REQUIRE(env.is_mu1_edge(v));
}

TEST_CASE("is_mu1_edge compares against 1/kappa", "[env]") {
  Environment env(OffspringLaw::deterministic(2), ConductanceLaw(0.5, 0.01, {{1.0, 1.0}}, 2.0), 4);
  grow(env, 200);
  std::size_t seen_small = 0, seen_large = 0;
  for (NodeId v = kRoot; v < env.size(); ++v) {
    if (env.edge_conductance(v) == 1.0) {
      CHECK(env.is_mu1_edge(v));
      ++seen_large;
    } else {
      CHECK(env.edge_conductance(v) == 0.01);
      CHECK_FALSE(env.is_mu1_edge(v));
      ++seen_small;
    }
  }
  CHECK(seen_small > 0);
  CHECK(seen_large > 0);
}

TEST_CASE("no leaves and generation bookkeeping", "[env]") {
  auto env = mixed_tree(12);
  grow(env, 3000);
  for (NodeId v = kRoot; v < env.size(); ++v) {
    if (env.expanded(v)) REQUIRE(env.ensure_children(v).size() >= 1);
    REQUIRE(env.generation(v) == env.generation(env.parent(v)) + 1);
  }
}

TEST_CASE("t1 survival", "[env]") {
  SECTION("depth 0 is trivially reached") {
    auto env = mixed_tree(1, 0.9);
    CHECK(env.t1_survives_to_depth(kRoot, 0));
  }
  SECTION("without epsilon edges the tree never dies") {
    auto env = mixed_tree(2, 0.0);
    for (const int h : {1, 5, 20}) CHECK(env.t1_survives_to_depth(kRoot, h));
  }
  SECTION("subcritical large-conductance tree dies out more often at larger depth") {
    // (1 - alpha) m = 0.4 * 2 = 0.8 < 1.
    const OffspringLaw offspring = OffspringLaw::deterministic(2);
    const ConductanceLaw law(0.6, 0.01, {{1.0, 1.0}}, 1.0);
    int alive10 = 0, alive30 = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
      Environment env(offspring, law, seed);
      const bool deep = env.t1_survives_to_depth(kRoot, 30);
      const bool shallow = env.t1_survives_to_depth(kRoot, 10);
      REQUIRE((!deep || shallow));
      alive10 += shallow;
      alive30 += deep;
    }
    CHECK(alive30 < alive10);
  }
}

TEST_CASE("environment text export round-trips bit for bit", "[env][io]") {
  auto env = mixed_tree(77);
  grow(env, 500);
  std::ostringstream first;
  env.write_text(first);
  std::istringstream in(first.str());
  auto copy = Environment::read_text(in);
  REQUIRE(copy.size() == env.size());
  for (NodeId v = kRoot; v < env.size(); ++v) {
    REQUIRE(copy.edge_conductance(v) == env.edge_conductance(v));
    REQUIRE(copy.expanded(v) == env.expanded(v));
  }
  std::ostringstream second;
  copy.write_text(second);
  CHECK(first.str() == second.str());

  // The copy keeps growing exactly like the original.
  const NodeId leaf = static_cast<NodeId>(env.size() - 1);
  const auto a = env.ensure_children(leaf);
  const auto b = copy.ensure_children(leaf);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(env.edge_conductance(a[i]) == copy.edge_conductance(b[i]));
}

TEST_CASE("environment import rejects files that disagree with the seed", "[env][io]") {
  auto env = mixed_tree(77);
  grow(env, 20);
  std::ostringstream out;
  env.write_text(out);
  std::string text = out.str();
  text.replace(text.find("seed=77"), 7, "seed=78");
  std::istringstream in(text);
  CHECK_THROWS(Environment::read_text(in));

  std::istringstream garbage("not a tree\n");
  CHECK_THROWS(Environment::read_text(garbage));
}
