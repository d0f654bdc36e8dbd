#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gwrw/regen.hpp"

using namespace gwrw;

namespace {

constexpr double kEps = 0.01;

Trajectory unit_path(const std::vector<std::int32_t>& generations) {
  return Trajectory::from_generations(generations, std::vector<double>(generations.size() - 1, 1.0));
}

Trajectory mixed_walk(std::uint64_t seed, std::size_t steps) {
  Environment env(OffspringLaw::parse("1:0.3,2:0.4,3:0.3"),
                  ConductanceLaw(0.3, 0.05, {{0.5, 0.3}, {1.0, 0.7}}, 2.0), seed);
  Rng rng(seed + 1);
  return run_walk(env, steps, rng);
}

// Definition-level oracle: the first regeneration of a path is the first
// fresh maximum through a unit edge that the path never falls below again.
std::vector<std::size_t> brute_force_regenerations(const Trajectory& t) {
  std::vector<std::size_t> out;
  const auto& s = t.steps();
  for (std::size_t n = 1; n < s.size(); ++n) {
    bool fresh = true;
    for (std::size_t m = 0; m < n; ++m) fresh = fresh && s[m].generation < s[n].generation;
    if (!fresh || !t.entered_through_unit_edge(n)) continue;
    bool returns = false;
    for (std::size_t m = n + 1; m < s.size(); ++m) returns = returns || s[m].generation == s[n].generation - 1;
    if (!returns) out.push_back(n);
  }
  return out;
}

}  // namespace

TEST_CASE("potential regenerations restart after each return", "[regen]") {
  CHECK(potential_regenerations(unit_path({0, 1, 0, 1, 2})) == std::vector<std::size_t>{1, 4});
}

TEST_CASE("potential regenerations need a unit entry edge", "[regen]") {
  const auto t = Trajectory::from_generations({0, 1, 2}, {1.0, kEps});
  CHECK(potential_regenerations(t) == std::vector<std::size_t>{1});
  const auto none = Trajectory::from_generations({0, 1, 2, 3}, {kEps, kEps, kEps});
  CHECK(potential_regenerations(none).empty());
}

TEST_CASE("regeneration detection needs edge data", "[regen]") {
  const auto bare = Trajectory::from_generations({0, 1, 2});
  CHECK_THROWS_WITH(potential_regenerations(bare), "trajectory lacks edge data");
  CHECK_THROWS_WITH(confirm_regenerations(bare, 2), "trajectory lacks edge data");
}

TEST_CASE("confirmation needs the progress margin", "[regen]") {
  const auto r = confirm_regenerations(unit_path({0, 1, 2, 3, 4, 5}), 2);
  CHECK(r.times == std::vector<std::size_t>{1, 2, 3});
  CHECK(r.positions == std::vector<std::int32_t>{1, 2, 3});
  CHECK(r.margin == 2);
}

TEST_CASE("a revisited parent generation cancels a candidate", "[regen]") {
  const auto r = confirm_regenerations(unit_path({0, 1, 0, 1, 2, 3, 4}), 2);
  CHECK(r.times == std::vector<std::size_t>{4});
}

TEST_CASE("margin beyond the attained height confirms nothing", "[regen]") {
  CHECK(confirm_regenerations(unit_path({0, 1, 2, 3}), 10).times.empty());
  CHECK_THROWS(confirm_regenerations(unit_path({0, 1}), 0));
}

TEST_CASE("increments drop the first and the last pair", "[regen]") {
  RegenRecord r;
  r.times = {10, 20, 35, 50};
  r.positions = {5, 9, 15, 21};
  const auto s = increments(r);
  REQUIRE(s.count() == 1);
  CHECK(s.pairs[0].dtau == 15);
  CHECK(s.pairs[0].dd == 6);

  r.times = {10, 20, 35};
  r.positions = {5, 9, 15};
  CHECK_THROWS_WITH(increments(r), "insufficient regenerations");
}

TEST_CASE("confirmed regenerations agree with the definition", "[regen][property]") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto t = mixed_walk(seed, 20000);
    const auto record = confirm_regenerations(t, 1);
    // With margin 1 the confirmed set is the brute-force set minus points
    // that never gain another generation.
    const auto oracle = brute_force_regenerations(t);
    for (const auto time : record.times) REQUIRE(std::binary_search(oracle.begin(), oracle.end(), time));

    // The first confirmed time closes the potential-regeneration list, and
    // every later one closes the list of the path shifted to its predecessor.
    if (record.times.empty()) continue;
    CHECK(potential_regenerations(t).back() == record.times.front());
    for (std::size_t k = 1; k < record.times.size(); ++k) {
      std::vector<TrajectoryStep> shifted(t.steps().begin() + static_cast<std::ptrdiff_t>(record.times[k - 1]),
                                          t.steps().end());
      const Trajectory tail(std::move(shifted), t.conductance_values());
      const auto list = potential_regenerations(tail);
      REQUIRE(!list.empty());
      REQUIRE(list.back() + record.times[k - 1] == record.times[k]);
    }
  }
}

TEST_CASE("record invariants", "[regen][property]") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto t = mixed_walk(seed, 50000);
    const auto r = confirm_regenerations(t, 5);
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      REQUIRE(t.entered_through_unit_edge(r.times[k]));
      REQUIRE(*t.entry_conductance(r.times[k]) == 1.0);
      if (k == 0) continue;
      REQUIRE(r.times[k] > r.times[k - 1]);
      REQUIRE(r.positions[k] > r.positions[k - 1]);
      // No backtracking below a regeneration level before the next one.
      for (std::size_t i = r.times[k - 1]; i <= r.times[k]; ++i) REQUIRE(t.generation(i) >= r.positions[k - 1]);
    }
    if (r.times.size() >= 4) {
      for (const auto& p : increments(r).pairs) {
        REQUIRE(p.dd >= 1);
        REQUIRE(p.dtau >= p.dd);
      }
    }
  }
}

TEST_CASE("raising the margin never adds confirmations", "[regen][property]") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto t = mixed_walk(seed, 30000);
    auto previous = confirm_regenerations(t, 1).times;
    for (const std::int32_t margin : {2, 3, 5, 10, 20, 40}) {
      const auto current = confirm_regenerations(t, margin).times;
      REQUIRE(std::includes(previous.begin(), previous.end(), current.begin(), current.end()));
      previous = current;
    }
  }
}

TEST_CASE("increment durations are uncorrelated at lag one", "[regen][statistics]") {
  Environment env(OffspringLaw::deterministic(2), ConductanceLaw::unit(), 5);
  Rng rng(6);
  const auto t = run_walk(env, 300000, rng);
  const auto sample = increments(confirm_regenerations(t, kDefaultMargin));
  const std::size_t n = sample.count();
  REQUIRE(n >= 10000);
  double mean = 0.0;
  for (const auto& p : sample.pairs) mean += static_cast<double>(p.dtau);
  mean /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(sample.pairs[i].dtau) - mean;
    den += x * x;
    if (i + 1 < n) num += x * (static_cast<double>(sample.pairs[i + 1].dtau) - mean);
  }
  CHECK(std::abs(num / den) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("increments CSV", "[regen][io]") {
  IncrementSample s;
  s.pairs = {{3, 1}, {5, 3}};
  std::ostringstream out;
  write_increments_csv(out, s, "# margin=20\n");
  CHECK(out.str() == "# margin=20\ndtau,dd\n3,1\n5,3\n");
}
