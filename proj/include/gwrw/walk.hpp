#pragma once

// Nearest-neighbour random walk in a fixed (quenched) environment.

#include <concepts>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gwrw/environment.hpp"
#include "gwrw/rng.hpp"

namespace gwrw {

// Anything the walk can move on: the lazily grown Environment or a frozen
// Truncation. Vertex 0 is the virtual ancestor and vertex 1 the root.
template <class T>
concept WalkTree = requires(T& tree, const T& ctree, NodeId v) {
  { tree.expand_for_walk(v) } -> std::same_as<ChildRange>;
  { ctree.parent(v) } -> std::convertible_to<NodeId>;
  { ctree.generation(v) } -> std::convertible_to<std::int32_t>;
  { ctree.edge_weight(v) } -> std::convertible_to<double>;
  { ctree.edge_index(v) } -> std::convertible_to<std::uint16_t>;
  { ctree.neighbor_total(v) } -> std::convertible_to<double>;
  { ctree.conductance_values() } -> std::convertible_to<const std::vector<double>&>;
};

struct TrajectoryStep {
  NodeId vertex;
  std::int32_t generation;
  std::uint16_t edge;  // conductance index of the edge used to enter, kNoEdge at the start
};

/// Visited vertices with their generations and entry-edge conductances.
/// steps[0] is the starting point; a walk of n steps has n + 1 entries.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<TrajectoryStep> steps, std::vector<double> conductance_values)
      : steps_(std::move(steps)), values_(std::move(conductance_values)) {}

  // Builds a trajectory from generations alone, for hand-written cases.
  // `entry` holds the conductance of the edge crossed at steps 1..n; leave it
  // empty to produce a trajectory without edge data.
  static Trajectory from_generations(const std::vector<std::int32_t>& generations,
                                     const std::vector<double>& entry = {}) {
    if (!entry.empty() && entry.size() + 1 != generations.size()) {
      throw std::invalid_argument("need one entry conductance per step");
    }
    Trajectory t;
    for (std::size_t i = 0; i < generations.size(); ++i) {
      std::uint16_t edge = kNoEdge;
      if (i > 0 && !entry.empty()) {
        const double c = entry[i - 1];
        std::size_t j = 0;
        while (j < t.values_.size() && t.values_[j] != c) ++j;
        if (j == t.values_.size()) t.values_.push_back(c);
        edge = static_cast<std::uint16_t>(j);
      }
      t.steps_.push_back({kNoNode, generations[i], edge});
    }
    return t;
  }

  const std::vector<TrajectoryStep>& steps() const noexcept { return steps_; }
  std::vector<TrajectoryStep>& mutable_steps() noexcept { return steps_; }
  const std::vector<double>& conductance_values() const noexcept { return values_; }

  std::size_t step_count() const noexcept { return steps_.empty() ? 0 : steps_.size() - 1; }
  std::int32_t generation(std::size_t i) const { return steps_.at(i).generation; }
  NodeId vertex(std::size_t i) const { return steps_.at(i).vertex; }

  bool has_edge_data() const noexcept { return !values_.empty(); }

  // Entry conductance at step i >= 1, nullopt at the start.
  std::optional<double> entry_conductance(std::size_t i) const {
    const auto edge = steps_.at(i).edge;
    if (edge == kNoEdge || values_.empty()) return std::nullopt;
    return values_.at(edge);
  }

  // Exact test against the unit atom of the conductance law.
  bool entered_through_unit_edge(std::size_t i) const noexcept {
    const auto edge = steps_[i].edge;
    return edge != kNoEdge && edge < values_.size() && values_[edge] == 1.0;
  }

  std::vector<std::int32_t> generations() const {
    std::vector<std::int32_t> g;
    g.reserve(steps_.size());
    for (const auto& s : steps_) g.push_back(s.generation);
    return g;
  }

 private:
  std::vector<TrajectoryStep> steps_;
  std::vector<double> values_;
};

/// One-step law from `v`: neighbours (parent first, then children) with
/// probabilities proportional to the edge conductances.
template <WalkTree Tree>
std::vector<std::pair<NodeId, double>> transition_distribution(Tree& tree, NodeId v) {
  if (v == kAncestor) return {{kRoot, 1.0}};
  const ChildRange kids = tree.expand_for_walk(v);
  const double total = tree.neighbor_total(v);
  std::vector<std::pair<NodeId, double>> out;
  out.reserve(kids.size() + 1);
  out.emplace_back(tree.parent(v), tree.edge_weight(v) / total);
  for (const NodeId c : kids) out.emplace_back(c, tree.edge_weight(c) / total);
  return out;
}

/// Samples the next vertex by inverse CDF over the neighbour list.
template <WalkTree Tree, class Engine>
NodeId step(Tree& tree, NodeId v, Engine& engine) {
  if (v == kAncestor) return kRoot;
  const ChildRange kids = tree.expand_for_walk(v);
  double u = uniform01(engine) * tree.neighbor_total(v);
  u -= tree.edge_weight(v);
  if (u < 0.0) return tree.parent(v);
  for (const NodeId c : kids) {
    u -= tree.edge_weight(c);
    if (u < 0.0) return c;
  }
  // Rounding left a sliver of mass past the last child.
  return kids.back();
}

/// Appends `extra` steps to `trajectory`, continuing from its last vertex.
template <WalkTree Tree, class Engine>
void extend_walk(Tree& tree, Trajectory& trajectory, std::size_t extra, Engine& engine) {
  auto& steps = trajectory.mutable_steps();
  if (steps.empty()) throw std::invalid_argument("cannot extend an empty trajectory");
  steps.reserve(steps.size() + extra);
  NodeId v = steps.back().vertex;
  for (std::size_t i = 0; i < extra; ++i) {
    const NodeId next = step(tree, v, engine);
    // The edge crossed belongs to whichever endpoint is the child.
    const NodeId child = next == tree.parent(v) ? v : next;
    steps.push_back({next, tree.generation(next), tree.edge_index(child)});
    v = next;
  }
}

template <WalkTree Tree, class Engine>
Trajectory run_walk(Tree& tree, std::size_t n, Engine& engine, NodeId start = kRoot) {
  Trajectory trajectory({{start, tree.generation(start), kNoEdge}}, tree.conductance_values());
  extend_walk(tree, trajectory, n, engine);
  return trajectory;
}

// First index at which the walk is in generation k.
inline std::optional<std::size_t> hitting_time_level(const Trajectory& trajectory, std::int32_t k) {
  const auto& steps = trajectory.steps();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].generation == k) return i;
  }
  return std::nullopt;
}

// Number of visits to v, counting the start.
inline std::size_t local_time(const Trajectory& trajectory, NodeId v) {
  std::size_t visits = 0;
  for (const auto& s : trajectory.steps()) visits += s.vertex == v;
  return visits;
}

/// Writes `step,generation,conductance_index` for every `stride`-th entry.
/// The start has no entry edge and is written with index -1.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be positive");
  os << "step,generation,conductance_index\n";
  const auto& steps = trajectory.steps();
  for (std::size_t i = 0; i < steps.size(); i += stride) {
    os << i << ',' << steps[i].generation << ',';
    if (steps[i].edge == kNoEdge) {
      os << -1;
    } else {
      os << steps[i].edge;
    }
    os << '\n';
  }
}

}  // namespace gwrw
