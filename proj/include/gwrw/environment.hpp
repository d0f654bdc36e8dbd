#pragma once

// Lazily grown weighted Galton-Watson tree.
//
// Vertices live in a flat arena with dense ids: 0 is the virtual ancestor
// (generation -1), 1 is the root. Children of a vertex are contiguous. Every
// vertex carries a 64-bit key derived from its parent's key and its child
// index; its offspring count and the conductance of its parent edge are pure
// functions of that key, so the realized tree does not depend on the order in
// which vertices get expanded.

#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <ranges>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gwrw/laws.hpp"
#include "gwrw/rng.hpp"
#include "gwrw/tree_text.hpp"

namespace gwrw {

inline constexpr NodeId kAncestor = 0;
inline constexpr NodeId kRoot = 1;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

using ChildRange = std::ranges::iota_view<NodeId, NodeId>;

// Index used in trajectories for "no entry edge" (the starting vertex).
inline constexpr std::uint16_t kNoEdge = std::numeric_limits<std::uint16_t>::max();

class Environment {
 public:
  Environment(OffspringLaw offspring, ConductanceLaw conductance, std::uint64_t seed)
      : offspring_(std::move(offspring)), conductance_(std::move(conductance)), seed_(seed) {
    nodes_.reserve(1024);
    nodes_.push_back(Node{.key = 0, .conductance = 0.0, .total = 0.0, .parent = kNoNode,
                          .first_child = kRoot, .child_count = 1, .generation = -1, .edge = kNoEdge});
    const std::uint64_t root_key = stream_seed(seed_, StreamTag::environment);
    const auto edge = draw_edge(root_key);
    nodes_.push_back(Node{.key = root_key, .conductance = support()[edge], .total = 0.0, .parent = kAncestor,
                          .first_child = 0, .child_count = 0, .generation = 0, .edge = edge});
    nodes_[kAncestor].total = nodes_[kRoot].conductance;
  }

  const OffspringLaw& offspring_law() const noexcept { return offspring_; }
  const ConductanceLaw& conductance_law() const noexcept { return conductance_; }
  std::uint64_t seed() const noexcept { return seed_; }

  NodeId ancestor() const noexcept { return kAncestor; }
  NodeId root() const noexcept { return kRoot; }
  std::size_t size() const noexcept { return nodes_.size(); }

  NodeId parent(NodeId v) const { return node(v).parent; }
  std::int32_t generation(NodeId v) const { return node(v).generation; }
  bool expanded(NodeId v) const { return node(v).child_count > 0; }
  std::uint64_t key(NodeId v) const { return node(v).key; }

  /// Realizes the children of `v` if needed and returns their ids. Repeated
  /// calls return the same ids.
  ChildRange ensure_children(NodeId v) {
    if (v == kAncestor) throw std::invalid_argument("virtual ancestor has no sampled children");
    const Node& n = node(v);
    if (n.child_count == 0) return expand(v);
    return {n.first_child, n.first_child + n.child_count};
  }

  /// Conductance of the edge between `v` and its parent.
  double edge_conductance(NodeId v) const {
    if (v == kAncestor) throw std::invalid_argument("no parent edge");
    return node(v).conductance;
  }

  // Index of the parent-edge conductance in conductance_values().
  std::uint16_t edge_index(NodeId v) const { return node(v).edge; }

  bool is_mu1_edge(NodeId v) const { return conductance_.is_large(edge_conductance(v)); }

  const std::vector<double>& conductance_values() const noexcept { return conductance_.support(); }

  // Tree interface used by the walk. These skip the checks above.
  ChildRange expand_for_walk(NodeId v) {
    const Node& n = nodes_[v];
    if (n.child_count == 0) return expand(v);
    return {n.first_child, n.first_child + n.child_count};
  }
  double edge_weight(NodeId v) const noexcept { return nodes_[v].conductance; }
  double neighbor_total(NodeId v) const noexcept { return nodes_[v].total; }

  /// Whether the large-conductance subtree hanging from `v` reaches `depth`
  /// generations below `v`. Grows the tree as needed, depth first with early
  /// exit.
  bool t1_survives_to_depth(NodeId v, std::int32_t depth) {
    if (depth <= 0) return true;
    std::vector<std::pair<NodeId, std::int32_t>> stack{{v, 0}};
    while (!stack.empty()) {
      const auto [u, level] = stack.back();
      stack.pop_back();
      if (level == depth) return true;
      const ChildRange kids = u == kAncestor ? ChildRange{kRoot, kRoot + 1} : ensure_children(u);
      for (auto it = kids.end(); it != kids.begin();) {
        const NodeId c = *--it;
        if (conductance_.is_large(nodes_[c].conductance)) stack.emplace_back(c, level + 1);
      }
    }
    return false;
  }

  // Header fields identifying the laws and seed.
  std::vector<std::pair<std::string, std::string>> header_fields() const {
    return {{"seed", std::to_string(seed_)},
            {"offspring", offspring_.to_string()},
            {"alpha", format_double(conductance_.alpha())},
            {"epsilon", format_double(conductance_.epsilon())},
            {"mu1", format_atoms(conductance_.mu1())},
            {"kappa", format_double(conductance_.kappa())}};
  }

  /// Writes every realized vertex in arena order.
  void write_text(std::ostream& os) const {
    TreeText text;
    text.header = header_fields();
    text.rows.reserve(nodes_.size() - 1);
    for (NodeId v = kRoot; v < nodes_.size(); ++v) {
      const Node& n = nodes_[v];
      text.rows.push_back({v, n.parent, n.generation, n.conductance});
    }
    write_tree_text(os, text);
  }

  /// Rebuilds a live environment from a file written by write_text (or by a
  /// truncation export carrying the same header). The file must agree with
  /// what the seed generates; growth continues from there.
  static Environment read_text(std::istream& is) {
    const TreeText text = read_tree_text(is);
    auto field = [&](const char* key) -> const std::string& {
      const std::string* value = text.find(key);
      if (!value) throw std::invalid_argument(std::string("environment header lacks '") + key + "'");
      return *value;
    };
    const auto seed = parse_integer<std::uint64_t>(field("seed"));
    const auto alpha = parse_double(field("alpha"));
    const auto epsilon = parse_double(field("epsilon"));
    const auto kappa = parse_double(field("kappa"));
    if (!seed || !alpha || !epsilon || !kappa) throw std::invalid_argument("malformed environment header");
    Environment env(OffspringLaw::parse(field("offspring")),
                    ConductanceLaw(*alpha, *epsilon, parse_atoms(field("mu1")), *kappa), *seed);

    auto inconsistent = [](const TreeTextRow& r, const char* what) {
      return std::invalid_argument("environment row " + std::to_string(r.id) + ": " + what);
    };
    for (std::size_t i = 0; i < text.rows.size(); ++i) {
      const TreeTextRow& r = text.rows[i];
      if (r.id != i + 1) throw inconsistent(r, "ids must be dense and start at 1");
      if (i == 0) {
        if (r.parent != kAncestor || r.generation != 0) throw inconsistent(r, "first row must be the root");
        if (r.conductance != env.nodes_[kRoot].conductance) throw inconsistent(r, "conductance disagrees with seed");
        continue;
      }
      if (r.parent == kAncestor || r.parent >= r.id) throw inconsistent(r, "parent must precede child");
      Node& p = env.nodes_[r.parent];
      if (p.child_count == 0) {
        p.first_child = r.id;
      } else if (r.id != p.first_child + p.child_count) {
        throw inconsistent(r, "children of a vertex must be listed contiguously");
      }
      const std::uint32_t index = p.child_count++;
      const std::uint64_t key = hash_combine(p.key, index + 1);
      const auto edge = env.draw_edge(key);
      if (r.generation != p.generation + 1) throw inconsistent(r, "generation must be parent generation + 1");
      if (r.conductance != env.support()[edge]) throw inconsistent(r, "conductance disagrees with seed");
      env.nodes_.push_back(Node{.key = key, .conductance = env.support()[edge], .total = 0.0, .parent = r.parent,
                                .first_child = 0, .child_count = 0, .generation = r.generation, .edge = edge});
    }
    for (NodeId v = kRoot; v < env.nodes_.size(); ++v) {
      Node& n = env.nodes_[v];
      if (n.child_count == 0) continue;
      if (n.child_count != env.offspring_.quantile(keyed_uniform(n.key, 0))) {
        throw std::invalid_argument("environment row " + std::to_string(v) + ": offspring count disagrees with seed");
      }
      n.total = n.conductance;
      for (NodeId c = n.first_child; c < n.first_child + n.child_count; ++c) n.total += env.nodes_[c].conductance;
    }
    return env;
  }

 private:
  struct Node {
    std::uint64_t key;
    double conductance;  // edge to parent
    double total;        // sum of conductances of all incident edges, once expanded
    NodeId parent;
    NodeId first_child;
    std::uint32_t child_count;  // 0 = not yet expanded
    std::int32_t generation;
    std::uint16_t edge;
  };

  const std::vector<double>& support() const noexcept { return conductance_.support(); }

  const Node& node(NodeId v) const {
    if (v >= nodes_.size()) throw std::out_of_range("unknown vertex id " + std::to_string(v));
    return nodes_[v];
  }

  std::uint16_t draw_edge(std::uint64_t key) const noexcept {
    return conductance_.draw_index(keyed_uniform(key, 1), keyed_uniform(key, 2));
  }

  ChildRange expand(NodeId v) {
    const std::uint64_t key = nodes_[v].key;
    const std::int32_t generation = nodes_[v].generation;
    const std::uint32_t count = offspring_.quantile(keyed_uniform(key, 0));
    if (nodes_.size() + count > kNoNode) throw std::length_error("environment arena exhausted");
    const auto first = static_cast<NodeId>(nodes_.size());
    double total = nodes_[v].conductance;
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint64_t child_key = hash_combine(key, i + 1);
      const auto edge = draw_edge(child_key);
      const double c = support()[edge];
      total += c;
      nodes_.push_back(Node{.key = child_key, .conductance = c, .total = 0.0, .parent = v,
                            .first_child = 0, .child_count = 0, .generation = generation + 1, .edge = edge});
    }
    Node& n = nodes_[v];
    n.first_child = first;
    n.child_count = count;
    n.total = total;
    return {first, first + count};
  }

  OffspringLaw offspring_;
  ConductanceLaw conductance_;
  std::uint64_t seed_;
  std::vector<Node> nodes_;
};

}  // namespace gwrw
