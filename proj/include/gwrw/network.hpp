#pragma once

// Electrical-network computations on finite truncations of an environment.
//
// A truncation keeps every vertex down to generation `depth`; the vertices at
// that generation form the absorbing boundary. Effective conductances are
// computed by folding series and parallel laws from the boundary upward. The
// harmonic-function solver works on the same truncation through a sparse
// linear system and serves as an independent check of the fold.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gwrw/environment.hpp"
#include "gwrw/tree_text.hpp"
#include "gwrw/walk.hpp"

namespace gwrw {

/// Non-negative extended real; infinity stands for a short circuit.
struct ConductanceValue {
  double value = 0.0;

  static constexpr ConductanceValue infinite() noexcept { return {std::numeric_limits<double>::infinity()}; }
  constexpr bool is_infinite() const noexcept { return value == std::numeric_limits<double>::infinity(); }
  constexpr double resistance() const noexcept { return value == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / value; }

  friend constexpr bool operator==(ConductanceValue, ConductanceValue) = default;
};

constexpr ConductanceValue combine_series(ConductanceValue a, ConductanceValue b) noexcept {
  if (a.value == 0.0 || b.value == 0.0) return {0.0};
  if (a.is_infinite()) return b;
  if (b.is_infinite()) return a;
  return {a.value * b.value / (a.value + b.value)};
}

inline ConductanceValue combine_parallel(std::span<const ConductanceValue> branches) noexcept {
  double total = 0.0;
  for (const auto& c : branches) total += c.value;
  return {total};
}

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Frozen finite tree: the virtual ancestor, the root, and all vertices down
/// to generation `depth()`. Ids are assigned breadth first, so every child
/// has a larger id than its parent and siblings are contiguous.
class Truncation {
 public:
  /// Grows `env` down to generation `depth` and copies it.
  static Truncation from_environment(Environment& env, std::int32_t depth) {
    if (depth < 1) throw std::invalid_argument("truncation depth must be at least 1");
    Truncation t;
    t.depth_ = depth;
    t.values_ = env.conductance_values();
    t.header_ = env.header_fields();
    t.header_.emplace_back("depth", std::to_string(depth));
    t.nodes_.push_back({kNoNode, kRoot, 1, -1, kNoEdge});
    std::deque<std::pair<NodeId, NodeId>> queue;  // (environment id, truncation id)
    t.nodes_.push_back({kAncestor, 0, 0, 0, env.edge_index(kRoot)});
    queue.emplace_back(kRoot, kRoot);
    while (!queue.empty()) {
      const auto [source, target] = queue.front();
      queue.pop_front();
      if (env.generation(source) >= depth) continue;
      const ChildRange kids = env.ensure_children(source);
      t.nodes_[target].first_child = static_cast<NodeId>(t.nodes_.size());
      t.nodes_[target].child_count = static_cast<std::uint32_t>(kids.size());
      for (const NodeId c : kids) {
        const auto id = static_cast<NodeId>(t.nodes_.size());
        t.nodes_.push_back({target, 0, 0, env.generation(c), env.edge_index(c)});
        queue.emplace_back(c, id);
      }
    }
    t.finish();
    return t;
  }

  /// Builds from explicit rows (the root first, parents before children,
  /// siblings contiguous). Leaves must all sit at the deepest generation.
  static Truncation from_rows(const std::vector<TreeTextRow>& rows,
                              std::vector<std::pair<std::string, std::string>> header = {}) {
    Truncation t;
    t.header_ = std::move(header);
    t.nodes_.push_back({kNoNode, kRoot, 1, -1, kNoEdge});
    auto fail = [](const TreeTextRow& r, const std::string& what) {
      return std::invalid_argument("truncation row " + std::to_string(r.id) + ": " + what);
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const TreeTextRow& r = rows[i];
      if (r.id != i + 1) throw fail(r, "ids must be dense and start at 1");
      if (!(r.conductance > 0.0) || std::isinf(r.conductance)) throw fail(r, "conductance must be positive and finite");
      if (i == 0) {
        if (r.parent != kAncestor || r.generation != 0) throw fail(r, "first row must be the root");
        t.nodes_.push_back({kAncestor, 0, 0, 0, t.intern(r.conductance)});
        continue;
      }
      if (r.parent == kAncestor || r.parent >= r.id) throw fail(r, "parent must precede child");
      Node& p = t.nodes_[r.parent];
      if (p.child_count == 0) {
        p.first_child = r.id;
      } else if (r.id != p.first_child + p.child_count) {
        throw fail(r, "children of a vertex must be listed contiguously");
      }
      ++p.child_count;
      if (r.generation != p.generation + 1) throw fail(r, "generation must be parent generation + 1");
      t.nodes_.push_back({r.parent, 0, 0, r.generation, t.intern(r.conductance)});
    }
    if (t.nodes_.size() < 3) throw std::invalid_argument("truncation needs at least one generation below the root");
    t.depth_ = 0;
    for (const auto& n : t.nodes_) t.depth_ = std::max(t.depth_, n.generation);
    for (NodeId v = kRoot; v < t.nodes_.size(); ++v) {
      const Node& n = t.nodes_[v];
      if ((n.child_count == 0) != (n.generation == t.depth_)) {
        throw std::invalid_argument("truncation vertex " + std::to_string(v) +
                                    ": leaves must lie exactly on the boundary generation");
      }
    }
    t.finish();
    return t;
  }

  /// Every vertex has `d` children down to `depth`; all child edges carry
  /// `conductance`, the root edge carries `root_conductance`.
  static Truncation regular(std::uint32_t d, std::int32_t depth, double conductance = 1.0,
                            double root_conductance = 1.0) {
    std::vector<TreeTextRow> rows{{kRoot, kAncestor, 0, root_conductance}};
    std::size_t level_begin = 0;
    for (std::int32_t g = 1; g <= depth; ++g) {
      const std::size_t level_end = rows.size();
      for (std::size_t i = level_begin; i < level_end; ++i) {
        for (std::uint32_t k = 0; k < d; ++k) {
          rows.push_back({static_cast<NodeId>(rows.size() + 1), rows[i].id, g, conductance});
        }
      }
      level_begin = level_end;
    }
    return from_rows(rows);
  }

  /// Unary path rho - v1 - v2 - ... with the given child-edge conductances.
  static Truncation chain(const std::vector<double>& conductances, double root_conductance = 1.0) {
    std::vector<TreeTextRow> rows{{kRoot, kAncestor, 0, root_conductance}};
    for (std::size_t i = 0; i < conductances.size(); ++i) {
      rows.push_back({static_cast<NodeId>(i + 2), static_cast<NodeId>(i + 1), static_cast<std::int32_t>(i + 1),
                      conductances[i]});
    }
    return from_rows(rows);
  }

  static Truncation read_text(std::istream& is) {
    TreeText text = read_tree_text(is);
    return from_rows(text.rows, std::move(text.header));
  }

  void write_text(std::ostream& os) const {
    TreeText text;
    text.header = header_;
    for (NodeId v = kRoot; v < nodes_.size(); ++v) {
      text.rows.push_back({v, nodes_[v].parent, nodes_[v].generation, edge_weight(v)});
    }
    write_tree_text(os, text);
  }

  std::int32_t depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<std::pair<std::string, std::string>>& header() const noexcept { return header_; }

  NodeId parent(NodeId v) const { return nodes_.at(v).parent; }
  std::int32_t generation(NodeId v) const { return nodes_.at(v).generation; }
  ChildRange children(NodeId v) const {
    const Node& n = nodes_.at(v);
    return {n.first_child, n.first_child + n.child_count};
  }
  bool on_boundary(NodeId v) const { return v != kAncestor && generation(v) == depth_; }

  double edge_conductance(NodeId v) const {
    if (v == kAncestor) throw std::invalid_argument("no parent edge");
    return values_[nodes_.at(v).edge];
  }

  /// Replaces the conductance of the edge above `v`.
  void set_edge_conductance(NodeId v, double value) {
    if (v == kAncestor || v >= nodes_.size()) throw std::invalid_argument("no parent edge");
    if (!(value > 0.0) || std::isinf(value)) throw std::invalid_argument("conductance must be positive and finite");
    nodes_[v].edge = intern(value);
    recompute_total(v);
    recompute_total(nodes_[v].parent);
  }

  // Walk interface; boundary vertices reflect.
  ChildRange expand_for_walk(NodeId v) const noexcept {
    const Node& n = nodes_[v];
    return {n.first_child, n.first_child + n.child_count};
  }
  double edge_weight(NodeId v) const noexcept { return v == kAncestor ? 0.0 : values_[nodes_[v].edge]; }
  std::uint16_t edge_index(NodeId v) const noexcept { return nodes_[v].edge; }
  double neighbor_total(NodeId v) const noexcept { return totals_[v]; }
  const std::vector<double>& conductance_values() const noexcept { return values_; }

 private:
  struct Node {
    NodeId parent;
    NodeId first_child;
    std::uint32_t child_count;
    std::int32_t generation;
    std::uint16_t edge;
  };

  std::uint16_t intern(double value) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] == value) return static_cast<std::uint16_t>(i);
    }
    if (values_.size() + 1 >= kNoEdge) throw std::length_error("too many distinct conductances");
    values_.push_back(value);
    return static_cast<std::uint16_t>(values_.size() - 1);
  }

  void recompute_total(NodeId v) {
    double total = edge_weight(v);
    for (const NodeId c : expand_for_walk(v)) total += edge_weight(c);
    totals_[v] = total;
  }

  void finish() {
    totals_.assign(nodes_.size(), 0.0);
    for (NodeId v = 0; v < nodes_.size(); ++v) recompute_total(v);
  }

  std::int32_t depth_ = 0;
  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<double> totals_;
  std::vector<std::pair<std::string, std::string>> header_;
};

namespace detail {
// Conductance from every vertex down to generation `level` (<= depth).
inline std::vector<ConductanceValue> conductances_to_level(const Truncation& t, std::int32_t level) {
  std::vector<ConductanceValue> c(t.size(), ConductanceValue{0.0});
  for (NodeId v = static_cast<NodeId>(t.size() - 1); v >= kRoot; --v) {
    const std::int32_t g = t.generation(v);
    if (g > level) continue;
    if (g == level) {
      c[v] = ConductanceValue::infinite();
      continue;
    }
    double total = 0.0;
    for (const NodeId child : t.children(v)) {
      total += combine_series({t.edge_conductance(child)}, c[child]).value;
    }
    c[v] = {total};
  }
  c[kAncestor] = combine_series({t.edge_conductance(kRoot)}, c[kRoot]);
  return c;
}
}  // namespace detail

/// Effective conductance between `from` and the boundary generation `level`
/// (defaults to the truncation depth).
inline ConductanceValue effective_conductance_to_level(const Truncation& t, NodeId from,
                                                       std::optional<std::int32_t> boundary = std::nullopt) {
  const std::int32_t level = boundary.value_or(t.depth());
  if (level < 1 || level > t.depth()) throw std::invalid_argument("level outside the truncation");
  if (t.generation(from) >= level) throw std::invalid_argument("nothing between vertex and boundary");
  return detail::conductances_to_level(t, level)[from];
}

/// Probability that the walk from the root hits the virtual ancestor before
/// generation `level`: xi(rho, rho*) / (xi(rho, rho*) + C(rho, G_level)).
inline double return_probability_before_level(const Truncation& t,
                                             std::optional<std::int32_t> boundary = std::nullopt) {
  const double c = effective_conductance_to_level(t, kRoot, boundary).value;
  const double top = t.edge_conductance(kRoot);
  return top / (top + c);
}

inline constexpr std::size_t kMaxSolverVertices = 100000;
inline constexpr double kSolverResidual = 1e-12;

/// Harmonic extension on the truncation. With `absorb_top` the result is the
/// probability of hitting the virtual ancestor before the boundary (h = 1 at
/// the ancestor, 0 on the boundary); otherwise the boundary values are
/// swapped and h is the probability of reaching the boundary first.
inline std::vector<double> solve_absorbing_chain(const Truncation& t, bool absorb_top = true) {
  if (t.size() > kMaxSolverVertices + 1) throw std::invalid_argument("truncation too large for the solver");
  const double top_value = absorb_top ? 1.0 : 0.0;
  const double boundary_value = absorb_top ? 0.0 : 1.0;

  // Unknowns are the interior vertices, numbered by id order.
  std::vector<std::int64_t> unknown(t.size(), -1);
  std::int64_t count = 0;
  for (NodeId v = kRoot; v < t.size(); ++v) {
    if (!t.on_boundary(v)) unknown[v] = count++;
  }

  using SpMat = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(count);
  for (NodeId v = kRoot; v < t.size(); ++v) {
    const auto row = unknown[v];
    if (row < 0) continue;
    const double total = t.neighbor_total(v);
    triplets.emplace_back(row, row, 1.0);
    auto couple = [&](NodeId u, double weight) {
      const double p = weight / total;
      if (u == kAncestor) {
        rhs[row] += p * top_value;
      } else if (unknown[u] < 0) {
        rhs[row] += p * boundary_value;
      } else {
        triplets.emplace_back(row, unknown[u], -p);
      }
    };
    couple(t.parent(v), t.edge_conductance(v));
    for (const NodeId c : t.children(v)) couple(c, t.edge_conductance(c));
  }
  SpMat system(count, count);
  system.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(system);
  lu.factorize(system);
  if (lu.info() != Eigen::Success) throw SolverError("solver failed: factorization", std::numeric_limits<double>::infinity());
  Eigen::VectorXd x = lu.solve(rhs);
  double residual = (system * x - rhs).lpNorm<Eigen::Infinity>();
  for (int refine = 0; refine < 3 && residual >= kSolverResidual; ++refine) {
    x += lu.solve(rhs - system * x);
    residual = (system * x - rhs).lpNorm<Eigen::Infinity>();
  }
  if (!(residual < kSolverResidual)) {
    throw SolverError("solver failed: residual " + std::to_string(residual), residual);
  }

  std::vector<double> h(t.size(), boundary_value);
  h[kAncestor] = top_value;
  for (NodeId v = kRoot; v < t.size(); ++v) {
    if (unknown[v] >= 0) h[v] = x[unknown[v]];
  }
  return h;
}

// `vertex_id,h` rows, ancestor included.
inline void write_solution_csv(std::ostream& os, std::span<const double> h, const std::string& header) {
  os << header << "vertex_id,h\n";
  for (std::size_t v = 0; v < h.size(); ++v) os << v << ',' << format_double(h[v]) << '\n';
}

struct EscapeEstimate {
  double escape = 0.0;                   // at the deepest level
  std::vector<double> escape_by_level;   // levels 1..k_max, non-increasing
  std::vector<double> return_by_level;   // levels 1..k_max, non-decreasing
  std::vector<double> conductance_by_level;
};

/// Escape probabilities 1 - P(hit rho* before G_k) for k = 1..depth. The
/// limit k -> infinity is the quenched escape probability; the sequence is
/// reported so that truncation error stays visible.
inline EscapeEstimate escape_probability_estimate(const Truncation& t) {
  EscapeEstimate out;
  for (std::int32_t k = 1; k <= t.depth(); ++k) {
    const double c = effective_conductance_to_level(t, kRoot, k).value;
    const double ret = return_probability_before_level(t, k);
    out.conductance_by_level.push_back(c);
    out.return_by_level.push_back(ret);
    out.escape_by_level.push_back(1.0 - ret);
  }
  out.escape = out.escape_by_level.back();
  return out;
}

inline EscapeEstimate escape_probability_estimate(Environment& env, std::int32_t k_max) {
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  return escape_probability_estimate(Truncation::from_environment(env, k_max));
}

struct ProportionEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
};

/// Monte Carlo frequency of hitting the virtual ancestor before the boundary
/// for walks started at the root.
template <class Engine>
ProportionEstimate estimate_return_probability_mc(const Truncation& t, std::size_t walks, Engine& engine) {
  if (walks == 0) throw std::invalid_argument("need at least one walk");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < walks; ++i) {
    NodeId v = kRoot;
    while (true) {
      v = step(t, v, engine);
      if (v == kAncestor) {
        ++hits;
        break;
      }
      if (t.generation(v) == t.depth()) break;
    }
  }
  ProportionEstimate out;
  out.trials = walks;
  out.value = static_cast<double>(hits) / static_cast<double>(walks);
  out.standard_error = std::sqrt(out.value * (1.0 - out.value) / static_cast<double>(walks));
  return out;
}

}  // namespace gwrw
