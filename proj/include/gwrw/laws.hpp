#pragma once

// Offspring and conductance laws of the weighted Galton-Watson environment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gwrw/format.hpp"
#include "gwrw/rng.hpp"

namespace gwrw {

// A finite list of `value:weight` atoms, as written in config files and
// headers, e.g. "1:0.5,3:0.5".
struct Atom {
  double value;
  double weight;
};

inline std::vector<Atom> parse_atoms(std::string_view text) {
  std::vector<Atom> atoms;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = trim(text.substr(start, end - start));
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("expected value:weight, got '" + std::string(item) + "'");
    }
    const auto value = parse_double(item.substr(0, colon));
    const auto weight = parse_double(item.substr(colon + 1));
    if (!value || !weight) {
      throw std::invalid_argument("malformed atom '" + std::string(item) + "'");
    }
    atoms.push_back({*value, *weight});
    start = end + 1;
  }
  return atoms;
}

inline std::string format_atoms(const std::vector<Atom>& atoms) {
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += ',';
    out += format_double(atoms[i].value) + ':' + format_double(atoms[i].weight);
  }
  return out;
}

constexpr double kProbabilityTolerance = 1e-12;

/// Offspring law of the tree: a pmf on the positive integers with mean > 1.
class OffspringLaw {
 public:
  struct Entry {
    std::uint32_t children;
    double probability;
  };

  explicit OffspringLaw(std::vector<Entry> entries) {
    double total = 0.0;
    std::vector<Entry> kept;
    for (const auto& e : entries) {
      if (!(e.probability >= 0.0) || e.probability > 1.0) {
        throw std::invalid_argument("offspring probabilities must lie in [0, 1]");
      }
      if (e.children == 0 && e.probability > 0.0) {
        throw std::invalid_argument("offspring law must have no leaves");
      }
      total += e.probability;
      if (e.probability > 0.0) kept.push_back(e);
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
      throw std::invalid_argument("offspring probabilities must sum to 1");
    }
    std::sort(kept.begin(), kept.end(), [](const Entry& a, const Entry& b) { return a.children < b.children; });
    for (std::size_t i = 1; i < kept.size(); ++i) {
      if (kept[i].children == kept[i - 1].children) {
        throw std::invalid_argument("duplicate offspring count " + std::to_string(kept[i].children));
      }
    }
    entries_ = std::move(kept);
    double cumulative = 0.0;
    mean_ = 0.0;
    for (const auto& e : entries_) {
      cumulative += e.probability;
      cdf_.push_back(cumulative);
      mean_ += e.children * e.probability;
    }
    if (!(mean_ > 1.0)) {
      throw std::invalid_argument("offspring law must be supercritical (mean > 1)");
    }
  }

  static OffspringLaw parse(std::string_view text) {
    std::vector<Entry> entries;
    for (const auto& atom : parse_atoms(text)) {
      if (atom.value < 0 || atom.value != std::floor(atom.value) || atom.value > 1e9) {
        throw std::invalid_argument("offspring counts must be non-negative integers");
      }
      entries.push_back({static_cast<std::uint32_t>(atom.value), atom.weight});
    }
    return OffspringLaw(std::move(entries));
  }

  // Always `k` children.
  static OffspringLaw deterministic(std::uint32_t k) { return OffspringLaw({{k, 1.0}}); }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  double mean() const noexcept { return mean_; }

  double moment(int order) const {
    double m = 0.0;
    for (const auto& e : entries_) m += std::pow(static_cast<double>(e.children), order) * e.probability;
    return m;
  }

  // Inverse-CDF lookup for u in [0, 1).
  std::uint32_t quantile(double u) const noexcept {
    for (std::size_t i = 0; i + 1 < cdf_.size(); ++i) {
      if (u < cdf_[i]) return entries_[i].children;
    }
    return entries_.back().children;
  }

  // Speed of the simple random walk on a tree with this law, an upper bound
  // for the speed under any conductance law.
  double speed_bound() const noexcept {
    double bound = 0.0;
    for (const auto& e : entries_) {
      const double k = e.children;
      bound += e.probability * (k - 1.0) / (k + 1.0);
    }
    return bound;
  }

  std::string to_string() const {
    std::vector<Atom> atoms;
    for (const auto& e : entries_) atoms.push_back({static_cast<double>(e.children), e.probability});
    return format_atoms(atoms);
  }

 private:
  std::vector<Entry> entries_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
};

// Draws one offspring count; consumes exactly one uniform.
template <class Engine>
std::uint32_t sample_offspring(const OffspringLaw& law, Engine& engine) {
  return law.quantile(uniform01(engine));
}

/// Edge conductance law: value epsilon with probability alpha, otherwise a
/// draw from a finite law mu1 supported in [1/kappa, kappa] with an atom at 1.
///
/// Conductances are represented by an index into `support()`: index 0 is
/// epsilon, indices 1.. are the mu1 atoms in the order given. Keeping the
/// index lets the atom at 1 be recognised without floating-point comparison
/// against computed values.
class ConductanceLaw {
 public:
  ConductanceLaw(double alpha, double epsilon, std::vector<Atom> mu1, double kappa)
      : alpha_(alpha), epsilon_(epsilon), mu1_(std::move(mu1)), kappa_(kappa) {
    if (!(alpha_ >= 0.0 && alpha_ < 1.0)) throw std::invalid_argument("alpha must lie in [0, 1)");
    if (!(kappa_ >= 1.0) || std::isinf(kappa_)) throw std::invalid_argument("kappa must be a finite value >= 1");
    if (!(epsilon_ > 0.0)) throw std::invalid_argument("positive ε required; ε=0 model is out of scope");
    if (!(epsilon_ < 1.0 / kappa_)) throw std::invalid_argument("epsilon must be smaller than 1/kappa");
    if (mu1_.empty()) throw std::invalid_argument("mu1 must have at least one atom");
    double total = 0.0;
    bool has_unit_atom = false;
    for (const auto& a : mu1_) {
      if (!(a.value >= 1.0 / kappa_ && a.value <= kappa_)) {
        throw std::invalid_argument("mu1 value " + format_double(a.value) + " outside [1/kappa, kappa]");
      }
      if (!(a.weight >= 0.0 && a.weight <= 1.0)) throw std::invalid_argument("mu1 weights must lie in [0, 1]");
      if (a.value == 1.0 && a.weight > 0.0) has_unit_atom = true;
      total += a.weight;
    }
    for (std::size_t i = 0; i < mu1_.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (mu1_[i].value == mu1_[j].value) throw std::invalid_argument("duplicate mu1 value");
      }
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) throw std::invalid_argument("mu1 weights must sum to 1");
    if (!has_unit_atom) throw std::invalid_argument("mu1 must put positive weight on the value 1");

    support_.push_back(epsilon_);
    double cumulative = 0.0;
    for (const auto& a : mu1_) {
      support_.push_back(a.value);
      cumulative += a.weight;
      mu1_cdf_.push_back(cumulative);
    }
  }

  // Law with every edge equal to 1.
  static ConductanceLaw unit() { return ConductanceLaw(0.0, 0.5, {{1.0, 1.0}}, 1.0); }

  double alpha() const noexcept { return alpha_; }
  double epsilon() const noexcept { return epsilon_; }
  double kappa() const noexcept { return kappa_; }
  const std::vector<Atom>& mu1() const noexcept { return mu1_; }
  const std::vector<double>& support() const noexcept { return support_; }

  static constexpr std::uint16_t kEpsilonIndex = 0;

  // Support index from two independent uniforms.
  std::uint16_t draw_index(double u_kind, double u_value) const noexcept {
    if (u_kind < alpha_) return kEpsilonIndex;
    for (std::size_t i = 0; i + 1 < mu1_cdf_.size(); ++i) {
      if (u_value < mu1_cdf_[i]) return static_cast<std::uint16_t>(i + 1);
    }
    return static_cast<std::uint16_t>(mu1_cdf_.size());
  }

  template <class Engine>
  double sample(Engine& engine) const {
    const double u_kind = uniform01(engine);
    const double u_value = uniform01(engine);
    return support_[draw_index(u_kind, u_value)];
  }

  // True for conductances in [1/kappa, kappa], i.e. mu1 draws.
  bool is_large(double conductance) const noexcept { return conductance >= 1.0 / kappa_; }

  // Large-conductance subtree is supercritical iff (1 - alpha) * m > 1.
  double t1_mean_offspring(const OffspringLaw& offspring) const noexcept { return (1.0 - alpha_) * offspring.mean(); }

 private:
  double alpha_;
  double epsilon_;
  std::vector<Atom> mu1_;
  double kappa_;
  std::vector<double> support_;
  std::vector<double> mu1_cdf_;
};

}  // namespace gwrw
