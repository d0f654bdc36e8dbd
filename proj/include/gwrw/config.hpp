#pragma once

// Experiment configuration: a flat key = value text format grouped in
// [sections]. '#' starts a comment. Every key is optional except run.seed,
// which may also come from the command line.
//
//   [model]
//   offspring = 2:1
//   alpha = 0
//   ...

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gwrw/format.hpp"
#include "gwrw/laws.hpp"
#include "gwrw/regen.hpp"
#include "gwrw/simulation.hpp"

namespace gwrw {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VerifySettings {
  std::size_t identity_truncations = 100;
  std::int32_t identity_max_depth = 8;
  double identity_tolerance = 1e-9;
  std::size_t rayleigh_truncations = 1000;
  double rayleigh_tolerance = 1e-12;
  std::size_t mc_truncations = 20;
  std::size_t mc_walks = 100000;
  std::int32_t mc_depth = 5;
  double mc_sigmas = 4.0;
  std::size_t mc_min_pass = 19;
  std::size_t ks_replicas = 2000;
  std::size_t ks_steps = 10000;
  double ks_critical = 0.0365;
  double variance_ratio_tolerance = 0.15;
  std::size_t speed_steps = 1000000;
  double speed_tolerance = 0.01;
};

struct ExperimentConfig {
  std::string offspring = "2:1";
  double alpha = 0.0;
  double epsilon = 0.01;
  std::string mu1 = "1:1";
  double kappa = 1.0;

  std::optional<std::uint64_t> seed;
  std::size_t steps = 1000000;
  std::size_t replicas = 16;
  std::int32_t margin = kDefaultMargin;
  std::size_t bootstrap = 1000;
  std::size_t threads = 1;
  std::size_t trajectory_stride = 0;  // 0 disables the trajectory export

  std::vector<double> t_grid{0.25, 0.5, 1.0};
  std::vector<double> epsilons{0.1, 0.01, 0.001};
  std::int32_t depth = 8;

  VerifySettings verify;

  std::string out_dir = "out";

  Model model() const {
    return {OffspringLaw::parse(offspring), ConductanceLaw(alpha, epsilon, parse_atoms(mu1), kappa)};
  }

  ReplicaOptions replica_options() const {
    ReplicaOptions o;
    o.steps = steps;
    o.replicas = replicas;
    o.margin = margin;
    o.threads = threads;
    return o;
  }

  std::uint64_t require_seed() const {
    if (!seed) throw ConfigError("run.seed is required (set it in the config or pass --seed)");
    return *seed;
  }

  /// Canonical text of everything that determines results. Thread count and
  /// output directory are left out: they do not change any output.
  std::string to_text() const {
    std::ostringstream os;
    auto list = [](const std::vector<double>& xs) {
      std::string s;
      for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_double(xs[i]);
      return s;
    };
    os << "[model]\n"
       << "offspring = " << offspring << '\n'
       << "alpha = " << format_double(alpha) << '\n'
       << "epsilon = " << format_double(epsilon) << '\n'
       << "mu1 = " << mu1 << '\n'
       << "kappa = " << format_double(kappa) << '\n'
       << "[run]\n";
    if (seed) os << "seed = " << *seed << '\n';
    os << "steps = " << steps << '\n'
       << "replicas = " << replicas << '\n'
       << "margin = " << margin << '\n'
       << "bootstrap = " << bootstrap << '\n'
       << "trajectory_stride = " << trajectory_stride << '\n'
       << "[donsker]\n"
       << "t_grid = " << list(t_grid) << '\n'
       << "[sweep]\n"
       << "epsilons = " << list(epsilons) << '\n'
       << "[network]\n"
       << "depth = " << depth << '\n'
       << "[verify]\n"
       << "identity_truncations = " << verify.identity_truncations << '\n'
       << "identity_max_depth = " << verify.identity_max_depth << '\n'
       << "identity_tolerance = " << format_double(verify.identity_tolerance) << '\n'
       << "rayleigh_truncations = " << verify.rayleigh_truncations << '\n'
       << "rayleigh_tolerance = " << format_double(verify.rayleigh_tolerance) << '\n'
       << "mc_truncations = " << verify.mc_truncations << '\n'
       << "mc_walks = " << verify.mc_walks << '\n'
       << "mc_depth = " << verify.mc_depth << '\n'
       << "mc_sigmas = " << format_double(verify.mc_sigmas) << '\n'
       << "mc_min_pass = " << verify.mc_min_pass << '\n'
       << "ks_replicas = " << verify.ks_replicas << '\n'
       << "ks_steps = " << verify.ks_steps << '\n'
       << "ks_critical = " << format_double(verify.ks_critical) << '\n'
       << "variance_ratio_tolerance = " << format_double(verify.variance_ratio_tolerance) << '\n'
       << "speed_steps = " << verify.speed_steps << '\n'
       << "speed_tolerance = " << format_double(verify.speed_tolerance) << '\n';
    return os.str();
  }

  // The canonical text with every line prefixed by "# ".
  std::string header_comment() const {
    std::string out;
    std::istringstream in(to_text());
    std::string line;
    while (std::getline(in, line)) out += "# " + line + '\n';
    return out;
  }
};

namespace detail {

struct ConfigEntry {
  std::string value;
  std::size_t line;
};

inline std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = trim(text.substr(start, end - start));
    const auto value = parse_double(item);
    if (!value) throw std::invalid_argument("expected a comma-separated list of numbers");
    out.push_back(*value);
    start = end + 1;
  }
  return out;
}

}  // namespace detail

/// Parses config text. `source` names the input in diagnostics, which have
/// the form "source:line: section.key: message".
inline ExperimentConfig parse_config(std::string_view text, const std::string& source = "config") {
  ExperimentConfig cfg;
  std::map<std::string, detail::ConfigEntry> entries;
  std::string section;
  std::size_t line_number = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  auto error_at = [&](std::size_t line, const std::string& what) {
    return ConfigError(source + ":" + std::to_string(line) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_number;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw error_at(line_number, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw error_at(line_number, "expected 'key = value'");
    if (section.empty()) throw error_at(line_number, "key outside of any [section]");
    const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
    if (entries.count(key)) throw error_at(line_number, key + ": duplicate key");
    entries[key] = {std::string(trim(line.substr(eq + 1))), line_number};
  }

  auto fail = [&](const std::string& key, const std::string& what) {
    return error_at(entries.at(key).line, key + ": " + what);
  };
  auto take = [&](const std::string& key, auto setter) {
    const auto it = entries.find(key);
    if (it == entries.end()) return;
    try {
      setter(it->second.value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw fail(key, e.what());
    }
    it->second.line = 0;  // consumed
  };
  auto number = [](const std::string& v) {
    const auto x = parse_double(v);
    if (!x) throw std::invalid_argument("expected a number, got '" + v + "'");
    return *x;
  };
  auto count = [](const std::string& v) {
    const auto x = parse_integer<std::size_t>(v);
    if (!x) throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
    return *x;
  };
  auto integer = [](const std::string& v) {
    const auto x = parse_integer<std::int32_t>(v);
    if (!x) throw std::invalid_argument("expected an integer, got '" + v + "'");
    return *x;
  };

  take("model.offspring", [&](const std::string& v) { cfg.offspring = v; });
  take("model.alpha", [&](const std::string& v) { cfg.alpha = number(v); });
  take("model.epsilon", [&](const std::string& v) { cfg.epsilon = number(v); });
  take("model.mu1", [&](const std::string& v) { cfg.mu1 = v; });
  take("model.kappa", [&](const std::string& v) { cfg.kappa = number(v); });
  take("run.seed", [&](const std::string& v) {
    const auto x = parse_integer<std::uint64_t>(v);
    if (!x) throw std::invalid_argument("expected an unsigned 64-bit seed, got '" + v + "'");
    cfg.seed = *x;
  });
  take("run.steps", [&](const std::string& v) { cfg.steps = count(v); });
  take("run.replicas", [&](const std::string& v) { cfg.replicas = count(v); });
  take("run.margin", [&](const std::string& v) { cfg.margin = integer(v); });
  take("run.bootstrap", [&](const std::string& v) { cfg.bootstrap = count(v); });
  take("run.threads", [&](const std::string& v) { cfg.threads = count(v); });
  take("run.trajectory_stride", [&](const std::string& v) { cfg.trajectory_stride = count(v); });
  take("donsker.t_grid", [&](const std::string& v) { cfg.t_grid = detail::parse_list(v); });
  take("sweep.epsilons", [&](const std::string& v) { cfg.epsilons = detail::parse_list(v); });
  take("network.depth", [&](const std::string& v) { cfg.depth = integer(v); });
  auto& vs = cfg.verify;
  take("verify.identity_truncations", [&](const std::string& v) { vs.identity_truncations = count(v); });
  take("verify.identity_max_depth", [&](const std::string& v) { vs.identity_max_depth = integer(v); });
  take("verify.identity_tolerance", [&](const std::string& v) { vs.identity_tolerance = number(v); });
  take("verify.rayleigh_truncations", [&](const std::string& v) { vs.rayleigh_truncations = count(v); });
  take("verify.rayleigh_tolerance", [&](const std::string& v) { vs.rayleigh_tolerance = number(v); });
  take("verify.mc_truncations", [&](const std::string& v) { vs.mc_truncations = count(v); });
  take("verify.mc_walks", [&](const std::string& v) { vs.mc_walks = count(v); });
  take("verify.mc_depth", [&](const std::string& v) { vs.mc_depth = integer(v); });
  take("verify.mc_sigmas", [&](const std::string& v) { vs.mc_sigmas = number(v); });
  take("verify.mc_min_pass", [&](const std::string& v) { vs.mc_min_pass = count(v); });
  take("verify.ks_replicas", [&](const std::string& v) { vs.ks_replicas = count(v); });
  take("verify.ks_steps", [&](const std::string& v) { vs.ks_steps = count(v); });
  take("verify.ks_critical", [&](const std::string& v) { vs.ks_critical = number(v); });
  take("verify.variance_ratio_tolerance", [&](const std::string& v) { vs.variance_ratio_tolerance = number(v); });
  take("verify.speed_steps", [&](const std::string& v) { vs.speed_steps = count(v); });
  take("verify.speed_tolerance", [&](const std::string& v) { vs.speed_tolerance = number(v); });
  take("output.dir", [&](const std::string& v) { cfg.out_dir = v; });

  for (const auto& [key, entry] : entries) {
    if (entry.line != 0) throw error_at(entry.line, key + ": unknown key");
  }

  // Validate the laws here so that errors point at the offending line.
  auto line_of = [&](const char* key) -> std::size_t {
    std::size_t l = 0;
    std::istringstream again{std::string(text)};
    std::string s;
    std::size_t n = 0;
    std::string current;
    while (std::getline(again, s)) {
      ++n;
      auto view = trim(std::string_view(s).substr(0, s.find('#')));
      if (view.empty()) continue;
      if (view.front() == '[') {
        current = std::string(trim(view.substr(1, view.size() - 2)));
        continue;
      }
      const auto eq = view.find('=');
      if (eq != std::string_view::npos && current + "." + std::string(trim(view.substr(0, eq))) == key) l = n;
    }
    return l;
  };
  auto law_error = [&](const char* key, const std::exception& e) {
    const std::size_t line = line_of(key);
    const std::string where = line == 0 ? source : source + ":" + std::to_string(line);
    return ConfigError(where + ": " + key + ": " + e.what());
  };
  try {
    (void)OffspringLaw::parse(cfg.offspring);
  } catch (const std::exception& e) {
    throw law_error("model.offspring", e);
  }
  try {
    (void)ConductanceLaw(cfg.alpha, cfg.epsilon, parse_atoms(cfg.mu1), cfg.kappa);
  } catch (const std::exception& e) {
    const std::string what = e.what();
    const char* key = "model.mu1";
    if (what.find("alpha") != std::string::npos) {
      key = "model.alpha";
    } else if (what.find("mu1") != std::string::npos) {
      key = "model.mu1";
    } else if (what.find("epsilon") != std::string::npos || what.find("ε") != std::string::npos) {
      key = "model.epsilon";
    } else if (what.find("kappa") != std::string::npos) {
      key = "model.kappa";
    }
    throw law_error(key, e);
  }
  if (cfg.margin < 1) throw law_error("run.margin", std::invalid_argument("margin must be at least 1"));
  if (cfg.replicas < 1) throw law_error("run.replicas", std::invalid_argument("need at least one replica"));
  if (cfg.depth < 1) throw law_error("network.depth", std::invalid_argument("depth must be at least 1"));
  if (cfg.threads < 1) throw law_error("run.threads", std::invalid_argument("need at least one thread"));
  {
    const double kappa = cfg.kappa;
    for (const double e : cfg.epsilons) {
      if (!(e > 0.0)) throw law_error("sweep.epsilons", std::invalid_argument("positive ε required; ε=0 model is out of scope"));
      if (!(e * kappa < 1.0)) {
        throw law_error("sweep.epsilons", std::invalid_argument("ε ≥ 1/κ rejected (epsilon must be smaller than 1/kappa)"));
      }
    }
  }
  for (const double t : cfg.t_grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw law_error("donsker.t_grid", std::invalid_argument("t values must lie in [0, 1]"));
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

}  // namespace gwrw
