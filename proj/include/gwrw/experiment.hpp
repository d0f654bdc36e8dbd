#pragma once

// Experiment runners behind the command-line subcommands. Each runner writes
// its files into an output directory; every file embeds the canonical config
// text, including the seed.

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gwrw/config.hpp"
#include "gwrw/environment.hpp"
#include "gwrw/estimate.hpp"
#include "gwrw/network.hpp"
#include "gwrw/rng.hpp"
#include "gwrw/simulation.hpp"
#include "gwrw/svg.hpp"
#include "gwrw/walk.hpp"

namespace gwrw {

/// Raised when the output directory cannot be created or written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::filesystem::path prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw OutputError("cannot create output directory '" + dir.string() + "'");
  }
  const auto probe = dir / ".gwrw-write-test";
  {
    std::ofstream os(probe);
    if (!os) throw OutputError("output directory '" + dir.string() + "' is not writable");
  }
  std::filesystem::remove(probe, ec);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw OutputError("cannot write '" + path.string() + "'");
  os << content;
  if (!os) throw OutputError("failed writing '" + path.string() + "'");
}

inline nlohmann::ordered_json optional_number(std::optional<double> x) {
  if (!x || !std::isfinite(*x)) return nullptr;
  return *x;
}

inline nlohmann::ordered_json number_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

inline std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

/// Recovers the canonical config text embedded in an output file of any of
/// the supported kinds (CSV or tree text with '#' headers, JSON, SVG).
inline std::string extract_embedded_config(const std::string& content) {
  if (!content.empty() && content.front() == '{') {
    return nlohmann::json::parse(content).at("config").get<std::string>();
  }
  if (const auto open = content.find("<!--\n"); open != std::string::npos) {
    const auto close = content.find("-->", open);
    return content.substr(open + 5, close - open - 5);
  }
  std::string out;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# gwrw-tree", 0) == 0) continue;
    if (line.rfind("# ", 0) != 0) {
      if (line.rfind("#!", 0) == 0) continue;
      break;
    }
    out += line.substr(2) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------- simulate

struct DonskerSummary {
  double t = 0.0;
  std::size_t step = 0;
  double variance = 0.0;
  std::optional<double> ks;  // against N(0, t), when t > 0 and enough replicas
};

struct SimulateSummary {
  std::uint64_t seed = 0;
  SpeedEstimate naive;
  std::optional<SpeedEstimate> regen;
  std::optional<VolatilityEstimate> volatility;
  std::size_t pairs = 0;
  std::size_t regenerations = 0;
  double speed_bound = 0.0;
  double t1_mean_offspring = 0.0;
  std::vector<DonskerSummary> donsker;
};

inline std::vector<std::size_t> donsker_steps(const ExperimentConfig& cfg) {
  std::vector<std::size_t> out;
  for (const double t : cfg.t_grid) out.push_back(static_cast<std::size_t>(std::floor(t * static_cast<double>(cfg.steps))));
  return out;
}

/// Runs the replicas of `cfg` and writes increments.csv, summary.json,
/// trace.svg, donsker.csv and, with a positive trajectory stride,
/// trajectory.csv.
inline SimulateSummary run_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const std::uint64_t seed = cfg.require_seed();
  const Model model = cfg.model();
  detail::prepare_output_dir(out_dir);

  ReplicaOptions options = cfg.replica_options();
  options.keep_first_trajectory = true;
  options.sample_steps = batch_boundaries(cfg.steps);
  const auto grid_steps = donsker_steps(cfg);
  options.sample_steps.insert(options.sample_steps.end(), grid_steps.begin(), grid_steps.end());
  const auto results = run_replicas(model, options, seed);

  SimulateSummary summary;
  summary.seed = seed;
  summary.speed_bound = model.offspring.speed_bound();
  summary.t1_mean_offspring = model.conductance.t1_mean_offspring(model.offspring);
  std::vector<SpeedEstimate> naive;
  for (const auto& r : results) {
    naive.push_back(speed_naive_from_boundaries(
        r.steps, std::span<const std::int32_t>(r.sampled.data(), kBatchCount + 1)));
    summary.regenerations += r.record.times.size();
  }
  summary.naive = combine_naive_speeds(naive);
  const IncrementSample pooled = pool_increments(results);
  summary.pairs = pooled.count();
  if (pooled.count() >= kMinSpeedPairs) summary.regen = speed_regen(pooled);
  if (pooled.count() >= kMinVolatilityPairs) {
    summary.volatility = sigma2_regen(pooled, {cfg.bootstrap, stream_seed(seed, StreamTag::bootstrap, 0)});
  }

  const std::string header = cfg.header_comment();

  // Donsker samples, standardized with the same-run estimates.
  std::ostringstream donsker_csv;
  donsker_csv << header << "t,value\n";
  if (summary.volatility && summary.volatility->value > 0.0) {
    const double v = summary.volatility->speed;
    const double sigma = std::sqrt(summary.volatility->value);
    const double scale = sigma * std::sqrt(static_cast<double>(cfg.steps));
    for (std::size_t j = 0; j < cfg.t_grid.size(); ++j) {
      std::vector<double> values;
      for (const auto& r : results) {
        const double centred = static_cast<double>(r.sampled[kBatchCount + 1 + j]) -
                               static_cast<double>(grid_steps[j]) * v;
        values.push_back(centred / scale);
        donsker_csv << format_double(cfg.t_grid[j]) << ',' << format_double(values.back()) << '\n';
      }
      DonskerSummary d;
      d.t = cfg.t_grid[j];
      d.step = grid_steps[j];
      d.variance = values.size() >= 2 ? sample_variance(values) : std::nan("");
      if (d.t > 0.0 && values.size() >= kMinKsValues) d.ks = ks_statistic(values, d.t);
      summary.donsker.push_back(d);
    }
  }
  detail::write_file(out_dir / "donsker.csv", donsker_csv.str());

  std::ostringstream increments_csv;
  write_increments_csv(increments_csv, pooled, header);
  detail::write_file(out_dir / "increments.csv", increments_csv.str());

  nlohmann::ordered_json j;
  j["config"] = cfg.to_text();
  j["seed"] = seed;
  j["steps"] = cfg.steps;
  j["replicas"] = cfg.replicas;
  j["margin"] = cfg.margin;
  j["v"] = summary.regen ? detail::number_or_null(summary.regen->value) : nullptr;
  j["v_stderr"] = summary.regen ? detail::optional_number(summary.regen->standard_error) : nullptr;
  j["v_naive"] = detail::number_or_null(summary.naive.value);
  j["v_naive_stderr"] = detail::optional_number(summary.naive.standard_error);
  if (summary.volatility) {
    j["sigma2"] = detail::number_or_null(summary.volatility->value);
    j["sigma2_stderr"] = detail::number_or_null(summary.volatility->standard_error);
    j["sigma2_ci"] = {detail::number_or_null(summary.volatility->ci_low),
                      detail::number_or_null(summary.volatility->ci_high)};
  } else {
    j["sigma2"] = nullptr;
    j["sigma2_stderr"] = nullptr;
    j["sigma2_ci"] = nullptr;
  }
  j["pairs"] = summary.pairs;
  j["regenerations"] = summary.regenerations;
  j["speed_bound"] = summary.speed_bound;
  j["t1_mean_offspring"] = summary.t1_mean_offspring;
  j["t1_supercritical"] = summary.t1_mean_offspring > 1.0;
  auto donsker_json = nlohmann::ordered_json::array();
  for (const auto& d : summary.donsker) {
    donsker_json.push_back({{"t", d.t},
                            {"step", d.step},
                            {"variance", detail::number_or_null(d.variance)},
                            {"ks", detail::optional_number(d.ks)}});
  }
  j["donsker"] = donsker_json;
  detail::write_file(out_dir / "summary.json", detail::dump(j));

  const Trajectory& first = *results.front().trajectory;
  {
    svg::Plot plot;
    plot.title = "Generation of the walk, replica 0";
    plot.x_label = "step n";
    plot.y_label = "|X_n|";
    plot.comment = cfg.to_text();
    svg::Series series;
    const std::size_t n = first.step_count();
    const std::size_t stride = std::max<std::size_t>(1, (n + 1999) / 2000);
    for (std::size_t i = 0; i <= n; i += stride) {
      series.x.push_back(static_cast<double>(i));
      series.y.push_back(first.generation(i));
    }
    if (series.x.back() != static_cast<double>(n)) {
      series.x.push_back(static_cast<double>(n));
      series.y.push_back(first.generation(n));
    }
    plot.series.push_back(std::move(series));
    std::ostringstream os;
    svg::write_plot(os, plot);
    detail::write_file(out_dir / "trace.svg", os.str());
  }

  if (cfg.trajectory_stride > 0) {
    std::ostringstream os;
    os << header;
    write_trajectory_csv(os, first, cfg.trajectory_stride);
    detail::write_file(out_dir / "trajectory.csv", os.str());
  }
  return summary;
}

// ------------------------------------------------------------------- sweep

/// Speed and volatility over cfg.epsilons; writes sweep.csv and sweep.svg.
inline SweepTable run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const std::uint64_t seed = cfg.require_seed();
  const Model model = cfg.model();
  if (cfg.epsilons.empty()) throw ConfigError("sweep.epsilons: list must not be empty");
  for (const double e : cfg.epsilons) {
    if (!(e > 0.0)) throw ConfigError("sweep.epsilons: positive ε required; ε=0 model is out of scope");
    if (!(e * model.conductance.kappa() < 1.0)) {
      throw ConfigError("sweep.epsilons: ε ≥ 1/κ rejected (epsilon must be smaller than 1/kappa)");
    }
  }
  detail::prepare_output_dir(out_dir);

  SweepOptions options;
  options.replicas = cfg.replica_options();
  options.bootstrap_resamples = cfg.bootstrap;
  const SweepTable table = epsilon_sweep(model, cfg.epsilons, options, seed);

  std::ostringstream csv;
  csv << cfg.header_comment();
  csv << "#! t1_mean_offspring=" << format_double(table.t1_mean_offspring)
      << " t1_supercritical=" << (table.t1_supercritical ? "true" : "false") << '\n';
  csv << "#! v_ci and sigma2_ci are 95% intervals written as low:high\n";
  csv << "epsilon,v,v_ci,sigma2,sigma2_ci,pairs,bound\n";
  for (const auto& r : table.rows) {
    csv << format_double(r.epsilon) << ',' << format_double(r.speed.value) << ',' << format_double(r.speed_ci_low)
        << ':' << format_double(r.speed_ci_high) << ',' << format_double(r.volatility.value) << ','
        << format_double(r.volatility.ci_low) << ':' << format_double(r.volatility.ci_high) << ',' << r.pairs << ','
        << format_double(r.bound) << '\n';
  }
  detail::write_file(out_dir / "sweep.csv", csv.str());

  svg::Plot plot;
  plot.title = std::string("Volatility against epsilon, (1-alpha)m = ") + format_fixed(table.t1_mean_offspring, 3) +
               (table.t1_supercritical ? " > 1" : " <= 1");
  plot.x_label = "epsilon";
  plot.y_label = "sigma^2 (95% bootstrap CI)";
  plot.log_x = true;
  plot.reference_y = 0.0;
  plot.comment = cfg.to_text();
  svg::Series series;
  series.markers = true;
  for (const auto& r : table.rows) {
    series.x.push_back(r.epsilon);
    series.y.push_back(r.volatility.value);
    series.y_low.push_back(r.volatility.ci_low);
    series.y_high.push_back(r.volatility.ci_high);
  }
  plot.series.push_back(std::move(series));
  std::ostringstream os;
  svg::write_plot(os, plot);
  detail::write_file(out_dir / "sweep.svg", os.str());
  return table;
}

// ----------------------------------------------------------------- network

struct NetworkSummary {
  std::size_t vertices = 0;
  double return_probability = 0.0;  // series/parallel fold
  double solver_value = 0.0;        // linear solve at the root
  EscapeEstimate escape;
};

/// Freezes the environment of replica 0 to cfg.depth and writes
/// truncation.txt, solution.csv and network.json.
inline NetworkSummary run_network(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const std::uint64_t seed = cfg.require_seed();
  const Model model = cfg.model();
  detail::prepare_output_dir(out_dir);

  Environment env(model.offspring, model.conductance, stream_seed(seed, StreamTag::environment, 0));
  const Truncation truncation = Truncation::from_environment(env, cfg.depth);
  if (truncation.size() > kMaxSolverVertices + 1) {
    throw ConfigError("network.depth: truncation has " + std::to_string(truncation.size() - 1) +
                      " vertices, more than the solver limit " + std::to_string(kMaxSolverVertices));
  }
  const std::string header = cfg.header_comment();

  std::ostringstream tree;
  truncation.write_text(tree);
  std::string tree_text = tree.str();
  tree_text.insert(tree_text.find('\n') + 1, header);
  detail::write_file(out_dir / "truncation.txt", tree_text);

  const auto h = solve_absorbing_chain(truncation);
  std::ostringstream solution;
  write_solution_csv(solution, h, header);
  detail::write_file(out_dir / "solution.csv", solution.str());

  NetworkSummary summary;
  summary.vertices = truncation.size() - 1;
  summary.return_probability = return_probability_before_level(truncation);
  summary.solver_value = h[kRoot];
  summary.escape = escape_probability_estimate(truncation);

  nlohmann::ordered_json j;
  j["config"] = cfg.to_text();
  j["seed"] = seed;
  j["depth"] = cfg.depth;
  j["vertices"] = summary.vertices;
  j["root_conductance"] = truncation.edge_conductance(kRoot);
  j["effective_conductance"] = effective_conductance_to_level(truncation, kRoot).value;
  j["return_probability"] = summary.return_probability;
  j["solver_return_probability"] = summary.solver_value;
  j["difference"] = std::abs(summary.return_probability - summary.solver_value);
  j["escape_by_level"] = summary.escape.escape_by_level;
  j["return_by_level"] = summary.escape.return_by_level;
  j["conductance_by_level"] = summary.escape.conductance_by_level;
  detail::write_file(out_dir / "network.json", detail::dump(j));
  return summary;
}

// ------------------------------------------------------------------ verify

struct Check {
  std::string name;
  std::string criterion;  // what "passed" means, in words
  double tolerance = 0.0;
  double observed = 0.0;
  bool passed = false;
  double seconds = 0.0;
};

namespace detail {

inline Truncation random_truncation(const Model& model, std::uint64_t seed, std::int32_t depth) {
  Environment env(model.offspring, model.conductance, seed);
  return Truncation::from_environment(env, depth);
}

template <class F>
Check timed(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  Check c = f();
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return c;
}

}  // namespace detail

/// Fold against linear solve on random truncations of depth 1..max_depth.
inline Check check_network_identity(const Model& model, std::size_t count, std::int32_t max_depth, double tolerance,
                                    std::uint64_t seed) {
  return detail::timed([&] {
    Rng rng = make_rng(seed, StreamTag::verify, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const auto depth = static_cast<std::int32_t>(1 + uniform_index(rng, static_cast<std::uint64_t>(max_depth)));
      const Truncation t = detail::random_truncation(model, stream_seed(seed, StreamTag::environment, i), depth);
      const double fold = return_probability_before_level(t);
      const double solved = solve_absorbing_chain(t)[kRoot];
      worst = std::max(worst, std::abs(fold - solved));
    }
    return Check{"network_identity", "max |fold - solver| < tolerance", tolerance, worst, worst < tolerance, 0.0};
  });
}

/// Depth-2 binary unit tree returns with probability 3/7; the depth-1
/// d-child unit tree has conductance d (d = 2..5).
inline Check check_hand_values(double tolerance) {
  return detail::timed([&] {
    double worst = 0.0;
    const Truncation binary = Truncation::regular(2, 2);
    worst = std::max(worst, std::abs(return_probability_before_level(binary) - 3.0 / 7.0));
    worst = std::max(worst, std::abs(solve_absorbing_chain(binary)[kRoot] - 3.0 / 7.0));
    for (std::uint32_t d = 2; d <= 5; ++d) {
      const Truncation star = Truncation::regular(d, 1);
      worst = std::max(worst, std::abs(effective_conductance_to_level(star, kRoot).value - d));
    }
    return Check{"hand_values", "max deviation from exact values < tolerance", tolerance, worst, worst < tolerance, 0.0};
  });
}

/// Raising one edge by a factor in (1, 10] never lowers C(rho, G_k).
inline Check check_rayleigh(const Model& model, std::size_t count, std::int32_t max_depth, double tolerance,
                            std::uint64_t seed) {
  return detail::timed([&] {
    Rng rng = make_rng(seed, StreamTag::verify, 1);
    std::size_t decreases = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const auto depth = static_cast<std::int32_t>(1 + uniform_index(rng, static_cast<std::uint64_t>(max_depth)));
      Truncation t = detail::random_truncation(model, stream_seed(seed, StreamTag::environment, 1000000 + i), depth);
      const double before = effective_conductance_to_level(t, kRoot).value;
      const auto edge = static_cast<NodeId>(kRoot + uniform_index(rng, t.size() - 1));
      const double factor = 1.0 + 9.0 * (1.0 - uniform01(rng));
      t.set_edge_conductance(edge, t.edge_conductance(edge) * factor);
      const double after = effective_conductance_to_level(t, kRoot).value;
      if (after < before * (1.0 - tolerance)) ++decreases;
    }
    return Check{"rayleigh_monotonicity", "no decrease beyond the relative tolerance", tolerance,
                 static_cast<double>(decreases), decreases == 0, 0.0};
  });
}

/// Empirical P(hit rho* before G_k) on frozen truncations against the
/// network value; a truncation passes within `sigmas` binomial standard
/// errors (evaluated at the network value).
inline Check check_mc_vs_network(const Model& model, std::size_t count, std::size_t walks, std::int32_t depth,
                                 double sigmas, std::size_t min_pass, std::uint64_t seed) {
  return detail::timed([&] {
    std::size_t passing = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const Truncation t = detail::random_truncation(model, stream_seed(seed, StreamTag::environment, 2000000 + i), depth);
      const double p = return_probability_before_level(t);
      Rng rng = make_rng(seed, StreamTag::verify, 100 + i);
      const auto mc = estimate_return_probability_mc(t, walks, rng);
      const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(walks));
      const double diff = std::abs(mc.value - p);
      if (diff <= sigmas * se) ++passing;
    }
    return Check{"mc_vs_network", "number of truncations within the standard-error band >= tolerance",
                 static_cast<double>(min_pass), static_cast<double>(passing), passing >= min_pass, 0.0};
  });
}

struct DonskerChecks {
  Check ks;
  Check variance_ratio;
};

/// Binary unit tree: standardized W_1 values are N(0, 1) by KS, and
/// var(W_1/4) / var(W_1) is close to 1/4.
inline DonskerChecks check_donsker(std::size_t replicas, std::size_t steps, double ks_critical, double ratio_tolerance,
                                   std::uint64_t seed, std::size_t threads = 1) {
  const auto start = std::chrono::steady_clock::now();
  const Model model{OffspringLaw::deterministic(2), ConductanceLaw::unit()};
  ReplicaOptions options;
  options.steps = steps;
  options.replicas = replicas;
  options.threads = threads;
  options.sample_steps = {steps / 4, steps};
  const auto results = run_replicas(model, options, stream_seed(seed, StreamTag::verify, 2));
  const IncrementSample pooled = pool_increments(results);
  const auto vol = sigma2_regen(pooled, {0, 0});
  const double scale = std::sqrt(vol.value * static_cast<double>(steps));
  std::vector<double> quarter, full;
  for (const auto& r : results) {
    quarter.push_back((r.sampled[0] - static_cast<double>(steps / 4) * vol.speed) / scale);
    full.push_back((r.sampled[1] - static_cast<double>(steps) * vol.speed) / scale);
  }
  const double d = ks_statistic(full, 1.0);
  const double ratio = sample_variance(quarter) / sample_variance(full);
  const double rel = std::abs(ratio / 0.25 - 1.0);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {Check{"donsker_ks", "KS distance of standardized W_1 to N(0,1) < tolerance", ks_critical, d,
                d < ks_critical, seconds},
          Check{"donsker_variance_ratio", "|var(W_1/4)/var(W_1) / (1/4) - 1| < tolerance", ratio_tolerance, rel,
                rel < ratio_tolerance, 0.0}};
}

/// Binary unit tree: naive and regeneration speeds within `tolerance` of 1/3.
inline Check check_speed_oracle(std::size_t steps, std::size_t replicas, double tolerance, std::uint64_t seed,
                                std::size_t threads = 1) {
  return detail::timed([&] {
    const Model model{OffspringLaw::deterministic(2), ConductanceLaw::unit()};
    ReplicaOptions options;
    options.steps = steps;
    options.replicas = replicas;
    options.threads = threads;
    options.sample_steps = batch_boundaries(steps);
    const auto results = run_replicas(model, options, stream_seed(seed, StreamTag::verify, 3));
    std::vector<SpeedEstimate> naive;
    for (const auto& r : results) naive.push_back(speed_naive_from_boundaries(r.steps, r.sampled));
    const double a = std::abs(combine_naive_speeds(naive).value - 1.0 / 3.0);
    const double b = std::abs(speed_regen(pool_increments(results)).value - 1.0 / 3.0);
    const double worst = std::max(a, b);
    return Check{"speed_oracle", "both estimators within tolerance of 1/3", tolerance, worst, worst < tolerance, 0.0};
  });
}

struct VerifyReport {
  std::vector<Check> checks;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
};

/// Runs every oracle check and writes verify.json.
inline VerifyReport run_verify(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const std::uint64_t seed = cfg.require_seed();
  const Model model = cfg.model();
  const auto& v = cfg.verify;
  detail::prepare_output_dir(out_dir);

  VerifyReport report;
  report.checks.push_back(check_network_identity(model, v.identity_truncations, v.identity_max_depth,
                                                 v.identity_tolerance, seed));
  report.checks.push_back(check_hand_values(v.identity_tolerance));
  report.checks.push_back(check_rayleigh(model, v.rayleigh_truncations, v.identity_max_depth, v.rayleigh_tolerance, seed));
  report.checks.push_back(
      check_mc_vs_network(model, v.mc_truncations, v.mc_walks, v.mc_depth, v.mc_sigmas, v.mc_min_pass, seed));
  const auto donsker = check_donsker(v.ks_replicas, v.ks_steps, v.ks_critical, v.variance_ratio_tolerance, seed, cfg.threads);
  report.checks.push_back(donsker.ks);
  report.checks.push_back(donsker.variance_ratio);
  report.checks.push_back(check_speed_oracle(v.speed_steps, 4, v.speed_tolerance, seed, cfg.threads));

  nlohmann::ordered_json j;
  j["config"] = cfg.to_text();
  j["seed"] = seed;
  j["passed"] = report.passed();
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"criterion", c.criterion},
                      {"tolerance", c.tolerance},
                      {"observed", detail::number_or_null(c.observed)},
                      {"verdict", c.passed ? "pass" : "fail"}});
  }
  j["checks"] = checks;
  detail::write_file(out_dir / "verify.json", detail::dump(j));
  return report;
}

}  // namespace gwrw
