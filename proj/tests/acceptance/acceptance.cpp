// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every run is single-threaded and seeded.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gwrw/config.hpp"
#include "gwrw/estimate.hpp"
#include "gwrw/experiment.hpp"
#include "gwrw/network.hpp"
#include "gwrw/regen.hpp"
#include "gwrw/simulation.hpp"

using namespace gwrw;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 1;
const std::string kConfigDir = GWRW_CONFIG_DIR;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int failures = 0;

void report(int criterion, const std::string& name, bool passed, const std::string& detail) {
  if (!passed) ++failures;
  std::printf("%s %d %s: %s\n", passed ? "PASS" : "FAIL", criterion, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x, int digits = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, x);
  return buffer;
}

Model unit_tree(std::uint32_t d) { return {OffspringLaw::deterministic(d), ConductanceLaw::unit()}; }

Model mixed_model() {
  return {OffspringLaw::parse("1:0.3,2:0.4,3:0.3"),
          ConductanceLaw(0.3, 0.01, parse_atoms("0.5:0.3,1:0.5,2:0.2"), 2.0)};
}

struct UnitRun {
  std::uint32_t d = 0;
  std::vector<ReplicaResult> results;
  double seconds = 0.0;
};

UnitRun simulate_unit_tree(std::uint32_t d) {
  Stopwatch clock;
  ReplicaOptions options;
  options.steps = 1000000;
  options.replicas = 16;
  options.threads = 1;
  options.sample_steps = batch_boundaries(options.steps);
  UnitRun run{d, run_replicas(unit_tree(d), options, stream_seed(kSeed, StreamTag::walk, d)), 0.0};
  run.seconds = clock.seconds();
  return run;
}

SpeedEstimate naive_speed(const std::vector<ReplicaResult>& results) {
  std::vector<SpeedEstimate> naive;
  for (const auto& r : results) {
    naive.push_back(speed_naive_from_boundaries(r.steps, std::span<const std::int32_t>(r.sampled.data(), kBatchCount + 1)));
  }
  return combine_naive_speeds(naive);
}

void criterion_speed(const std::vector<UnitRun>& runs) {
  bool ok = true;
  double seconds = 0.0;
  std::string detail;
  for (const auto& run : runs) {
    const double oracle = (run.d - 1.0) / (run.d + 1.0);
    const double naive = naive_speed(run.results).value;
    const double regen = speed_regen(pool_increments(run.results)).value;
    ok = ok && std::abs(naive - oracle) < 0.01 && std::abs(regen - oracle) < 0.01;
    seconds += run.seconds;
    detail += "d=" + std::to_string(run.d) + " oracle=" + fmt(oracle) + " naive=" + fmt(naive, 6) +
              " regen=" + fmt(regen, 6) + "; ";
  }
  ok = ok && seconds < 30.0;
  report(1, "speed oracle", ok, detail + "runtime=" + fmt(seconds, 3) + "s (limit 30s)");
}

void criterion_volatility(const std::vector<UnitRun>& runs) {
  bool ok = true;
  double seconds = 0.0;
  std::string detail;
  for (const auto& run : runs) {
    Stopwatch clock;
    const double oracle = 4.0 * run.d / ((run.d + 1.0) * (run.d + 1.0));
    const IncrementSample pooled = pool_increments(run.results);
    const auto vol = sigma2_regen(pooled, {kDefaultBootstrapResamples, stream_seed(kSeed, StreamTag::bootstrap, run.d)});
    const double rel = std::abs(vol.value - oracle) / oracle;
    ok = ok && pooled.count() >= 10000 && rel < 0.05;
    seconds += run.seconds + clock.seconds();
    detail += "d=" + std::to_string(run.d) + " oracle=" + fmt(oracle) + " sigma2=" + fmt(vol.value, 6) +
              " rel=" + fmt(rel, 3) + " pairs=" + std::to_string(pooled.count()) + "; ";
  }
  ok = ok && seconds < 120.0;
  report(2, "volatility oracle", ok, detail + "runtime=" + fmt(seconds, 3) + "s (limit 120s)");
}

void criterion_network_identity() {
  const Check identity = check_network_identity(mixed_model(), 100, 8, 1e-9, kSeed);
  const double three_sevenths = std::abs(return_probability_before_level(Truncation::regular(2, 2)) - 3.0 / 7.0);
  double star = 0.0;
  for (std::uint32_t d = 2; d <= 6; ++d) {
    star = std::max(star, std::abs(effective_conductance_to_level(Truncation::regular(d, 1), kRoot).value - d));
  }
  const bool ok = identity.passed && three_sevenths < 1e-9 && star < 1e-9;
  report(3, "network identity", ok,
         "max|fold-solver|=" + fmt(identity.observed) + " over 100 truncations (tol 1e-9); |P-3/7|=" +
             fmt(three_sevenths) + "; max|C-d|=" + fmt(star));
}

void criterion_mc_vs_network() {
  const Check c = check_mc_vs_network(mixed_model(), 20, 100000, 5, 4.0, 19, kSeed);
  report(4, "Monte Carlo vs network", c.passed,
         fmt(c.observed) + "/20 truncations within 4 SE of the network value (need 19); runtime=" +
             fmt(c.seconds, 3) + "s");
}

void criterion_rayleigh() {
  const Check c = check_rayleigh(mixed_model(), 1000, 8, 1e-12, kSeed);
  report(5, "Rayleigh monotonicity", c.passed,
         fmt(c.observed) + " decreases beyond 1e-12 relative over 1000 truncations");
}

void criterion_donsker() {
  const auto checks = check_donsker(2000, 10000, 0.0365, 0.15, kSeed);
  const bool ok = checks.ks.passed && checks.variance_ratio.passed && checks.ks.seconds < 300.0;
  report(6, "Donsker marginals", ok,
         "KS D=" + fmt(checks.ks.observed) + " (crit 0.0365); |ratio/(1/4)-1|=" + fmt(checks.variance_ratio.observed) +
             " (tol 0.15); runtime=" + fmt(checks.ks.seconds, 3) + "s (limit 300s)");
}

std::vector<SweepRow> criterion_sweep() {
  Stopwatch clock;
  const auto cfg = load_config(kConfigDir + "/ternary_sweep.ini");
  SweepOptions options;
  options.replicas = cfg.replica_options();
  options.replicas.threads = 1;
  options.bootstrap_resamples = cfg.bootstrap;
  const auto model = cfg.model();
  const SweepTable table = epsilon_sweep(model, cfg.epsilons, options, cfg.require_seed());
  const double seconds = clock.seconds();
  bool ok = table.t1_supercritical && seconds < 900.0;
  std::string detail = "(1-alpha)m=" + fmt(table.t1_mean_offspring) + "; ";
  for (const auto& r : table.rows) {
    ok = ok && r.pairs >= 5000 && r.volatility.ci_low > 0.0;
    detail += "eps=" + fmt(r.epsilon) + " sigma2=" + fmt(r.volatility.value) + " CI=[" + fmt(r.volatility.ci_low) +
              "," + fmt(r.volatility.ci_high) + "] pairs=" + std::to_string(r.pairs) + "; ";
  }
  report(7, "epsilon sweep", ok && table.rows.size() == 3, detail + "runtime=" + fmt(seconds, 3) + "s (limit 900s)");
  return table.rows;
}

void criterion_horizon_bias() {
  const Model model = unit_tree(2);
  std::size_t confirmed = 0, invalidated = 0;
  for (std::size_t replica = 0; replica < 4; ++replica) {
    Environment env(model.offspring, model.conductance, stream_seed(kSeed, StreamTag::environment, 800 + replica));
    Rng rng = make_rng(kSeed, StreamTag::walk, 800 + replica);
    const std::size_t n = 100000;
    Trajectory trajectory = run_walk(env, n, rng);
    const RegenRecord early = confirm_regenerations(trajectory, 20);
    extend_walk(env, trajectory, 9 * n, rng);
    const RegenRecord late = confirm_regenerations(trajectory, 20);
    confirmed += early.times.size();
    for (const std::size_t t : early.times) {
      if (!std::binary_search(late.times.begin(), late.times.end(), t)) ++invalidated;
    }
  }
  const double fraction = static_cast<double>(invalidated) / static_cast<double>(confirmed);
  report(8, "regeneration horizon bias", confirmed >= 10000 && fraction < 1e-3,
         std::to_string(invalidated) + " of " + std::to_string(confirmed) +
             " confirmations invalidated by a 10x extension, fraction=" + fmt(fraction) + " (limit 1e-3)");
}

void criterion_speed_bound(const std::vector<SweepRow>& sweep_rows) {
  bool ok = true;
  std::string detail;
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(kConfigDir)) configs.push_back(entry.path());
  std::sort(configs.begin(), configs.end());
  for (const auto& path : configs) {
    auto cfg = load_config(path.string());
    cfg.threads = 1;
    const Model model = cfg.model();
    ReplicaOptions options = cfg.replica_options();
    options.sample_steps = batch_boundaries(cfg.steps);
    const auto results = run_replicas(model, options, cfg.require_seed());
    const double bound = model.offspring.speed_bound();
    const auto naive = naive_speed(results);
    ok = ok && naive.value <= bound + 3.0 * naive.standard_error.value_or(0.0);
    double worst = (naive.value - bound) / naive.standard_error.value_or(1.0);
    const IncrementSample pooled = pool_increments(results);
    if (pooled.count() >= kMinSpeedPairs) {
      const auto regen = speed_regen(pooled);
      ok = ok && regen.value <= bound + 3.0 * *regen.standard_error;
      worst = std::max(worst, (regen.value - bound) / *regen.standard_error);
    }
    detail += path.filename().string() + " max (v-bound)/SE=" + fmt(worst, 3) + "; ";
  }
  for (const auto& r : sweep_rows) {
    ok = ok && r.speed.value <= r.bound + 3.0 * r.speed.standard_error.value_or(0.0);
  }
  report(9, "speed bound", ok, detail + "plus " + std::to_string(sweep_rows.size()) + " sweep points (limit 3)");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_determinism() {
  const auto cfg = load_config(kConfigDir + "/binary_unit_small.ini");
  const fs::path root = fs::temp_directory_path() / "gwrw_acceptance_determinism";
  fs::remove_all(root);
  run_simulate(cfg, root / "a");
  run_simulate(cfg, root / "b");
  bool ok = true;
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    ++files;
    ok = ok && slurp(entry.path()) == slurp(root / "b" / entry.path().filename());
  }
  ok = ok && files >= 4;
  report(10, "determinism", ok, std::to_string(files) + " simulate outputs compared byte for byte");
  fs::remove_all(root);
}

}  // namespace

int main() {
  try {
    const std::vector<UnitRun> runs{simulate_unit_tree(2), simulate_unit_tree(3)};
    criterion_speed(runs);
    criterion_volatility(runs);
    criterion_network_identity();
    criterion_mc_vs_network();
    criterion_rayleigh();
    criterion_donsker();
    const auto sweep_rows = criterion_sweep();
    criterion_horizon_bias();
    criterion_speed_bound(sweep_rows);
    criterion_determinism();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
