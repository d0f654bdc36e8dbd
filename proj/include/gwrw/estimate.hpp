#pragma once

// Estimators for the speed, the CLT variance and the Brownian scaling of the
// generation process, plus the epsilon sweep.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gwrw/regen.hpp"
#include "gwrw/rng.hpp"
#include "gwrw/simulation.hpp"
#include "gwrw/walk.hpp"

namespace gwrw {

enum class SpeedMethod { naive, regeneration };

inline const char* to_string(SpeedMethod m) { return m == SpeedMethod::naive ? "naive" : "regeneration"; }

struct SpeedEstimate {
  double value = 0.0;
  std::optional<double> standard_error;
  SpeedMethod method = SpeedMethod::naive;
};

struct VolatilityEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  double ci_low = 0.0;   // bootstrap percentile interval
  double ci_high = 0.0;
  std::size_t pairs = 0;
  double speed = 0.0;    // regeneration speed on the same sample
};

inline constexpr std::size_t kBatchCount = 30;
inline constexpr std::size_t kMinSpeedPairs = 30;
inline constexpr std::size_t kMinVolatilityPairs = 100;
inline constexpr std::size_t kDefaultBootstrapResamples = 1000;
inline constexpr std::size_t kMinKsValues = 100;

/// Steps 0 = b_0 < b_1 < ... < b_30 = n delimiting the batch-means batches.
inline std::vector<std::size_t> batch_boundaries(std::size_t n) {
  std::vector<std::size_t> out(kBatchCount + 1);
  for (std::size_t b = 0; b <= kBatchCount; ++b) out[b] = b * n / kBatchCount;
  return out;
}

/// Naive speed from the generations at batch_boundaries(n). The standard
/// error is present only when n >= 30.
inline SpeedEstimate speed_naive_from_boundaries(std::size_t n, std::span<const std::int32_t> generations) {
  if (n < 1) throw std::invalid_argument("speed needs at least one step");
  if (generations.size() != kBatchCount + 1) throw std::invalid_argument("expected 31 boundary generations");
  const auto bounds = batch_boundaries(n);
  SpeedEstimate out;
  out.method = SpeedMethod::naive;
  out.value = static_cast<double>(generations[kBatchCount] - generations[0]) / static_cast<double>(n);
  if (n < kBatchCount) return out;
  std::vector<double> batch(kBatchCount);
  for (std::size_t b = 0; b < kBatchCount; ++b) {
    batch[b] = static_cast<double>(generations[b + 1] - generations[b]) / static_cast<double>(bounds[b + 1] - bounds[b]);
  }
  const double mean = std::accumulate(batch.begin(), batch.end(), 0.0) / kBatchCount;
  double ss = 0.0;
  for (const double x : batch) ss += (x - mean) * (x - mean);
  out.standard_error = std::sqrt(ss / (kBatchCount - 1) / kBatchCount);
  return out;
}

/// |X_n| / n, with a batch-means standard error over 30 equal batches when
/// n >= 30.
inline SpeedEstimate speed_naive(const Trajectory& trajectory) {
  const std::size_t n = trajectory.step_count();
  if (n < 1) throw std::invalid_argument("speed needs at least one step");
  std::vector<std::int32_t> generations;
  for (const std::size_t k : batch_boundaries(n)) generations.push_back(trajectory.generation(k));
  return speed_naive_from_boundaries(n, generations);
}

/// Ratio of summed generation gains to summed durations, with a delta-method
/// standard error.
inline SpeedEstimate speed_regen(const IncrementSample& sample) {
  const std::size_t n = sample.count();
  if (n < kMinSpeedPairs) throw std::invalid_argument("insufficient increment pairs for a speed estimate");
  double sum_tau = 0.0, sum_d = 0.0;
  for (const auto& p : sample.pairs) {
    sum_tau += static_cast<double>(p.dtau);
    sum_d += static_cast<double>(p.dd);
  }
  const double ratio = sum_d / sum_tau;
  const double mean_tau = sum_tau / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& p : sample.pairs) {
    const double r = static_cast<double>(p.dd) - ratio * static_cast<double>(p.dtau);
    ss += r * r;
  }
  SpeedEstimate out;
  out.method = SpeedMethod::regeneration;
  out.value = ratio;
  out.standard_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) / mean_tau;
  return out;
}

namespace detail {

struct WeightedPair {
  std::int64_t dtau;
  std::int64_t dd;
  std::int64_t weight;
};

// sum w (dd * S_tau - dtau * S_d)^2 / S_tau^3, i.e. mean squared centred gain
// over mean duration, with the speed taken from the same (weighted) sample.
// The centring numerator is formed in exact integer arithmetic.
inline double weighted_sigma2(std::span<const WeightedPair> pairs, double* speed = nullptr) {
  __int128 sum_tau = 0, sum_d = 0;
  for (const auto& p : pairs) {
    sum_tau += static_cast<__int128>(p.weight) * p.dtau;
    sum_d += static_cast<__int128>(p.weight) * p.dd;
  }
  long double acc = 0.0L;
  for (const auto& p : pairs) {
    if (p.weight == 0) continue;
    const auto numerator = static_cast<long double>(static_cast<__int128>(p.dd) * sum_tau -
                                                    static_cast<__int128>(p.dtau) * sum_d);
    acc += static_cast<long double>(p.weight) * numerator * numerator;
  }
  const auto st = static_cast<long double>(sum_tau);
  if (speed) *speed = static_cast<double>(static_cast<long double>(sum_d) / st);
  return static_cast<double>(acc / (st * st * st));
}

inline std::vector<WeightedPair> compress(const IncrementSample& sample) {
  std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> counts;
  for (const auto& p : sample.pairs) ++counts[{p.dtau, p.dd}];
  std::vector<WeightedPair> out;
  out.reserve(counts.size());
  for (const auto& [key, weight] : counts) out.push_back({key.first, key.second, weight});
  return out;
}

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

struct BootstrapOptions {
  std::size_t resamples = kDefaultBootstrapResamples;
  std::uint64_t seed = 0;
};

/// Plug-in volatility mean((dd - dtau v)^2) / mean(dtau) with v the
/// regeneration speed of the same sample. Pairs are resampled whole for the
/// bootstrap; resampling is done as a multinomial draw over the distinct
/// pairs, which has the same law as drawing indices with replacement.
inline VolatilityEstimate sigma2_regen(const IncrementSample& sample, const BootstrapOptions& options = {}) {
  const std::size_t n = sample.count();
  if (n < kMinVolatilityPairs) throw std::invalid_argument("insufficient increment pairs for a volatility estimate");
  std::vector<detail::WeightedPair> distinct = detail::compress(sample);

  VolatilityEstimate out;
  out.pairs = n;
  out.value = detail::weighted_sigma2(distinct, &out.speed);
  if (options.resamples < 2) {
    out.ci_low = out.ci_high = out.value;
    return out;
  }

  Rng rng = make_rng(options.seed, StreamTag::bootstrap);
  std::vector<std::int64_t> original(distinct.size());
  for (std::size_t j = 0; j < distinct.size(); ++j) original[j] = distinct[j].weight;
  std::vector<double> replicate(options.resamples);
  for (std::size_t b = 0; b < options.resamples; ++b) {
    auto remaining_draws = static_cast<std::int64_t>(n);
    auto remaining_mass = static_cast<std::int64_t>(n);
    for (std::size_t j = 0; j < distinct.size(); ++j) {
      std::int64_t w = 0;
      if (remaining_draws > 0) {
        if (original[j] == remaining_mass) {
          w = remaining_draws;
        } else {
          std::binomial_distribution<std::int64_t> draw(
              remaining_draws, static_cast<double>(original[j]) / static_cast<double>(remaining_mass));
          w = draw(rng);
        }
      }
      distinct[j].weight = w;
      remaining_draws -= w;
      remaining_mass -= original[j];
    }
    replicate[b] = detail::weighted_sigma2(distinct);
  }
  const double mean = std::accumulate(replicate.begin(), replicate.end(), 0.0) / static_cast<double>(replicate.size());
  double ss = 0.0;
  for (const double x : replicate) ss += (x - mean) * (x - mean);
  out.standard_error = std::sqrt(ss / static_cast<double>(replicate.size() - 1));
  std::sort(replicate.begin(), replicate.end());
  out.ci_low = detail::quantile_sorted(replicate, 0.025);
  out.ci_high = detail::quantile_sorted(replicate, 0.975);
  return out;
}

/// Standardized generation (|X_k| - k v) / (sigma sqrt(n)) at k = floor(t n).
inline double donsker_value(const Trajectory& trajectory, std::size_t n, double speed, double sigma, double t) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("t must lie in [0, 1]");
  if (trajectory.step_count() < n) throw std::invalid_argument("trajectory shorter than the scale n");
  const auto k = static_cast<std::size_t>(std::floor(t * static_cast<double>(n)));
  const double centred = static_cast<double>(trajectory.steps()[k].generation) - static_cast<double>(k) * speed;
  return centred / (sigma * std::sqrt(static_cast<double>(n)));
}

/// One standardized value per trajectory; approximately N(0, t) for large n.
inline std::vector<double> donsker_marginal(std::span<const Trajectory> trajectories, std::size_t n, double speed,
                                            double sigma, double t) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  std::vector<double> out;
  out.reserve(trajectories.size());
  for (const auto& tr : trajectories) out.push_back(donsker_value(tr, n, speed, sigma, t));
  return out;
}

struct DonskerSample {
  std::size_t n = 0;
  std::vector<double> t_grid;
  std::vector<std::vector<double>> values;  // values[i][r]: replica r at t_grid[i]
};

inline double normal_cdf(double x, double variance = 1.0) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0 * variance));
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `values` and
/// the centred normal law with the given variance.
inline double ks_statistic(std::vector<double> values, double variance = 1.0) {
  if (values.size() < kMinKsValues) throw std::invalid_argument("KS statistic needs at least 100 values");
  if (!(variance > 0.0)) throw std::invalid_argument("target variance must be positive");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = normal_cdf(values[i], variance);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

/// k_n / n with k_n the number of regenerations at or before step n.
inline double regeneration_count_rate(const RegenRecord& record, std::size_t n) {
  if (record.times.empty()) throw std::invalid_argument("empty regeneration record");
  if (n == 0) throw std::invalid_argument("n must be positive");
  const auto k = std::upper_bound(record.times.begin(), record.times.end(), n) - record.times.begin();
  return static_cast<double>(k) / static_cast<double>(n);
}

inline double sample_mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double sample_variance(std::span<const double> xs) {
  const double m = sample_mean(xs);
  double ss = 0.0;
  for (const double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

// Combines per-replica naive speeds: mean value, standard error from the
// per-replica batch-means errors (replicas are independent).
inline SpeedEstimate combine_naive_speeds(std::span<const SpeedEstimate> per_replica) {
  if (per_replica.empty()) throw std::invalid_argument("no replicas");
  SpeedEstimate out;
  double var = 0.0;
  bool have_se = true;
  for (const auto& s : per_replica) {
    out.value += s.value;
    if (s.standard_error) {
      var += *s.standard_error * *s.standard_error;
    } else {
      have_se = false;
    }
  }
  const auto r = static_cast<double>(per_replica.size());
  out.value /= r;
  if (have_se) out.standard_error = std::sqrt(var) / r;
  return out;
}

struct SweepOptions {
  ReplicaOptions replicas;
  std::size_t bootstrap_resamples = kDefaultBootstrapResamples;
};

struct SweepRow {
  double epsilon = 0.0;
  SpeedEstimate speed;
  double speed_ci_low = 0.0;
  double speed_ci_high = 0.0;
  VolatilityEstimate volatility;
  std::size_t pairs = 0;
  double bound = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  double t1_mean_offspring = 0.0;  // (1 - alpha) m
  bool t1_supercritical = false;
  double speed_bound = 0.0;
};

/// Speed and volatility for each epsilon, every point from its own
/// independent replicas.
inline SweepTable epsilon_sweep(const Model& base, std::span<const double> epsilons, const SweepOptions& options,
                                std::uint64_t seed) {
  SweepTable table;
  table.t1_mean_offspring = base.conductance.t1_mean_offspring(base.offspring);
  table.t1_supercritical = table.t1_mean_offspring > 1.0;
  table.speed_bound = base.offspring.speed_bound();
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const auto& law = base.conductance;
    const Model model{base.offspring, ConductanceLaw(law.alpha(), epsilons[i], law.mu1(), law.kappa())};
    const std::uint64_t point_seed = stream_seed(seed, StreamTag::sweep, i);
    const auto results = run_replicas(model, options.replicas, point_seed);
    const IncrementSample pooled = pool_increments(results);

    SweepRow row;
    row.epsilon = epsilons[i];
    row.pairs = pooled.count();
    row.bound = table.speed_bound;
    row.speed = speed_regen(pooled);
    row.speed_ci_low = row.speed.value - 1.96 * row.speed.standard_error.value_or(0.0);
    row.speed_ci_high = row.speed.value + 1.96 * row.speed.standard_error.value_or(0.0);
    row.volatility = sigma2_regen(pooled, {options.bootstrap_resamples, point_seed});
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace gwrw
