#pragma once

// Independent (environment, walk) replicas.

#include <cstdint>
#include <optional>
#include <vector>

#include "gwrw/environment.hpp"
#include "gwrw/laws.hpp"
#include "gwrw/parallel.hpp"
#include "gwrw/regen.hpp"
#include "gwrw/rng.hpp"
#include "gwrw/walk.hpp"

namespace gwrw {

struct Model {
  OffspringLaw offspring;
  ConductanceLaw conductance;
};

struct ReplicaOptions {
  std::size_t steps = 1000000;
  std::size_t replicas = 1;
  std::int32_t margin = kDefaultMargin;
  std::size_t threads = 1;
  bool keep_first_trajectory = false;
  std::vector<std::size_t> sample_steps;  // generations recorded at these steps
};

struct ReplicaResult {
  std::size_t steps = 0;
  std::int32_t final_generation = 0;
  std::vector<std::int32_t> generations;  // full generation path; empty unless requested
  std::vector<std::int32_t> sampled;      // generation at each of options.sample_steps
  RegenRecord record;
  IncrementSample increments;
  std::optional<Trajectory> trajectory;
};

/// Replica `index` of a run seeded with `seed`: its own environment and walk
/// streams, so replicas are independent and individually reproducible.
inline ReplicaResult run_replica(const Model& model, const ReplicaOptions& options, std::uint64_t seed,
                                 std::size_t index, bool keep_generations = false) {
  Environment env(model.offspring, model.conductance, stream_seed(seed, StreamTag::environment, index));
  Rng rng = make_rng(seed, StreamTag::walk, index);
  Trajectory trajectory = run_walk(env, options.steps, rng);

  ReplicaResult result;
  result.steps = trajectory.step_count();
  result.final_generation = trajectory.steps().back().generation;
  result.record = confirm_regenerations(trajectory, options.margin);
  if (result.record.times.size() >= 4) result.increments = increments(result.record);
  result.sampled.reserve(options.sample_steps.size());
  for (const std::size_t k : options.sample_steps) result.sampled.push_back(trajectory.generation(k));
  if (keep_generations) result.generations = trajectory.generations();
  if (options.keep_first_trajectory && index == 0) result.trajectory = std::move(trajectory);
  return result;
}

inline std::vector<ReplicaResult> run_replicas(const Model& model, const ReplicaOptions& options, std::uint64_t seed,
                                               bool keep_generations = false) {
  return parallel_map(options.replicas, options.threads, [&](std::size_t i) {
    return run_replica(model, options, seed, i, keep_generations);
  });
}

inline IncrementSample pool_increments(const std::vector<ReplicaResult>& results) {
  IncrementSample pooled;
  for (const auto& r : results) pooled.pairs.insert(pooled.pairs.end(), r.increments.pairs.begin(), r.increments.pairs.end());
  return pooled;
}

}  // namespace gwrw
