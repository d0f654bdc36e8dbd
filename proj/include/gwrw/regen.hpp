#pragma once

// Regeneration times of a finite trajectory.
//
// A potential regeneration is a step that reaches a strictly new maximal
// generation through an edge of conductance exactly 1. It becomes a
// regeneration if the walk never returns to the generation just below it.
// That is undecidable on a finite window, so confirmation requires that the
// walk does not come back inside the window and climbs at least `margin`
// generations above the candidate afterwards. Only false positives are
// possible, and their rate decays geometrically in the margin.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "gwrw/walk.hpp"

namespace gwrw {

inline constexpr std::int32_t kDefaultMargin = 20;

struct RegenRecord {
  std::vector<std::size_t> times;         // strictly increasing step indices
  std::vector<std::int32_t> positions;    // generations at those times
  std::int32_t margin = kDefaultMargin;
};

struct IncrementPair {
  std::int64_t dtau;  // steps between regenerations
  std::int64_t dd;    // generations gained
};

struct IncrementSample {
  std::vector<IncrementPair> pairs;
  std::size_t count() const noexcept { return pairs.size(); }
};

namespace detail {
inline void require_edge_data(const Trajectory& trajectory) {
  if (!trajectory.has_edge_data()) throw std::invalid_argument("trajectory lacks edge data");
}
}  // namespace detail

/// The sequence of potential regenerations observed in the window: after
/// each candidate the search resumes only once the walk has returned to the
/// candidate's parent generation. A candidate whose return is not observed
/// ends the list.
inline std::vector<std::size_t> potential_regenerations(const Trajectory& trajectory) {
  detail::require_edge_data(trajectory);
  const auto& steps = trajectory.steps();
  std::vector<std::size_t> out;
  if (steps.empty()) return out;
  std::int32_t running_max = steps[0].generation;
  bool waiting_for_return = false;
  std::int32_t return_level = 0;
  for (std::size_t n = 1; n < steps.size(); ++n) {
    const std::int32_t g = steps[n].generation;
    if (waiting_for_return) {
      if (g == return_level) waiting_for_return = false;
    } else if (g > running_max && trajectory.entered_through_unit_edge(n)) {
      out.push_back(n);
      waiting_for_return = true;
      return_level = g - 1;
    }
    running_max = std::max(running_max, g);
  }
  return out;
}

/// Confirmed regenerations: fresh maxima entered through a unit edge after
/// which the walk stays at or above that generation for the rest of the
/// window and eventually gains `margin` more generations.
inline RegenRecord confirm_regenerations(const Trajectory& trajectory, std::int32_t margin = kDefaultMargin) {
  if (margin < 1) throw std::invalid_argument("margin must be at least 1");
  detail::require_edge_data(trajectory);
  const auto& steps = trajectory.steps();
  RegenRecord record;
  record.margin = margin;
  const std::size_t len = steps.size();
  if (len < 2) return record;

  // Minimum and maximum generation strictly after each index.
  std::vector<std::int32_t> min_after(len), max_after(len);
  min_after[len - 1] = std::numeric_limits<std::int32_t>::max();
  max_after[len - 1] = std::numeric_limits<std::int32_t>::min();
  for (std::size_t i = len - 1; i > 0; --i) {
    min_after[i - 1] = std::min(min_after[i], steps[i].generation);
    max_after[i - 1] = std::max(max_after[i], steps[i].generation);
  }

  std::int32_t running_max = steps[0].generation;
  for (std::size_t n = 1; n < len; ++n) {
    const std::int32_t g = steps[n].generation;
    if (g > running_max && trajectory.entered_through_unit_edge(n) && min_after[n] >= g &&
        max_after[n] != std::numeric_limits<std::int32_t>::min() &&
        static_cast<std::int64_t>(max_after[n]) >= static_cast<std::int64_t>(g) + margin) {
      record.times.push_back(n);
      record.positions.push_back(g);
    }
    running_max = std::max(running_max, g);
  }
  return record;
}

/// Stationary increment pairs between consecutive regenerations. The pair
/// ending at the second regeneration and the pair ending at the last one are
/// both dropped, so at least four regenerations are required.
inline IncrementSample increments(const RegenRecord& record) {
  if (record.times.size() != record.positions.size()) throw std::invalid_argument("malformed regeneration record");
  if (record.times.size() < 4) throw std::invalid_argument("insufficient regenerations");
  IncrementSample sample;
  sample.pairs.reserve(record.times.size() - 3);
  for (std::size_t k = 2; k + 1 < record.times.size(); ++k) {
    sample.pairs.push_back({static_cast<std::int64_t>(record.times[k] - record.times[k - 1]),
                            static_cast<std::int64_t>(record.positions[k]) - record.positions[k - 1]});
  }
  return sample;
}

// `header` lines are written verbatim; they should start with '#'.
inline void write_increments_csv(std::ostream& os, const IncrementSample& sample, const std::string& header) {
  os << header;
  os << "dtau,dd\n";
  for (const auto& p : sample.pairs) os << p.dtau << ',' << p.dd << '\n';
}

}  // namespace gwrw
