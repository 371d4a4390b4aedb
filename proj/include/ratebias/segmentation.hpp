#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ratebias/aggregates.hpp"
#include "ratebias/table.hpp"

namespace ratebias {

enum class Segment : std::uint8_t { ineligible, neutral, deflating, inflating };

std::string_view to_string(Segment s);

enum class PercentileConvention {
  linear,        // interpolate at p*(N-1) on the sorted values ("type 7")
  nearest_rank,  // value at 1-based rank ceil(p*N)
};

std::string_view to_string(PercentileConvention c);

/// Percentile of already sorted values, `pct` in [0, 100].
double percentile(std::span<const double> sorted, double pct,
                  PercentileConvention convention = PercentileConvention::linear);

struct SegmentOptions {
  std::uint64_t min_ratings = 5;
  double lo_pct = 25.0;
  double hi_pct = 75.0;
  PercentileConvention convention = PercentileConvention::linear;
};

/// Frozen rater segmentation. `labels` runs parallel to the UserStats the
/// assignment was computed from.
struct SegmentAssignment {
  double lo_threshold = 0.0;
  double hi_threshold = 0.0;
  SegmentOptions options;
  std::vector<Segment> labels;
  std::size_t eligible = 0;
  std::size_t deflating = 0;
  std::size_t inflating = 0;
  std::vector<std::string> warnings;

  std::size_t neutral() const noexcept { return eligible - deflating - inflating; }
};

/// Thresholds are percentiles of the eligible users' means; membership uses
/// strict inequalities so users sitting on a threshold stay neutral.
/// Throws InsufficientDataError when no user is eligible.
SegmentAssignment segment_raters(std::span<const UserStats> users,
                                 const SegmentOptions& options = {});

struct CohortFigures {
  std::size_t members = 0;
  std::size_t ratings = 0;
  double mean_rating = 0.0;             // over the cohort's ratings
  double mean_restaurant_rating = 0.0;  // restaurant mean, averaged over the same ratings
  double mean_of_user_means = 0.0;      // unweighted over members
};

struct CohortSummary {
  std::optional<CohortFigures> deflating;
  std::optional<CohortFigures> inflating;
  std::vector<std::string> warnings;
};

CohortSummary cohort_summary(const SegmentAssignment& assignment,
                             std::span<const UserStats> users,
                             std::span<const BusinessStats> businesses,
                             const RatingTable& table);

}  // namespace ratebias
