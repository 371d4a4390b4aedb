#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <nlohmann/json.hpp>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ratebias/aggregates.hpp"
#include "ratebias/bootstrap.hpp"
#include "ratebias/regression.hpp"
#include "ratebias/segmentation.hpp"
#include "ratebias/table.hpp"

namespace ratebias::report {

using Json = nlohmann::ordered_json;

/// Shortest text that parses back to the same double; "nan", "inf", "-inf"
/// for non-finite values.
std::string number(double v);

/// JSON number, or null when not finite.
Json json_number(double v);

/// Opens `path` for writing, hands the stream to `fill`, and throws IoError if
/// anything failed.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill);

void write_user_stats_csv(std::ostream& out, std::span<const UserStats> users);
void write_business_stats_csv(std::ostream& out, std::span<const BusinessStats> businesses);
Json moments_json(const PopulationMoments& moments, const DatasetSummary& summary);

/// Every user, ineligible ones labelled "ineligible".
void write_segments_csv(std::ostream& out, const SegmentAssignment& segments,
                        std::span<const UserStats> users);
Json thresholds_json(const SegmentAssignment& segments);
Json cohort_summary_json(const CohortSummary& summary);

Json regression_json(const RegressionFit& fit);
/// Coefficient table in the usual OLS summary layout; 3 decimals for SEs and
/// p-values, so tiny p-values print as 0.000.
void write_regression_md(std::ostream& out, const RegressionFit& fit, std::string_view title);
void write_figure3_csv(std::ostream& out, const RestaurantRegression& regression);

void write_figure4_csv(std::ostream& out, std::span<const BootstrapResult> results);
void write_universe_csv(std::ostream& out, const Universe& universe);
Json bootstrap_json(const BootstrapResult& result);

/// One stratum of a histogram: bin label -> count, bins in ascending order.
struct HistogramSeries {
  std::string stratum;
  std::vector<double> bins;
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const;
};

struct CountRange {
  std::uint64_t lo;
  std::uint64_t hi;  // inclusive
};

/// Yelp score (half-star bins) of businesses whose rating count falls in each
/// range. Ranges without members produce no series.
std::vector<HistogramSeries> yelp_score_histogram(std::span<const BusinessStats> businesses,
                                                  std::span<const CountRange> strata);

/// Stars of the ratings written by users whose own rating count falls in
/// each range.
std::vector<HistogramSeries> experience_star_histogram(const RatingTable& table,
                                                       std::span<const UserStats> users,
                                                       std::span<const CountRange> strata);

/// Stars of the ratings written by one segment; empty when nobody is in it.
std::vector<HistogramSeries> segment_star_histogram(const RatingTable& table,
                                                    const SegmentAssignment& segments,
                                                    Segment segment);

/// Long format `stratum,bin,count`; no series means a header-only file.
void write_histogram_csv(std::ostream& out, std::span<const HistogramSeries> series);

/// Writes the four distribution files into `dir` and returns their names.
std::vector<std::string> export_histograms(const std::filesystem::path& dir,
                                           const RatingTable& table,
                                           std::span<const UserStats> users,
                                           std::span<const BusinessStats> businesses,
                                           const SegmentAssignment& segments);

}  // namespace ratebias::report
