#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ratebias/aggregates.hpp"
#include "ratebias/bootstrap.hpp"
#include "ratebias/error.hpp"
#include "ratebias/ingest.hpp"
#include "ratebias/regression.hpp"
#include "ratebias/report.hpp"
#include "ratebias/segmentation.hpp"
#include "ratebias/table.hpp"

namespace ratebias {

/// Every knob of a run. Defaults reproduce the published analysis.
struct RunConfig {
  std::filesystem::path reviews;
  std::filesystem::path businesses;
  std::filesystem::path users;  // optional; only feeds the consistency report
  Format format = Format::json_lines;
  bool strict = false;
  std::filesystem::path out_dir = "out";

  std::uint64_t min_ratings = 5;
  double lo_pct = 25.0;
  double hi_pct = 75.0;
  PercentileConvention convention = PercentileConvention::linear;

  std::uint64_t regression_min_count = 200;
  std::uint64_t regression_max_count = 2000;
  bool leave_one_out = false;

  std::uint64_t universe_min_total = 200;
  std::size_t universe_min_per_cohort = 50;
  std::vector<double> universe_scores{3.5, 4.0, 4.5};
  bool exclude_cohorts_from_target = false;

  std::size_t sample_size = 20;
  std::size_t replicates = 100;
  std::uint64_t seed = 1;
  unsigned workers = 0;

  SegmentOptions segment_options() const;
  UniverseOptions universe_options() const;
  report::Json to_json() const;
};

/// Raised by run_pipeline; names the stage that failed.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what, bool config_error)
      : Error(stage + ": " + what), stage_(std::move(stage)), config_error_(config_error) {}

  const std::string& stage() const noexcept { return stage_; }
  bool config_error() const noexcept { return config_error_; }

 private:
  std::string stage_;
  bool config_error_;
};

/// Restaurant ratings plus everything derived from them without parameters.
struct Analysis {
  RatingTable table;
  std::vector<UserStats> users;
  std::vector<BusinessStats> businesses;
  std::optional<PopulationMoments> moments;  // absent for degenerate populations
  DatasetSummary summary;

  static Analysis from_table(RatingTable table);
  /// Loads `dir`/reviews.csv as written by the ingest stage.
  static Analysis load(const std::filesystem::path& dir, bool strict = false);
};

inline constexpr const char* kReviewsFile = "reviews.csv";

// Stages. Each writes into config.out_dir and returns the file names it wrote.
std::vector<std::string> stage_ingest(const RunConfig& config);
std::vector<std::string> stage_stats(const RunConfig& config, const Analysis& analysis);
std::vector<std::string> stage_segment(const RunConfig& config, const Analysis& analysis,
                                       SegmentAssignment& segments);

enum class RegressionLevel { rating, restaurant };
std::vector<std::string> stage_regress(const RunConfig& config, const Analysis& analysis,
                                       RegressionLevel level);

/// Runs the requested cohorts (baseline included as Cohort::baseline).
std::vector<std::string> stage_bootstrap(const RunConfig& config, const Analysis& analysis,
                                         const SegmentAssignment& segments,
                                         const std::vector<Cohort>& cohorts);
std::vector<std::string> stage_report(const RunConfig& config, const Analysis& analysis,
                                      const SegmentAssignment& segments);

struct StageRecord {
  std::string name;
  double seconds = 0.0;
  bool ok = false;
};

struct Manifest {
  report::Json config;
  std::vector<StageRecord> stages;
  std::vector<std::string> outputs;  // sorted file names inside out_dir
  bool complete = false;
  std::string failed_stage;
};

/// ingest -> stats -> segment -> regress -> bootstrap -> report, then
/// manifest.json. On failure the manifest is still written (flagged partial)
/// and a StageError is thrown.
Manifest run_pipeline(const RunConfig& config);

/// Writes manifest.json: config, input digests, stage timings and a digest of
/// every output file.
void write_manifest(const RunConfig& config, const Manifest& manifest);

/// Seeds for the randomized stages, derived from the run seed by label.
std::uint64_t bootstrap_seed(std::uint64_t run_seed);
std::uint64_t baseline_seed(std::uint64_t run_seed);

}  // namespace ratebias
