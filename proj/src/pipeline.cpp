#include "ratebias/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>

#include "ratebias/digest.hpp"
#include "ratebias/error.hpp"
#include "ratebias/seed.hpp"

namespace ratebias {

namespace {

using report::Json;
using report::write_file;

void write_json(const std::filesystem::path& path, const Json& j) {
  write_file(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
}

Json consistency_json(const Analysis& analysis, std::span<const UserRecord> users) {
  std::size_t matched = 0;
  double abs_sum = 0.0, signed_sum = 0.0;
  for (const auto& u : users) {
    const auto idx = analysis.table.find_user(u.user_id);
    if (!idx) continue;
    const double d = analysis.users[*idx].mean - u.source_average;
    ++matched;
    abs_sum += std::fabs(d);
    signed_sum += d;
  }
  return Json{
      {"user_table_rows", users.size()},
      {"matched_users", matched},
      {"mean_abs_difference", matched ? report::json_number(abs_sum / matched) : Json(nullptr)},
      {"mean_signed_difference",
       matched ? report::json_number(signed_sum / matched) : Json(nullptr)},
      {"note", "restaurant-only means minus the user table's all-business average_stars"},
  };
}

}  // namespace

SegmentOptions RunConfig::segment_options() const {
  return SegmentOptions{min_ratings, lo_pct, hi_pct, convention};
}

UniverseOptions RunConfig::universe_options() const {
  UniverseOptions o;
  o.min_total = universe_min_total;
  o.min_per_cohort = universe_min_per_cohort;
  o.allowed_scores = universe_scores;
  o.target = exclude_cohorts_from_target ? Target::excluding_cohorts : Target::all_ratings;
  return o;
}

Json RunConfig::to_json() const {
  return Json{
      {"reviews", reviews.string()},
      {"businesses", businesses.string()},
      {"users", users.string()},
      {"format", format == Format::csv ? "csv" : "json"},
      {"strict", strict},
      {"min_ratings", min_ratings},
      {"lo_pct", lo_pct},
      {"hi_pct", hi_pct},
      {"percentile_convention", std::string(to_string(convention))},
      {"regression_min_count", regression_min_count},
      {"regression_max_count", regression_max_count},
      {"leave_one_out", leave_one_out},
      {"universe_min_total", universe_min_total},
      {"universe_min_per_cohort", universe_min_per_cohort},
      {"universe_scores", universe_scores},
      {"exclude_cohorts_from_target", exclude_cohorts_from_target},
      {"sample_size", sample_size},
      {"replicates", replicates},
      {"seed", seed},
  };
}

Analysis Analysis::from_table(RatingTable table) {
  Analysis a;
  a.table = std::move(table);
  a.users = user_stats(a.table);
  a.businesses = business_stats(a.table);
  a.summary = summarize(a.table, a.users);
  if (a.users.size() >= 2 && a.businesses.size() >= 2) {
    a.moments = population_moments(a.users, a.businesses);
  }
  return a;
}

Analysis Analysis::load(const std::filesystem::path& dir, bool strict) {
  const auto path = dir / kReviewsFile;
  if (!std::filesystem::exists(path)) {
    throw IoError("missing " + path.string() + " (run the ingest stage first)");
  }
  return from_table(RatingTable::load_csv(path, strict));
}

std::uint64_t bootstrap_seed(std::uint64_t run_seed) { return derive_seed(run_seed, "bootstrap"); }
std::uint64_t baseline_seed(std::uint64_t run_seed) { return derive_seed(run_seed, "baseline"); }

std::vector<std::string> stage_ingest(const RunConfig& config) {
  ensure_dir(config.out_dir);
  for (const auto& input : {config.reviews, config.businesses, config.users}) {
    if (input.empty()) continue;
    if (!std::filesystem::exists(input)) throw IoError("missing input " + input.string());
    for (const char* name : {kReviewsFile, "businesses.csv", "users.csv"}) {
      std::error_code ec;
      if (std::filesystem::equivalent(input, config.out_dir / name, ec)) {
        throw ConfigError("input " + input.string() + " would be overwritten by the output; use another --out");
      }
    }
  }
  const ParseOptions options{config.format, config.strict};
  const auto businesses = parse_businesses_file(config.businesses, options, config.workers);
  const auto index = index_businesses(businesses.records);
  std::size_t restaurants = 0;
  for (const auto& b : businesses.records) restaurants += b.is_restaurant;

  std::vector<std::string> written{kReviewsFile, "businesses.csv", "ingest.json"};
  ReviewIngestCounts counts;
  write_file(config.out_dir / kReviewsFile, [&](std::ostream& out) {
    counts = ingest_restaurant_reviews(config.reviews, options, index, out, config.workers);
  });
  write_file(config.out_dir / "businesses.csv",
             [&](std::ostream& out) { write_businesses_csv(out, businesses.records); });

  Json users_json = nullptr;
  if (!config.users.empty()) {
    const auto users = parse_users_file(config.users, options, config.workers);
    write_file(config.out_dir / "users.csv",
               [&](std::ostream& out) { write_users_csv(out, users.records); });
    written.push_back("users.csv");
    users_json = Json{{"parsed", users.records.size()}, {"skipped", users.skipped}};
  }

  write_json(config.out_dir / "ingest.json",
             Json{{"reviews",
                   {{"parsed", counts.parsed},
                    {"skipped", counts.skipped},
                    {"restaurant_reviews", counts.kept},
                    {"non_restaurant", counts.non_restaurant},
                    {"unknown_business", counts.unknown_business}}},
                  {"businesses",
                   {{"parsed", businesses.records.size()},
                    {"skipped", businesses.skipped},
                    {"restaurants", restaurants}}},
                  {"users", users_json}});
  return written;
}

std::vector<std::string> stage_stats(const RunConfig& config, const Analysis& analysis) {
  ensure_dir(config.out_dir);
  write_file(config.out_dir / "user_stats.csv",
             [&](std::ostream& out) { report::write_user_stats_csv(out, analysis.users); });
  write_file(config.out_dir / "business_stats.csv", [&](std::ostream& out) {
    report::write_business_stats_csv(out, analysis.businesses);
  });
  Json moments = analysis.moments ? report::moments_json(*analysis.moments, analysis.summary)
                                  : Json{{"error", "fewer than 2 users or businesses"}};
  write_json(config.out_dir / "moments.json", moments);
  std::vector<std::string> written{"user_stats.csv", "business_stats.csv", "moments.json"};

  const auto users_csv = config.out_dir / "users.csv";
  if (std::filesystem::exists(users_csv)) {
    std::ifstream in(users_csv);
    const auto users = parse_users(in, ParseOptions{Format::csv, false});
    write_json(config.out_dir / "user_consistency.json", consistency_json(analysis, users.records));
    written.push_back("user_consistency.json");
  }
  return written;
}

std::vector<std::string> stage_segment(const RunConfig& config, const Analysis& analysis,
                                       SegmentAssignment& segments) {
  ensure_dir(config.out_dir);
  segments = segment_raters(analysis.users, config.segment_options());

  auto thresholds = report::thresholds_json(segments);
  // The other common percentile convention, for comparison only.
  auto alt_options = config.segment_options();
  alt_options.convention = config.convention == PercentileConvention::linear
                               ? PercentileConvention::nearest_rank
                               : PercentileConvention::linear;
  const auto alt = segment_raters(analysis.users, alt_options);
  thresholds["alternative"] = Json{{"convention", std::string(to_string(alt_options.convention))},
                                   {"lo", report::json_number(alt.lo_threshold)},
                                   {"hi", report::json_number(alt.hi_threshold)}};

  write_file(config.out_dir / "segments.csv", [&](std::ostream& out) {
    report::write_segments_csv(out, segments, analysis.users);
  });
  write_json(config.out_dir / "thresholds.json", thresholds);
  const auto summary = cohort_summary(segments, analysis.users, analysis.businesses, analysis.table);
  write_json(config.out_dir / "cohort_summary.json", report::cohort_summary_json(summary));
  return {"segments.csv", "thresholds.json", "cohort_summary.json"};
}

std::vector<std::string> stage_regress(const RunConfig& config, const Analysis& analysis,
                                       RegressionLevel level) {
  ensure_dir(config.out_dir);
  if (level == RegressionLevel::rating) {
    if (!analysis.moments) {
      throw DegeneratePopulationError("rating-level regression needs at least 2 users and 2 businesses");
    }
    const auto fit = rating_level_regression(analysis.table, analysis.users, analysis.businesses,
                                             *analysis.moments,
                                             RatingRegressionOptions{config.leave_one_out});
    const std::string stem = config.leave_one_out ? "table1_loo" : "table1";
    write_json(config.out_dir / (stem + ".json"), report::regression_json(fit));
    write_file(config.out_dir / (stem + ".md"), [&](std::ostream& out) {
      report::write_regression_md(out, fit, "Rating-level regression (DV = rating)");
    });
    return {stem + ".json", stem + ".md"};
  }
  const auto reg = restaurant_level_regression(analysis.table, analysis.users, analysis.businesses,
                                               config.regression_min_count,
                                               config.regression_max_count);
  write_file(config.out_dir / "figure3.csv",
             [&](std::ostream& out) { report::write_figure3_csv(out, reg); });
  auto fit = report::regression_json(reg.fit);
  fit["min_count"] = config.regression_min_count;
  fit["max_count"] = config.regression_max_count;
  write_json(config.out_dir / "figure3_fit.json", fit);
  return {"figure3.csv", "figure3_fit.json"};
}

std::vector<std::string> stage_bootstrap(const RunConfig& config, const Analysis& analysis,
                                         const SegmentAssignment& segments,
                                         const std::vector<Cohort>& cohorts) {
  ensure_dir(config.out_dir);
  const auto universe =
      build_universe(analysis.table, analysis.businesses, segments, config.universe_options());
  write_file(config.out_dir / "universe.csv",
             [&](std::ostream& out) { report::write_universe_csv(out, universe); });

  std::vector<BootstrapResult> results;
  for (const auto cohort : cohorts) {
    if (cohort == Cohort::baseline) {
      results.push_back(
          random_baseline(universe, config.replicates, baseline_seed(config.seed), config.workers));
    } else {
      BootstrapOptions options;
      options.sample_size = config.sample_size;
      options.replicates = config.replicates;
      options.seed = bootstrap_seed(config.seed);
      options.workers = config.workers;
      results.push_back(run_bootstrap(universe, cohort, options));
    }
  }
  write_file(config.out_dir / "figure4.csv",
             [&](std::ostream& out) { report::write_figure4_csv(out, results); });

  Json detail{{"universe",
               {{"restaurants", universe.restaurants.size()},
                {"scores", universe.scores},
                {"counts", universe.category_counts},
                {"proportions", universe.proportions()}}},
              {"target", config.exclude_cohorts_from_target ? "excluding-cohorts" : "all-ratings"},
              {"results", Json::array()}};
  for (const auto& r : results) detail["results"].push_back(report::bootstrap_json(r));
  write_json(config.out_dir / "bootstrap.json", detail);
  return {"universe.csv", "figure4.csv", "bootstrap.json"};
}

std::vector<std::string> stage_report(const RunConfig& config, const Analysis& analysis,
                                      const SegmentAssignment& segments) {
  ensure_dir(config.out_dir);
  return report::export_histograms(config.out_dir, analysis.table, analysis.users,
                                   analysis.businesses, segments);
}

Manifest run_pipeline(const RunConfig& config) {
  ensure_dir(config.out_dir);
  Manifest manifest;
  manifest.config = config.to_json();
  std::set<std::string> outputs;

  auto run = [&](const std::string& name, auto&& body) {
    const auto start = std::chrono::steady_clock::now();
    StageRecord record{name, 0.0, false};
    auto finish = [&] {
      record.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      manifest.stages.push_back(record);
    };
    auto fail = [&] {
      finish();
      manifest.failed_stage = name;
      manifest.outputs.assign(outputs.begin(), outputs.end());
      write_manifest(config, manifest);
    };
    try {
      for (auto& f : body()) outputs.insert(f);
    } catch (const ConfigError& e) {
      fail();
      throw StageError(name, e.what(), true);
    } catch (const Error& e) {
      fail();
      throw StageError(name, e.what(), false);
    } catch (...) {
      fail();
      throw;
    }
    record.ok = true;
    finish();
  };

  std::optional<Analysis> analysis;
  SegmentAssignment segments;
  run("ingest", [&] { return stage_ingest(config); });
  run("stats", [&] {
    analysis = Analysis::load(config.out_dir, config.strict);
    return stage_stats(config, *analysis);
  });
  run("segment", [&] { return stage_segment(config, *analysis, segments); });
  run("regress", [&] {
    auto files = stage_regress(config, *analysis, RegressionLevel::rating);
    auto more = stage_regress(config, *analysis, RegressionLevel::restaurant);
    files.insert(files.end(), more.begin(), more.end());
    return files;
  });
  run("bootstrap", [&] {
    return stage_bootstrap(config, *analysis, segments,
                           {Cohort::baseline, Cohort::deflating, Cohort::inflating});
  });
  run("report", [&] { return stage_report(config, *analysis, segments); });

  manifest.complete = true;
  manifest.outputs.assign(outputs.begin(), outputs.end());
  write_manifest(config, manifest);
  return manifest;
}

void write_manifest(const RunConfig& config, const Manifest& manifest) {
  Json inputs = Json::array();
  for (const auto& path : {config.reviews, config.businesses, config.users}) {
    if (path.empty() || !std::filesystem::exists(path)) continue;
    inputs.push_back(Json{{"path", path.string()},
                          {"bytes", std::filesystem::file_size(path)},
                          {"sha256", sha256_file(path)}});
  }
  Json stages = Json::array();
  for (const auto& s : manifest.stages) {
    stages.push_back(Json{{"name", s.name}, {"seconds", s.seconds}, {"ok", s.ok}});
  }
  Json outputs = Json::array();
  for (const auto& name : manifest.outputs) {
    const auto path = config.out_dir / name;
    if (!std::filesystem::exists(path)) continue;
    outputs.push_back(Json{{"file", name},
                           {"bytes", std::filesystem::file_size(path)},
                           {"sha256", sha256_file(path)}});
  }
  Json j{{"status", manifest.complete ? "complete" : "partial"},
         {"config", manifest.config},
         {"inputs", inputs},
         {"stages", stages},
         {"outputs", outputs}};
  if (!manifest.failed_stage.empty()) j["failed_stage"] = manifest.failed_stage;
  write_json(config.out_dir / "manifest.json", j);
}

}  // namespace ratebias
