#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "ratebias/error.hpp"
#include "ratebias/pipeline.hpp"
#include "ratebias/report.hpp"
#include "ratebias/synthdata.hpp"

namespace {

using namespace ratebias;

enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

const std::map<std::string, PercentileConvention> kConventions{
    {"linear", PercentileConvention::linear}, {"nearest-rank", PercentileConvention::nearest_rank}};

// Enum-valued flags are captured as text and resolved after parsing.
struct Choices {
  std::string format = "json";
  std::string convention = "linear";
};

const std::map<std::string, RegressionLevel> kLevels{
    {"rating", RegressionLevel::rating}, {"restaurant", RegressionLevel::restaurant}};

void add_out(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--out", c.out_dir, "Working/output directory")->capture_default_str();
  cmd->add_option("--workers", c.workers, "Threads (0 = all cores; never changes results)");
}

void add_inputs(CLI::App* cmd, RunConfig& c, Choices& ch, bool users_required) {
  cmd->add_option("--reviews", c.reviews, "Review file")->required();
  cmd->add_option("--businesses", c.businesses, "Business file")->required();
  auto* users = cmd->add_option("--users", c.users, "User file");
  if (users_required) users->required();
  cmd->add_option("--format", ch.format, "Input format: json or csv")
      ->check(CLI::IsMember({"json", "jsonl", "json-lines", "csv"}))
      ->capture_default_str();
  cmd->add_flag("--strict", c.strict, "Fail on the first malformed record");
}

void add_segmentation(CLI::App* cmd, RunConfig& c, Choices& ch) {
  cmd->add_option("--min-ratings", c.min_ratings, "Eligibility threshold")->capture_default_str();
  cmd->add_option("--lo-pct", c.lo_pct, "Deflating percentile")->capture_default_str()
      ->check(CLI::Range(0.0, 100.0));
  cmd->add_option("--hi-pct", c.hi_pct, "Inflating percentile")->capture_default_str()
      ->check(CLI::Range(0.0, 100.0));
  cmd->add_option("--percentile", ch.convention, "linear or nearest-rank")
      ->check(CLI::IsMember({"linear", "nearest-rank"}))
      ->capture_default_str();
}

void add_regression(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--min-count", c.regression_min_count, "Restaurant-level stratum floor")
      ->capture_default_str();
  cmd->add_option("--max-count", c.regression_max_count, "Restaurant-level stratum ceiling")
      ->capture_default_str();
  cmd->add_flag("--loo", c.leave_one_out, "Leave the rating out of its user's mean");
}

void add_bootstrap(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--sample-size", c.sample_size, "Draws per restaurant")->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--replicates", c.replicates, "Replicates R")->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  cmd->add_option("--seed", c.seed, "Run seed")->capture_default_str();
  cmd->add_flag("--exclude-cohorts-from-target", c.exclude_cohorts_from_target,
                "Compute true scores without cohort ratings");
  cmd->add_option("--universe-min-total", c.universe_min_total, "Universe: ratings > this")
      ->capture_default_str();
  cmd->add_option("--universe-min-per-cohort", c.universe_min_per_cohort,
                  "Universe: raters from each cohort >= this")
      ->capture_default_str();
  cmd->add_option("--scores", c.universe_scores, "Universe score classes")
      ->delimiter(',')
      ->capture_default_str();
}

void print_manifest_summary(const Manifest& m) {
  for (const auto& s : m.stages) {
    std::cout << s.name << '\t' << report::number(s.seconds) << "s\n";
  }
  std::cout << m.outputs.size() << " outputs\n";
}

void print_written(const std::vector<std::string>& files, const std::filesystem::path& dir) {
  for (const auto& f : files) std::cout << (dir / f).string() << '\n';
}

std::vector<Cohort> cohorts_for(const std::string& name) {
  if (name == "all") return {Cohort::baseline, Cohort::deflating, Cohort::inflating};
  return {parse_cohort(name)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rater-bias analysis of restaurant ratings"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file; flags on the command line win");
  app.set_version_flag("--version", "ratebias 1.0");

  RunConfig config;
  Choices choices;
  SynthConfig synth;
  std::filesystem::path synth_out = "synth";
  std::string level = "rating";
  std::string cohort = "all";

  auto* ingest = app.add_subcommand("ingest", "Parse raw files; keep restaurant reviews");
  add_inputs(ingest, config, choices, true);
  add_out(ingest, config);

  auto* stats = app.add_subcommand("stats", "Per-user and per-restaurant aggregates");
  add_out(stats, config);
  stats->add_flag("--strict", config.strict, "Fail on malformed rows");

  auto* segment = app.add_subcommand("segment", "Inflating/deflating rater cohorts");
  add_out(segment, config);
  add_segmentation(segment, config, choices);

  auto* regress = app.add_subcommand("regress", "Rating- or restaurant-level OLS");
  add_out(regress, config);
  regress->add_option("--level", level, "rating or restaurant")
      ->check(CLI::IsMember({"rating", "restaurant"}))
      ->capture_default_str();
  add_regression(regress, config);

  auto* boot = app.add_subcommand("bootstrap", "Ranking-accuracy experiment");
  add_out(boot, config);
  add_segmentation(boot, config, choices);
  add_bootstrap(boot, config);
  boot->add_option("--cohort", cohort, "deflating, inflating, baseline or all")
      ->check(CLI::IsMember({"deflating", "inflating", "baseline", "random", "all"}))
      ->capture_default_str();

  auto* rep = app.add_subcommand("report", "Histogram data for the distribution figures");
  add_out(rep, config);
  add_segmentation(rep, config, choices);

  auto* run = app.add_subcommand("run", "Full pipeline with manifest");
  add_inputs(run, config, choices, false);
  add_out(run, config);
  add_segmentation(run, config, choices);
  add_regression(run, config);
  add_bootstrap(run, config);

  auto* syn = app.add_subcommand("synth", "Latent-factor synthetic dataset");
  syn->add_option("--users", synth.n_users)->capture_default_str();
  syn->add_option("--restaurants", synth.n_restaurants)->capture_default_str();
  syn->add_option("--min-per-user", synth.min_ratings_per_user)->capture_default_str();
  syn->add_option("--max-per-user", synth.max_ratings_per_user)->capture_default_str();
  syn->add_option("--quality-spread", synth.quality_spread)->capture_default_str();
  syn->add_option("--generosity-spread", synth.generosity_spread)->capture_default_str();
  syn->add_option("--noise-spread", synth.noise_spread)->capture_default_str();
  syn->add_option("--popularity-skew", synth.popularity_skew)->capture_default_str();
  syn->add_option("--seed", synth.seed)->capture_default_str();
  syn->add_option("--out", synth_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  config.format = parse_format(choices.format);
  config.convention = kConventions.at(choices.convention);
  const auto level_enum = kLevels.at(level);
  std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (*ingest) {
      print_written(stage_ingest(config), config.out_dir);
    } else if (*stats) {
      const auto a = Analysis::load(config.out_dir, config.strict);
      print_written(stage_stats(config, a), config.out_dir);
    } else if (*segment) {
      const auto a = Analysis::load(config.out_dir);
      SegmentAssignment s;
      print_written(stage_segment(config, a, s), config.out_dir);
      for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
    } else if (*regress) {
      const auto a = Analysis::load(config.out_dir);
      print_written(stage_regress(config, a, level_enum), config.out_dir);
    } else if (*boot) {
      const auto a = Analysis::load(config.out_dir);
      const auto s = segment_raters(a.users, config.segment_options());
      print_written(stage_bootstrap(config, a, s, cohorts_for(cohort)), config.out_dir);
    } else if (*rep) {
      const auto a = Analysis::load(config.out_dir);
      const auto s = segment_raters(a.users, config.segment_options());
      print_written(stage_report(config, a, s), config.out_dir);
    } else if (*run) {
      print_manifest_summary(run_pipeline(config));
    } else if (*syn) {
      const auto data = generate(synth);
      std::filesystem::create_directories(synth_out);
      report::write_file(synth_out / "reviews.csv",
                         [&](std::ostream& o) { write_reviews_csv(o, data.ratings); });
      report::write_file(synth_out / "businesses.csv", [&](std::ostream& o) {
        write_businesses_csv(o, synthetic_businesses(data));
      });
      report::write_file(synth_out / "users.csv",
                         [&](std::ostream& o) { write_users_csv(o, synthetic_users(data)); });
      report::write_file(synth_out / "latents.json",
                         [&](std::ostream& o) { write_latents_json(o, synth, data); });
      print_written({"reviews.csv", "businesses.csv", "users.csv", "latents.json"}, synth_out);
    }
  } catch (const StageError& e) {
    std::cerr << "error [" << e.stage() << "]: "
              << std::string_view(e.what()).substr(e.stage().size() + 2) << '\n';
    return e.config_error() ? kUsage : kData;
  } catch (const ConfigError& e) {
    std::cerr << "error [" << stage << "]: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << stage << "]: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error [" << stage << "]: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
