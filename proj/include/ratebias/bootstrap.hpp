#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ratebias/aggregates.hpp"
#include "ratebias/segmentation.hpp"
#include "ratebias/table.hpp"

namespace ratebias {

enum class Cohort { deflating, inflating, baseline };

std::string_view to_string(Cohort c);
Cohort parse_cohort(std::string_view name);

/// What a restaurant's "true" class is measured against.
enum class Target {
  all_ratings,        // the Yelp score over every rating
  excluding_cohorts,  // the rounded mean over ratings by neither cohort
};

struct UniverseOptions {
  std::uint64_t min_total = 200;  // restaurants need strictly more ratings than this
  std::size_t min_per_cohort = 50;
  std::vector<double> allowed_scores{3.5, 4.0, 4.5};
  Target target = Target::all_ratings;
};

struct UniverseRestaurant {
  std::string business_id;
  std::uint64_t total_ratings = 0;
  double true_score = 0.0;
  std::size_t category = 0;  // index into Universe::scores
  // One entry per distinct rater: that rater's mean stars for this restaurant.
  std::vector<double> deflating_pool;
  std::vector<double> inflating_pool;
  std::vector<UserIdx> deflating_users;
  std::vector<UserIdx> inflating_users;

  std::span<const double> pool(Cohort c) const {
    return c == Cohort::deflating ? deflating_pool : inflating_pool;
  }
};

struct Universe {
  std::vector<double> scores;                  // category scores, ascending
  std::vector<UniverseRestaurant> restaurants; // ascending business_id
  std::vector<std::size_t> category_counts;

  std::vector<double> proportions() const;
};

/// Restaurants with more than `min_total` ratings, at least `min_per_cohort`
/// distinct raters from each cohort and a true score in `allowed_scores`.
/// Throws EmptyUniverseError when none qualify.
Universe build_universe(const RatingTable& table, std::span<const BusinessStats> businesses,
                        const SegmentAssignment& segments, const UniverseOptions& options = {});

/// Splits n items into per-category block sizes (ascending category order) by
/// largest remainder; ties go to the higher category. Sizes sum to n.
std::vector<std::size_t> block_sizes(std::size_t n, std::span<const double> proportions);

/// `ranking` lists universe positions best first. The top block takes the
/// highest category, the next block the one below, and so on. Returns the
/// assigned category per universe position.
std::vector<std::size_t> classify_by_proportions(std::span<const std::size_t> ranking,
                                                 std::span<const double> proportions);

/// Positions ordered by descending score; ties by ascending position (and so
/// by ascending business_id in a Universe).
std::vector<std::size_t> rank_descending(std::span<const double> scores);

/// Fraction of each category's restaurants assigned their own category. NaN
/// for categories with no restaurants.
std::vector<double> category_accuracy(const Universe& universe,
                                      std::span<const std::size_t> assigned);

/// One replicate: per restaurant draw `sample_size` pool values with
/// replacement, average, rank, classify, score. The baseline cohort ranks by a
/// uniform random permutation instead.
std::vector<double> bootstrap_replicate(const Universe& universe, Cohort cohort,
                                        std::size_t sample_size, std::mt19937_64& rng);

struct BootstrapOptions {
  std::size_t sample_size = 20;
  std::size_t replicates = 100;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0 = hardware concurrency; never changes results
};

struct CategoryAccuracy {
  double score = 0.0;
  std::size_t restaurants = 0;
  double mean = 0.0;
  double se = 0.0;  // sample sd across replicates / sqrt(R)
};

struct BootstrapResult {
  Cohort cohort = Cohort::baseline;
  std::size_t replicates = 0;
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  std::vector<CategoryAccuracy> categories;
  std::vector<std::vector<double>> replicate_accuracy;  // [replicate][category]
};

/// Replicate r draws from a generator seeded with derive_seed(seed, cohort, r).
BootstrapResult run_bootstrap(const Universe& universe, Cohort cohort,
                              const BootstrapOptions& options);

BootstrapResult random_baseline(const Universe& universe, std::size_t replicates,
                                std::uint64_t seed, unsigned workers = 0);

}  // namespace ratebias
