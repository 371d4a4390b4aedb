#include "ratebias/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "ratebias/error.hpp"
#include "ratebias/parallel.hpp"
#include "ratebias/seed.hpp"

namespace ratebias {

std::string_view to_string(Cohort c) {
  switch (c) {
    case Cohort::deflating: return "deflating";
    case Cohort::inflating: return "inflating";
    case Cohort::baseline: return "baseline";
  }
  return "?";
}

Cohort parse_cohort(std::string_view name) {
  if (name == "deflating") return Cohort::deflating;
  if (name == "inflating") return Cohort::inflating;
  if (name == "baseline" || name == "random") return Cohort::baseline;
  throw ConfigError("unknown cohort '" + std::string(name) + "'");
}

std::vector<double> Universe::proportions() const {
  std::vector<double> p(category_counts.size(), 0.0);
  const auto n = static_cast<double>(restaurants.size());
  for (std::size_t c = 0; c < p.size(); ++c) p[c] = static_cast<double>(category_counts[c]) / n;
  return p;
}

Universe build_universe(const RatingTable& table, std::span<const BusinessStats> businesses,
                        const SegmentAssignment& segments, const UniverseOptions& options) {
  if (businesses.size() != table.business_count() ||
      segments.labels.size() != table.user_count()) {
    throw Error("universe inputs describe different populations");
  }
  if (options.allowed_scores.empty()) throw ConfigError("no allowed scores for the universe");

  std::vector<char> candidate(businesses.size(), 0);
  for (std::size_t b = 0; b < businesses.size(); ++b) {
    candidate[b] = businesses[b].n > options.min_total;
  }

  // Non-cohort tallies for the alternative target.
  std::vector<std::uint64_t> other_n(businesses.size(), 0), other_sum(businesses.size(), 0);
  // (business, cohort flag, user, stars) for cohort ratings of candidates.
  std::vector<std::tuple<BusinessIdx, std::uint8_t, UserIdx, std::uint8_t>> entries;
  for (const auto& r : table.ratings()) {
    if (!candidate[r.business]) continue;
    const Segment s = segments.labels[r.user];
    if (s == Segment::deflating || s == Segment::inflating) {
      entries.emplace_back(r.business, s == Segment::deflating ? 0 : 1, r.user, r.stars);
    } else {
      ++other_n[r.business];
      other_sum[r.business] += r.stars;
    }
  }
  std::sort(entries.begin(), entries.end());

  std::vector<double> scores = options.allowed_scores;
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());

  Universe u;
  u.scores = scores;
  u.category_counts.assign(scores.size(), 0);
  for (std::size_t i = 0; i < entries.size();) {
    const BusinessIdx b = std::get<0>(entries[i]);
    UniverseRestaurant rest;
    rest.business_id = businesses[b].business_id;
    rest.total_ratings = businesses[b].n;
    for (; i < entries.size() && std::get<0>(entries[i]) == b;) {
      const auto flag = std::get<1>(entries[i]);
      const auto user = std::get<2>(entries[i]);
      std::uint64_t sum = 0, count = 0;
      for (; i < entries.size() && std::get<0>(entries[i]) == b && std::get<2>(entries[i]) == user;
           ++i) {
        sum += std::get<3>(entries[i]);
        ++count;
      }
      const double value = static_cast<double>(sum) / static_cast<double>(count);
      if (flag == 0) {
        rest.deflating_pool.push_back(value);
        rest.deflating_users.push_back(user);
      } else {
        rest.inflating_pool.push_back(value);
        rest.inflating_users.push_back(user);
      }
    }
    if (rest.deflating_pool.size() < options.min_per_cohort ||
        rest.inflating_pool.size() < options.min_per_cohort) {
      continue;
    }
    if (options.target == Target::all_ratings) {
      rest.true_score = businesses[b].yelp_score;
    } else {
      if (other_n[b] == 0) continue;
      rest.true_score = round_half(static_cast<double>(other_sum[b]) /
                                   static_cast<double>(other_n[b]));
    }
    const auto it = std::find(scores.begin(), scores.end(), rest.true_score);
    if (it == scores.end()) continue;
    rest.category = static_cast<std::size_t>(it - scores.begin());
    ++u.category_counts[rest.category];
    u.restaurants.push_back(std::move(rest));
  }
  if (u.restaurants.empty()) {
    throw EmptyUniverseError("no restaurant has more than " + std::to_string(options.min_total) +
                             " ratings, " + std::to_string(options.min_per_cohort) +
                             " raters from each cohort and an allowed score");
  }
  return u;
}

std::vector<std::size_t> block_sizes(std::size_t n, std::span<const double> proportions) {
  if (proportions.empty()) throw ConfigError("no class proportions");
  double total = 0.0;
  for (double p : proportions) {
    if (!(p >= 0.0)) throw ConfigError("negative class proportion");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw ConfigError("class proportions do not sum to 1");

  const std::size_t k = proportions.size();
  std::vector<std::size_t> sizes(k);
  std::vector<double> remainder(k);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double exact = proportions[c] * static_cast<double>(n);
    sizes[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - std::floor(exact);
    assigned += sizes[c];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return a > b;
  });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i % k]];
  return sizes;
}

std::vector<std::size_t> classify_by_proportions(std::span<const std::size_t> ranking,
                                                 std::span<const double> proportions) {
  const auto sizes = block_sizes(ranking.size(), proportions);
  std::vector<std::size_t> assigned(ranking.size(), 0);
  std::size_t pos = 0;
  for (std::size_t c = sizes.size(); c-- > 0;) {
    for (std::size_t i = 0; i < sizes[c]; ++i, ++pos) {
      if (ranking[pos] >= assigned.size()) throw Error("ranking is not a permutation");
      assigned[ranking[pos]] = c;
    }
  }
  return assigned;
}

std::vector<std::size_t> rank_descending(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

std::vector<double> category_accuracy(const Universe& universe,
                                      std::span<const std::size_t> assigned) {
  const std::size_t k = universe.scores.size();
  std::vector<std::size_t> hits(k, 0), totals(k, 0);
  for (std::size_t i = 0; i < universe.restaurants.size(); ++i) {
    const auto truth = universe.restaurants[i].category;
    ++totals[truth];
    if (assigned[i] == truth) ++hits[truth];
  }
  std::vector<double> acc(k, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c = 0; c < k; ++c) {
    if (totals[c] > 0) acc[c] = static_cast<double>(hits[c]) / static_cast<double>(totals[c]);
  }
  return acc;
}

std::vector<double> bootstrap_replicate(const Universe& universe, Cohort cohort,
                                        std::size_t sample_size, std::mt19937_64& rng) {
  const std::size_t n = universe.restaurants.size();
  std::vector<std::size_t> ranking;
  if (cohort == Cohort::baseline) {
    ranking.resize(n);
    std::iota(ranking.begin(), ranking.end(), 0);
    std::shuffle(ranking.begin(), ranking.end(), rng);
  } else {
    if (sample_size == 0) throw ConfigError("sample size must be positive");
    std::vector<double> averages(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto pool = universe.restaurants[i].pool(cohort);
      if (pool.empty()) {
        throw Error("empty " + std::string(to_string(cohort)) + " pool for " +
                    universe.restaurants[i].business_id);
      }
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      double sum = 0.0;
      for (std::size_t s = 0; s < sample_size; ++s) sum += pool[pick(rng)];
      averages[i] = sum / static_cast<double>(sample_size);
    }
    ranking = rank_descending(averages);
  }
  const auto assigned = classify_by_proportions(ranking, universe.proportions());
  return category_accuracy(universe, assigned);
}

BootstrapResult run_bootstrap(const Universe& universe, Cohort cohort,
                              const BootstrapOptions& options) {
  if (options.replicates < 2) throw ConfigError("bootstrap needs at least 2 replicates");
  BootstrapResult result;
  result.cohort = cohort;
  result.replicates = options.replicates;
  result.sample_size = options.sample_size;
  result.seed = options.seed;
  result.replicate_accuracy.resize(options.replicates);

  parallel_for(options.replicates, options.workers, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(options.seed, to_string(cohort), r));
    result.replicate_accuracy[r] = bootstrap_replicate(universe, cohort, options.sample_size, rng);
  });

  const double reps = static_cast<double>(options.replicates);
  for (std::size_t c = 0; c < universe.scores.size(); ++c) {
    CategoryAccuracy cat;
    cat.score = universe.scores[c];
    cat.restaurants = universe.category_counts[c];
    if (cat.restaurants == 0) continue;
    double sum = 0.0;
    for (const auto& rep : result.replicate_accuracy) sum += rep[c];
    cat.mean = sum / reps;
    double ss = 0.0;
    for (const auto& rep : result.replicate_accuracy) ss += (rep[c] - cat.mean) * (rep[c] - cat.mean);
    cat.se = std::sqrt(ss / (reps - 1.0)) / std::sqrt(reps);
    result.categories.push_back(cat);
  }
  return result;
}

BootstrapResult random_baseline(const Universe& universe, std::size_t replicates,
                                std::uint64_t seed, unsigned workers) {
  BootstrapOptions options;
  options.replicates = replicates;
  options.seed = seed;
  options.workers = workers;
  return run_bootstrap(universe, Cohort::baseline, options);
}

}  // namespace ratebias
