#include "ratebias/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <random>

#include "ratebias/aggregates.hpp"
#include "ratebias/error.hpp"
#include "ratebias/seed.hpp"

namespace ratebias {

namespace {

// Zero padded so lexicographic order equals numeric order.
std::string make_id(char prefix, std::size_t i, std::size_t count) {
  const auto width = std::to_string(count > 0 ? count - 1 : 0).size();
  auto digits = std::to_string(i);
  return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

double draw_normal(std::mt19937_64& rng, double sd) {
  if (sd == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sd)(rng);
}

}  // namespace

void SynthConfig::validate() const {
  if (n_users == 0 || n_restaurants == 0) throw ConfigError("synthetic counts must be >= 1");
  if (min_ratings_per_user == 0 || min_ratings_per_user > max_ratings_per_user) {
    throw ConfigError("ratings per user range must satisfy 1 <= min <= max");
  }
  for (double s : {quality_spread, generosity_spread, noise_spread, popularity_skew}) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("spreads must be finite and >= 0");
  }
}

SynthDataset generate(const SynthConfig& config) {
  config.validate();
  SynthDataset data;

  std::vector<std::string> business_ids(config.n_restaurants);
  std::vector<double> quality(config.n_restaurants);
  std::mt19937_64 quality_rng(derive_seed(config.seed, "synth/quality"));
  for (std::size_t j = 0; j < config.n_restaurants; ++j) {
    business_ids[j] = make_id('r', j, config.n_restaurants);
    quality[j] = draw_normal(quality_rng, config.quality_spread);
    data.latent_quality.emplace(business_ids[j], quality[j]);
  }

  // Popularity weights by restaurant index; restaurant 0 is the most popular.
  std::vector<double> log_weight(config.n_restaurants, 0.0);
  for (std::size_t j = 0; j < config.n_restaurants; ++j) {
    log_weight[j] = -config.popularity_skew * std::log(static_cast<double>(j + 1));
  }

  std::vector<std::pair<double, std::size_t>> keys(config.n_restaurants);
  for (std::size_t i = 0; i < config.n_users; ++i) {
    const auto user_id = make_id('u', i, config.n_users);
    std::mt19937_64 rng(derive_seed(config.seed, "synth/user", i));
    const double generosity = draw_normal(rng, config.generosity_spread);
    data.latent_generosity.emplace(user_id, generosity);

    std::uniform_int_distribution<std::size_t> count_dist(config.min_ratings_per_user,
                                                          config.max_ratings_per_user);
    const std::size_t count = std::min(count_dist(rng), config.n_restaurants);

    // Weighted sampling without replacement: largest log(u)/w keys win.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t j = 0; j < config.n_restaurants; ++j) {
      const double u = std::max(unit(rng), std::numeric_limits<double>::min());
      keys[j] = {std::log(u) / std::exp(log_weight[j]), j};
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(count), keys.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::size_t> chosen(count);
    for (std::size_t c = 0; c < count; ++c) chosen[c] = keys[c].second;
    std::sort(chosen.begin(), chosen.end());

    for (std::size_t j : chosen) {
      const double latent = 3.0 + quality[j] + generosity + draw_normal(rng, config.noise_spread);
      const int stars = static_cast<int>(std::clamp(std::round(latent), 1.0, 5.0));
      data.ratings.push_back(RatingRecord{user_id, business_ids[j], stars});
    }
  }
  return data;
}

std::vector<BusinessRecord> synthetic_businesses(const SynthDataset& data) {
  const auto stats = business_stats(data.ratings);
  std::vector<BusinessRecord> out;
  for (const auto& [id, q] : data.latent_quality) {
    BusinessRecord b;
    b.business_id = id;
    b.is_restaurant = true;
    if (const auto it = stats.find(id); it != stats.end()) {
      b.source_review_count = it->second.n;
      b.source_score = it->second.yelp_score;
    } else {
      b.source_score = 3.0;
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<UserRecord> synthetic_users(const SynthDataset& data) {
  std::vector<UserRecord> out;
  for (const auto& [id, s] : user_stats(data.ratings)) {
    out.push_back(UserRecord{id, s.n, s.mean});
  }
  return out;
}

void write_latents_json(std::ostream& out, const SynthConfig& config, const SynthDataset& data) {
  nlohmann::ordered_json j;
  j["config"] = {
      {"n_users", config.n_users},
      {"n_restaurants", config.n_restaurants},
      {"min_ratings_per_user", config.min_ratings_per_user},
      {"max_ratings_per_user", config.max_ratings_per_user},
      {"quality_spread", config.quality_spread},
      {"generosity_spread", config.generosity_spread},
      {"noise_spread", config.noise_spread},
      {"popularity_skew", config.popularity_skew},
      {"seed", config.seed},
  };
  j["quality"] = data.latent_quality;
  j["generosity"] = data.latent_generosity;
  out << j.dump(1) << '\n';
}

}  // namespace ratebias
