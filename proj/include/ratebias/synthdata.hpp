#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ratebias/ingest.hpp"

namespace ratebias {

/// Latent-factor rating model: user i rates restaurant j
///   clamp(round(3 + quality_j + generosity_i + noise_ij), 1, 5)
/// with all three terms zero-mean normal.
struct SynthConfig {
  std::size_t n_users = 10000;
  std::size_t n_restaurants = 500;
  // Each user rates a uniform number of distinct restaurants in this range.
  std::size_t min_ratings_per_user = 5;
  std::size_t max_ratings_per_user = 40;
  double quality_spread = 0.5;
  double generosity_spread = 0.7;
  double noise_spread = 0.8;
  /// Zipf exponent for restaurant popularity; 0 picks restaurants uniformly.
  double popularity_skew = 0.0;
  std::uint64_t seed = 1;

  /// Throws ConfigError on negative spreads or empty counts.
  void validate() const;
};

struct SynthDataset {
  std::vector<RatingRecord> ratings;  // sorted by (user_id, business_id)
  std::map<std::string, double> latent_quality;     // business_id -> q_j
  std::map<std::string, double> latent_generosity;  // user_id -> g_i
};

SynthDataset generate(const SynthConfig& config);

/// Restaurant table for a synthetic dataset (every business is a restaurant).
std::vector<BusinessRecord> synthetic_businesses(const SynthDataset& data);
std::vector<UserRecord> synthetic_users(const SynthDataset& data);

void write_latents_json(std::ostream& out, const SynthConfig& config, const SynthDataset& data);

}  // namespace ratebias
