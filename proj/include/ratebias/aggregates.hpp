#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ratebias/ingest.hpp"
#include "ratebias/table.hpp"

namespace ratebias {

struct UserStats {
  std::string user_id;
  std::uint64_t n = 0;
  double mean = 0.0;  // the user's average rating
};

struct BusinessStats {
  std::string business_id;
  std::uint64_t n = 0;
  double mean = 0.0;        // the restaurant's average rating
  double yelp_score = 0.0;  // mean rounded to the nearest half star
};

struct PopulationMoments {
  double mu_u = 0.0;
  double sigma_u = 0.0;
  double mu_r = 0.0;
  double sigma_r = 0.0;
  std::size_t users = 0;
  std::size_t businesses = 0;
};

/// Nearest multiple of 0.5; exact quarter midpoints round up.
double round_half(double x);

// Per-entity statistics. The table overloads return vectors indexed by the
// table's dense user/business index; every entity in a table has n >= 1.
std::vector<UserStats> user_stats(const RatingTable& table);
std::vector<BusinessStats> business_stats(const RatingTable& table);

std::map<std::string, UserStats> user_stats(std::span<const RatingRecord> ratings);
std::map<std::string, BusinessStats> business_stats(std::span<const RatingRecord> ratings);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // population (divisor N)
};

/// Compensated two-pass mean and population standard deviation.
MeanSd mean_sd(std::span<const double> values);

/// Moments of the users' and the businesses' mean ratings.
/// Throws DegeneratePopulationError with fewer than 2 users or businesses.
PopulationMoments population_moments(std::span<const UserStats> users,
                                     std::span<const BusinessStats> businesses);

/// (x - mu) / sigma; throws DegeneratePopulationError unless sigma > 0.
double normalize(double x, double mu, double sigma);
double denormalize(double z, double mu, double sigma);

struct DatasetSummary {
  std::size_t ratings = 0;
  std::size_t users = 0;
  std::size_t businesses = 0;
  double mean_over_ratings = 0.0;  // also the rating-weighted mean of user means
  double mean_over_users = 0.0;    // unweighted mean of user means
};

DatasetSummary summarize(const RatingTable& table, std::span<const UserStats> users);

}  // namespace ratebias
