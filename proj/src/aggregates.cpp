#include "ratebias/aggregates.hpp"

#include <cmath>

#include "ratebias/error.hpp"

namespace ratebias {

namespace {

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// Star totals are integers, so per-entity sums are exact.
struct Tally {
  std::uint64_t n = 0;
  std::uint64_t total = 0;
};

template <typename Key>
void tally(std::vector<Tally>& tallies, Key key, int stars) {
  auto& t = tallies[key];
  ++t.n;
  t.total += static_cast<std::uint64_t>(stars);
}

double mean_of(const Tally& t) {
  return static_cast<double>(t.total) / static_cast<double>(t.n);
}

}  // namespace

double round_half(double x) {
  const double twice = x * 2.0;
  const double whole = std::floor(twice);
  return (twice - whole >= 0.5 ? whole + 1.0 : whole) / 2.0;
}

std::vector<UserStats> user_stats(const RatingTable& table) {
  std::vector<Tally> tallies(table.user_count());
  for (const auto& r : table.ratings()) tally(tallies, r.user, r.stars);
  std::vector<UserStats> out(tallies.size());
  for (UserIdx u = 0; u < tallies.size(); ++u) {
    out[u] = UserStats{table.user_id(u), tallies[u].n, mean_of(tallies[u])};
  }
  return out;
}

std::vector<BusinessStats> business_stats(const RatingTable& table) {
  std::vector<Tally> tallies(table.business_count());
  for (const auto& r : table.ratings()) tally(tallies, r.business, r.stars);
  std::vector<BusinessStats> out(tallies.size());
  for (BusinessIdx b = 0; b < tallies.size(); ++b) {
    const double mean = mean_of(tallies[b]);
    out[b] = BusinessStats{table.business_id(b), tallies[b].n, mean, round_half(mean)};
  }
  return out;
}

std::map<std::string, UserStats> user_stats(std::span<const RatingRecord> ratings) {
  std::map<std::string, UserStats> out;
  for (auto& s : user_stats(RatingTable::from_records(ratings))) {
    auto key = s.user_id;
    out.emplace(std::move(key), std::move(s));
  }
  return out;
}

std::map<std::string, BusinessStats> business_stats(std::span<const RatingRecord> ratings) {
  std::map<std::string, BusinessStats> out;
  for (auto& s : business_stats(RatingTable::from_records(ratings))) {
    auto key = s.business_id;
    out.emplace(std::move(key), std::move(s));
  }
  return out;
}

MeanSd mean_sd(std::span<const double> values) {
  if (values.empty()) return {};
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  const double n = static_cast<double>(values.size());
  const double mean = sum.value() / n;
  CompensatedSum squares;
  for (double v : values) {
    const double d = v - mean;
    squares.add(d * d);
  }
  return {mean, std::sqrt(squares.value() / n)};
}

PopulationMoments population_moments(std::span<const UserStats> users,
                                     std::span<const BusinessStats> businesses) {
  if (users.size() < 2 || businesses.size() < 2) {
    throw DegeneratePopulationError(
        "population moments need at least 2 users and 2 businesses (got " +
        std::to_string(users.size()) + " and " + std::to_string(businesses.size()) + ")");
  }
  std::vector<double> values;
  values.reserve(users.size());
  for (const auto& u : users) values.push_back(u.mean);
  const auto u = mean_sd(values);
  values.clear();
  for (const auto& b : businesses) values.push_back(b.mean);
  const auto r = mean_sd(values);
  return PopulationMoments{u.mean, u.sd, r.mean, r.sd, users.size(), businesses.size()};
}

double normalize(double x, double mu, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DegeneratePopulationError("cannot normalize with standard deviation " +
                                    std::to_string(sigma));
  }
  return (x - mu) / sigma;
}

double denormalize(double z, double mu, double sigma) { return z * sigma + mu; }

DatasetSummary summarize(const RatingTable& table, std::span<const UserStats> users) {
  DatasetSummary s;
  s.ratings = table.size();
  s.users = table.user_count();
  s.businesses = table.business_count();
  std::uint64_t total = 0;
  for (const auto& r : table.ratings()) total += r.stars;
  if (s.ratings > 0) s.mean_over_ratings = static_cast<double>(total) / s.ratings;
  std::vector<double> means;
  means.reserve(users.size());
  for (const auto& u : users) means.push_back(u.mean);
  s.mean_over_users = mean_sd(means).mean;
  return s;
}

}  // namespace ratebias
