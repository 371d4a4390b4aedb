#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "../support.hpp"
#include "ratebias/aggregates.hpp"
#include "ratebias/error.hpp"
#include "ratebias/table.hpp"

using namespace ratebias;

TEST_CASE("round_half forced examples") {
  CHECK(round_half(3.74) == 3.5);
  CHECK(round_half(3.76) == 4.0);
  CHECK(round_half(3.75) == 4.0);
  CHECK(round_half(13.0 / 3.0) == 4.5);
  CHECK(round_half(3.5) == 3.5);
  CHECK(round_half(1.0) == 1.0);
  CHECK(round_half(4.25) == 4.5);
  CHECK(round_half(4.2499999) == 4.0);
}

TEST_CASE("business stats forced examples") {
  const std::vector<RatingRecord> r{{"a", "x", 4}, {"b", "x", 4}, {"c", "x", 5},
                                    {"a", "y", 3}, {"b", "y", 4}};
  const auto stats = business_stats(r);
  CHECK(stats.at("x").n == 3);
  CHECK(stats.at("x").mean == doctest::Approx(13.0 / 3.0).epsilon(1e-15));
  CHECK(stats.at("x").yelp_score == 4.5);
  CHECK(stats.at("y").mean == 3.5);
  CHECK(stats.at("y").yelp_score == 3.5);
}

TEST_CASE("singleton user") {
  const std::vector<RatingRecord> r{{"solo", "x", 4}};
  const auto stats = user_stats(r);
  CHECK(stats.at("solo").n == 1);
  CHECK(stats.at("solo").mean == 4.0);
  CHECK(user_stats(std::vector<RatingRecord>{}).empty());
}

TEST_CASE("six-record fixture matches hand sums") {
  const std::vector<RatingRecord> r{{"u1", "a", 5}, {"u1", "b", 4}, {"u1", "c", 2},
                                    {"u2", "a", 1}, {"u2", "b", 2}, {"u2", "c", 2}};
  const auto stats = user_stats(r);
  CHECK(stats.at("u1").mean == doctest::Approx(11.0 / 3.0).epsilon(1e-15));
  CHECK(stats.at("u2").mean == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("table statistics agree with record statistics") {
  std::mt19937_64 rng(11);
  const auto records = testing::random_ratings(rng, 80, 30, 0.2);
  const auto table = RatingTable::from_records(records);
  const auto by_record = user_stats(records);
  const auto by_table = user_stats(table);
  REQUIRE(by_table.size() == by_record.size());
  for (const auto& u : by_table) {
    CHECK(by_record.at(u.user_id).n == u.n);
    CHECK(by_record.at(u.user_id).mean == u.mean);
  }
  const auto b_record = business_stats(records);
  for (const auto& b : business_stats(table)) {
    CHECK(b_record.at(b.business_id).mean == b.mean);
    CHECK(b_record.at(b.business_id).yelp_score == b.yelp_score);
  }
}

TEST_CASE("table indices do not depend on input order") {
  std::mt19937_64 rng(5);
  auto records = testing::random_ratings(rng, 20, 10, 0.5);
  const auto a = RatingTable::from_records(records);
  std::shuffle(records.begin(), records.end(), rng);
  const auto b = RatingTable::from_records(records);
  REQUIRE(a.user_count() == b.user_count());
  for (UserIdx u = 0; u < a.user_count(); ++u) CHECK(a.user_id(u) == b.user_id(u));
  CHECK(a.find_user("u3").has_value());
  CHECK_FALSE(a.find_user("nobody").has_value());
}

TEST_CASE("population moments") {
  SUBCASE("two-point population") {
    const std::vector<UserStats> users{{"a", 1, 3.0}, {"b", 1, 5.0}};
    const std::vector<BusinessStats> biz{{"x", 1, 3.0, 3.0}, {"y", 1, 5.0, 5.0}};
    const auto m = population_moments(users, biz);
    CHECK(m.mu_u == 4.0);
    CHECK(m.sigma_u == 1.0);
  }
  SUBCASE("fewer than two entities") {
    const std::vector<UserStats> users{{"a", 1, 3.0}};
    const std::vector<BusinessStats> biz{{"x", 1, 3.0, 3.0}, {"y", 1, 5.0, 5.0}};
    CHECK_THROWS_AS(population_moments(users, biz), DegeneratePopulationError);
  }
  SUBCASE("all equal means give sigma 0 and normalize refuses") {
    const std::vector<UserStats> users{{"a", 1, 4.0}, {"b", 2, 4.0}};
    const std::vector<BusinessStats> biz{{"x", 1, 3.0, 3.0}, {"y", 1, 5.0, 5.0}};
    const auto m = population_moments(users, biz);
    CHECK(m.sigma_u == 0.0);
    CHECK_THROWS_AS(normalize(4.0, m.mu_u, m.sigma_u), DegeneratePopulationError);
  }
  SUBCASE("100-user set matches a naive two-pass oracle") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(1.0, 5.0);
    std::vector<UserStats> users;
    for (int i = 0; i < 100; ++i) users.push_back({"u" + std::to_string(i), 1, d(rng)});
    const std::vector<BusinessStats> biz{{"x", 1, 3.0, 3.0}, {"y", 1, 5.0, 5.0}};
    double mean = 0.0;
    for (const auto& u : users) mean += u.mean;
    mean /= 100.0;
    double ss = 0.0;
    for (const auto& u : users) ss += (u.mean - mean) * (u.mean - mean);
    const double sd = std::sqrt(ss / 100.0);
    const auto m = population_moments(users, biz);
    CHECK(std::fabs(m.mu_u - mean) <= 1e-12);
    CHECK(std::fabs(m.sigma_u - sd) <= 1e-12);
  }
}

TEST_CASE("normalize forced examples") {
  CHECK(normalize(3.2, 3.2, 0.7) == 0.0);
  CHECK(normalize(3.9, 3.2, 0.7) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(normalize(4.0, 3.0, 1.0) == 1.0);
  CHECK(denormalize(normalize(4.4, 3.1, 0.6), 3.1, 0.6) == doctest::Approx(4.4));
  const std::vector<double> xs{1.0, 2.5, 3.7, 5.0};
  for (double x : xs) CHECK(normalize(x, 3.79, 0.81) == (x - 3.79) / 0.81);
  CHECK_THROWS_AS(normalize(1.0, 0.0, -1.0), DegeneratePopulationError);
}

TEST_CASE("dataset summary means") {
  const std::vector<RatingRecord> r{{"a", "x", 5}, {"a", "y", 5}, {"a", "z", 5}, {"b", "x", 1}};
  const auto table = RatingTable::from_records(r);
  const auto users = user_stats(table);
  const auto s = summarize(table, users);
  CHECK(s.ratings == 4);
  CHECK(s.mean_over_ratings == 4.0);
  CHECK(s.mean_over_users == 3.0);
}

TEST_CASE("builder rejects out-of-range stars") {
  RatingTable::Builder b;
  CHECK_THROWS(b.add("u", "b", 0));
  CHECK_THROWS(b.add("u", "b", 6));
}
