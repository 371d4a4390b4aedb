#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ratebias/aggregates.hpp"
#include "ratebias/table.hpp"

namespace ratebias {

struct RegressionFit {
  std::vector<std::string> names;  // intercept first
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_values;
  std::vector<double> p_values;
  double r_squared = 0.0;
  double adj_r_squared = 0.0;
  double f_value = 0.0;
  double f_p_value = 0.0;
  double residual_ss = 0.0;
  double total_ss = 0.0;
  std::size_t df_residual = 0;
  std::size_t df_model = 0;
  std::size_t n_obs = 0;
};

/// Dense row-major design matrix. Column 0 must be the intercept.
struct DesignMatrix {
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t cols() const noexcept { return names.size(); }
  std::size_t rows() const noexcept { return names.empty() ? 0 : values.size() / names.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * cols(), cols());
  }
  void add_row(std::span<const double> r) { values.insert(values.end(), r.begin(), r.end()); }
};

/// Least squares by Givens rotations applied one row at a time, so the design
/// never has to be held in memory. Keeps the k x k triangular factor R, the
/// rotated response Q'y and the residual sum of squares.
class OlsAccumulator {
 public:
  explicit OlsAccumulator(std::vector<std::string> names);

  void add(std::span<const double> row, double y);

  std::size_t rows() const noexcept { return n_; }

  /// Throws InsufficientDataError when rows() <= k and SingularDesignError when
  /// a column is (numerically) a combination of earlier ones. With
  /// `allow_saturated`, rows() == k is accepted: the fit is exact and every
  /// inferential statistic is NaN.
  RegressionFit fit(bool allow_saturated = false) const;

 private:
  std::vector<std::string> names_;
  std::size_t k_;
  std::vector<double> r_;            // upper triangle, row-major k x k
  std::vector<double> qty_;          // first k entries of Q'y
  std::vector<double> column_ss_;    // sum of squares per column, for the rank test
  double rss_ = 0.0, rss_carry_ = 0.0;
  double y_mean_ = 0.0, y_m2_ = 0.0;  // Welford for the total sum of squares
  std::size_t n_ = 0;
  std::vector<double> scratch_;
};

/// Classical OLS with homoskedastic standard errors and two-sided t p-values.
RegressionFit ols_fit(const DesignMatrix& design, std::span<const double> response);

struct RatingRegressionOptions {
  /// Replace X_1 by the user's mean over their *other* ratings; users with a
  /// single rating are dropped. Sensitivity analysis only.
  bool leave_one_out = false;
};

/// stars_ij = a + b1 * z(user mean) + b2 * z(restaurant mean) over every
/// rating in the table, z-scores taken with the population moments.
RegressionFit rating_level_regression(const RatingTable& table, std::span<const UserStats> users,
                                      std::span<const BusinessStats> businesses,
                                      const PopulationMoments& moments,
                                      const RatingRegressionOptions& options = {});

struct ScatterPoint {
  std::string business_id;
  double restaurant_mean = 0.0;  // x
  double rater_mean = 0.0;       // y: average of raters' own means, one vote per user
};

struct RestaurantRegression {
  RegressionFit fit;
  std::vector<ScatterPoint> points;  // sorted by business_id
};

/// Regresses the average rater generosity of each restaurant on the
/// restaurant's mean, over restaurants with min_count <= n <= max_count.
RestaurantRegression restaurant_level_regression(const RatingTable& table,
                                                 std::span<const UserStats> users,
                                                 std::span<const BusinessStats> businesses,
                                                 std::uint64_t min_count = 200,
                                                 std::uint64_t max_count = 2000);

}  // namespace ratebias
