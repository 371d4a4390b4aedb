#include "ratebias/regression.hpp"

#include <algorithm>
#include <array>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

#include "ratebias/error.hpp"

namespace ratebias {

namespace {

constexpr double kRankTolerance = 1e-10;

double two_sided_t_p(double t, std::size_t df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(static_cast<double>(df));
  return 2.0 * boost::math::cdf(dist, -std::fabs(t));
}

double f_upper_p(double f, std::size_t df1, std::size_t df2) {
  if (std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(f)) return 0.0;
  const boost::math::fisher_f dist(static_cast<double>(df1), static_cast<double>(df2));
  return boost::math::cdf(boost::math::complement(dist, f));
}

}  // namespace

OlsAccumulator::OlsAccumulator(std::vector<std::string> names)
    : names_(std::move(names)),
      k_(names_.size()),
      r_(k_ * k_, 0.0),
      qty_(k_, 0.0),
      column_ss_(k_, 0.0),
      scratch_(k_, 0.0) {
  if (k_ == 0) throw Error("regression needs at least one column");
}

void OlsAccumulator::add(std::span<const double> row, double y) {
  if (row.size() != k_) throw Error("row width does not match the design");
  ++n_;
  const double delta = y - y_mean_;
  y_mean_ += delta / static_cast<double>(n_);
  y_m2_ += delta * (y - y_mean_);

  auto& x = scratch_;
  std::copy(row.begin(), row.end(), x.begin());
  for (std::size_t j = 0; j < k_; ++j) column_ss_[j] += x[j] * x[j];

  for (std::size_t j = 0; j < k_; ++j) {
    if (x[j] == 0.0) continue;
    double& diag = r_[j * k_ + j];
    const double rho = std::hypot(diag, x[j]);
    const double c = diag / rho;
    const double s = x[j] / rho;
    diag = rho;
    for (std::size_t l = j + 1; l < k_; ++l) {
      double& rl = r_[j * k_ + l];
      const double a = rl, b = x[l];
      rl = c * a + s * b;
      x[l] = -s * a + c * b;
    }
    const double qa = qty_[j];
    qty_[j] = c * qa + s * y;
    y = -s * qa + c * y;
  }
  // What is left of y is orthogonal to every column seen so far.
  const double sq = y * y;
  const double t = rss_ + sq;
  rss_carry_ += (rss_ >= sq) ? (rss_ - t) + sq : (sq - t) + rss_;
  rss_ = t;
}

RegressionFit OlsAccumulator::fit(bool allow_saturated) const {
  if (n_ < k_ || (n_ == k_ && !allow_saturated)) {
    throw InsufficientDataError("regression needs more rows (" + std::to_string(n_) +
                                ") than columns (" + std::to_string(k_) + ")");
  }
  for (std::size_t j = 0; j < k_; ++j) {
    const double scale = std::sqrt(column_ss_[j]);
    if (scale == 0.0 || std::fabs(r_[j * k_ + j]) <= kRankTolerance * scale) {
      throw SingularDesignError(names_[j]);
    }
  }

  // R^-1, upper triangular, column by column.
  std::vector<double> rinv(k_ * k_, 0.0);
  for (std::size_t c = 0; c < k_; ++c) {
    rinv[c * k_ + c] = 1.0 / r_[c * k_ + c];
    for (std::size_t i = c; i-- > 0;) {
      double sum = 0.0;
      for (std::size_t l = i + 1; l <= c; ++l) sum += r_[i * k_ + l] * rinv[l * k_ + c];
      rinv[i * k_ + c] = -sum / r_[i * k_ + i];
    }
  }

  RegressionFit f;
  f.names = names_;
  f.n_obs = n_;
  f.df_model = k_ - 1;
  f.df_residual = n_ - k_;
  f.coefficients.assign(k_, 0.0);
  for (std::size_t i = k_; i-- > 0;) {
    double sum = qty_[i];
    for (std::size_t l = i + 1; l < k_; ++l) sum -= r_[i * k_ + l] * f.coefficients[l];
    f.coefficients[i] = sum / r_[i * k_ + i];
  }

  f.residual_ss = rss_ + rss_carry_;
  f.total_ss = y_m2_;
  if (f.total_ss > 0.0) {
    f.r_squared = std::clamp(1.0 - f.residual_ss / f.total_ss, 0.0, 1.0);
  }
  const double n = static_cast<double>(n_);
  const double dfr = static_cast<double>(f.df_residual);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  f.adj_r_squared = f.df_residual > 0 ? 1.0 - (1.0 - f.r_squared) * (n - 1.0) / dfr : nan;

  const double sigma2 = f.df_residual > 0 ? f.residual_ss / dfr : nan;
  f.std_errors.resize(k_);
  f.t_values.resize(k_);
  f.p_values.resize(k_);
  for (std::size_t j = 0; j < k_; ++j) {
    double var = 0.0;
    for (std::size_t l = j; l < k_; ++l) var += rinv[j * k_ + l] * rinv[j * k_ + l];
    f.std_errors[j] = std::sqrt(sigma2 * var);
    const double b = f.coefficients[j];
    if (std::isnan(f.std_errors[j])) {
      f.t_values[j] = nan;
    } else if (f.std_errors[j] > 0.0) {
      f.t_values[j] = b / f.std_errors[j];
    } else {
      f.t_values[j] = b == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                               : std::copysign(std::numeric_limits<double>::infinity(), b);
    }
    f.p_values[j] = two_sided_t_p(f.t_values[j], f.df_residual);
  }

  if (f.df_model == 0 || f.df_residual == 0) {
    f.f_value = nan;
    f.f_p_value = nan;
  } else {
    const double model_ss = std::max(0.0, f.total_ss - f.residual_ss);
    const double num = model_ss / static_cast<double>(f.df_model);
    if (f.residual_ss > 0.0) {
      f.f_value = num / sigma2;
    } else {
      f.f_value = num > 0.0 ? std::numeric_limits<double>::infinity()
                            : std::numeric_limits<double>::quiet_NaN();
    }
    f.f_p_value = f_upper_p(f.f_value, f.df_model, f.df_residual);
  }
  return f;
}

RegressionFit ols_fit(const DesignMatrix& design, std::span<const double> response) {
  if (design.cols() == 0 || design.values.size() % design.cols() != 0) {
    throw Error("malformed design matrix");
  }
  if (design.rows() != response.size()) {
    throw Error("design has " + std::to_string(design.rows()) + " rows but response has " +
                std::to_string(response.size()));
  }
  OlsAccumulator acc(design.names);
  for (std::size_t i = 0; i < design.rows(); ++i) acc.add(design.row(i), response[i]);
  return acc.fit();
}

RegressionFit rating_level_regression(const RatingTable& table, std::span<const UserStats> users,
                                      std::span<const BusinessStats> businesses,
                                      const PopulationMoments& moments,
                                      const RatingRegressionOptions& options) {
  if (users.size() != table.user_count() || businesses.size() != table.business_count()) {
    throw Error("statistics do not match the rating table");
  }
  // Validates both sigmas up front.
  normalize(0.0, moments.mu_u, moments.sigma_u);
  normalize(0.0, moments.mu_r, moments.sigma_r);

  std::vector<double> user_z(users.size());
  for (std::size_t u = 0; u < users.size(); ++u) {
    user_z[u] = (users[u].mean - moments.mu_u) / moments.sigma_u;
  }
  std::vector<double> business_z(businesses.size());
  for (std::size_t b = 0; b < businesses.size(); ++b) {
    business_z[b] = (businesses[b].mean - moments.mu_r) / moments.sigma_r;
  }

  OlsAccumulator acc({"Intercept", "Average normalized user rating",
                      "Average normalized restaurant rating"});
  std::array<double, 3> row{1.0, 0.0, 0.0};
  for (const auto& r : table.ratings()) {
    const double y = r.stars;
    if (options.leave_one_out) {
      const auto& u = users[r.user];
      if (u.n < 2) continue;
      const double others = (u.mean * static_cast<double>(u.n) - y) / static_cast<double>(u.n - 1);
      row[1] = (others - moments.mu_u) / moments.sigma_u;
    } else {
      row[1] = user_z[r.user];
    }
    row[2] = business_z[r.business];
    acc.add(row, y);
  }
  return acc.fit();
}

RestaurantRegression restaurant_level_regression(const RatingTable& table,
                                                 std::span<const UserStats> users,
                                                 std::span<const BusinessStats> businesses,
                                                 std::uint64_t min_count,
                                                 std::uint64_t max_count) {
  if (users.size() != table.user_count() || businesses.size() != table.business_count()) {
    throw Error("statistics do not match the rating table");
  }
  std::vector<std::pair<BusinessIdx, UserIdx>> pairs;
  for (const auto& r : table.ratings()) {
    const auto n = businesses[r.business].n;
    if (n >= min_count && n <= max_count) pairs.emplace_back(r.business, r.user);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  RestaurantRegression out;
  for (std::size_t i = 0; i < pairs.size();) {
    const auto b = pairs[i].first;
    double sum = 0.0;
    std::size_t raters = 0;
    for (; i < pairs.size() && pairs[i].first == b; ++i) {
      sum += users[pairs[i].second].mean;
      ++raters;
    }
    out.points.push_back(ScatterPoint{businesses[b].business_id, businesses[b].mean,
                                      sum / static_cast<double>(raters)});
  }
  if (out.points.size() < 2) {
    throw InsufficientDataError("restaurant-level regression needs at least 2 restaurants with " +
                                std::to_string(min_count) + ".." + std::to_string(max_count) +
                                " ratings (found " + std::to_string(out.points.size()) + ")");
  }
  OlsAccumulator acc({"Intercept", "Average restaurant rating"});
  for (const auto& p : out.points) {
    const std::array<double, 2> row{1.0, p.restaurant_mean};
    acc.add(row, p.rater_mean);
  }
  out.fit = acc.fit(/*allow_saturated=*/true);
  return out;
}

}  // namespace ratebias
