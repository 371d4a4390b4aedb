#include "ratebias/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "ratebias/csv.hpp"
#include "ratebias/error.hpp"

namespace ratebias::report {

namespace {

std::string fixed(double v, int decimals) {
  if (!std::isfinite(v)) return number(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::vector<double> half_star_bins() {
  std::vector<double> bins;
  for (int i = 2; i <= 10; ++i) bins.push_back(i / 2.0);
  return bins;
}

std::vector<double> star_bins() { return {1, 2, 3, 4, 5}; }

std::string range_label(const CountRange& r) {
  return "n_" + std::to_string(r.lo) + "_" + std::to_string(r.hi);
}

}  // namespace

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

Json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

void write_file(const std::filesystem::path& path,
                const std::function<void(std::ostream&)>& fill) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  fill(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_user_stats_csv(std::ostream& out, std::span<const UserStats> users) {
  out << "user_id,n,mean\n";
  for (const auto& u : users) {
    csv::write_field(out, u.user_id);
    out << ',' << u.n << ',' << number(u.mean) << '\n';
  }
}

void write_business_stats_csv(std::ostream& out, std::span<const BusinessStats> businesses) {
  out << "business_id,n,mean,yelp_score\n";
  for (const auto& b : businesses) {
    csv::write_field(out, b.business_id);
    out << ',' << b.n << ',' << number(b.mean) << ',' << number(b.yelp_score) << '\n';
  }
}

Json moments_json(const PopulationMoments& m, const DatasetSummary& s) {
  return Json{
      {"mu_u", json_number(m.mu_u)},
      {"sigma_u", json_number(m.sigma_u)},
      {"mu_r", json_number(m.mu_r)},
      {"sigma_r", json_number(m.sigma_r)},
      {"users", m.users},
      {"businesses", m.businesses},
      {"ratings", s.ratings},
      {"mean_rating_over_ratings", json_number(s.mean_over_ratings)},
      {"mean_rating_over_users", json_number(s.mean_over_users)},
      {"std_convention", "population (divisor N)"},
  };
}

void write_segments_csv(std::ostream& out, const SegmentAssignment& segments,
                        std::span<const UserStats> users) {
  out << "user_id,label,mean,n\n";
  for (std::size_t i = 0; i < users.size(); ++i) {
    csv::write_field(out, users[i].user_id);
    out << ',' << to_string(segments.labels[i]) << ',' << number(users[i].mean) << ','
        << users[i].n << '\n';
  }
}

Json thresholds_json(const SegmentAssignment& s) {
  return Json{
      {"lo", json_number(s.lo_threshold)},
      {"hi", json_number(s.hi_threshold)},
      {"min_ratings", s.options.min_ratings},
      {"lo_pct", s.options.lo_pct},
      {"hi_pct", s.options.hi_pct},
      {"convention", std::string(to_string(s.options.convention))},
      {"eligible", s.eligible},
      {"deflating", s.deflating},
      {"inflating", s.inflating},
      {"neutral", s.neutral()},
      {"warnings", s.warnings},
  };
}

Json cohort_summary_json(const CohortSummary& summary) {
  auto figures = [](const std::optional<CohortFigures>& f) -> Json {
    if (!f) return nullptr;
    return Json{
        {"members", f->members},
        {"ratings", f->ratings},
        {"mean_rating", json_number(f->mean_rating)},
        {"mean_restaurant_rating", json_number(f->mean_restaurant_rating)},
        {"mean_of_user_means", json_number(f->mean_of_user_means)},
    };
  };
  return Json{
      {"inflating", figures(summary.inflating)},
      {"deflating", figures(summary.deflating)},
      {"warnings", summary.warnings},
  };
}

Json regression_json(const RegressionFit& fit) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
    rows.push_back(Json{
        {"name", fit.names[i]},
        {"coefficient", json_number(fit.coefficients[i])},
        {"std_error", json_number(fit.std_errors[i])},
        {"t_value", json_number(fit.t_values[i])},
        {"p_value", json_number(fit.p_values[i])},
    });
  }
  return Json{
      {"coefficients", rows},
      {"r_squared", json_number(fit.r_squared)},
      {"adj_r_squared", json_number(fit.adj_r_squared)},
      {"f_value", json_number(fit.f_value)},
      {"f_p_value", json_number(fit.f_p_value)},
      {"df_residual", fit.df_residual},
      {"df_model", fit.df_model},
      {"n_obs", fit.n_obs},
      {"residual_ss", json_number(fit.residual_ss)},
      {"total_ss", json_number(fit.total_ss)},
  };
}

void write_regression_md(std::ostream& out, const RegressionFit& fit, std::string_view title) {
  out << "## " << title << "\n\n";
  out << "| | Coefficient | Stand. error | t-value | p-value |\n";
  out << "|---|---:|---:|---:|---:|\n";
  for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
    out << "| " << fit.names[i] << " | " << fixed(fit.coefficients[i], 4) << " | "
        << fixed(fit.std_errors[i], 3) << " | " << fixed(fit.t_values[i], 3) << " | "
        << fixed(fit.p_values[i], 3) << " |\n";
  }
  char fbuf[32];
  std::snprintf(fbuf, sizeof fbuf, "%.3e", fit.f_value);
  out << "\n| | |\n|---|---:|\n";
  out << "| R² | " << fixed(fit.r_squared, 3) << " |\n";
  out << "| Adj. R² | " << fixed(fit.adj_r_squared, 3) << " |\n";
  out << "| F-value | " << (std::isfinite(fit.f_value) ? fbuf : number(fit.f_value)) << " |\n";
  out << "| p-value | " << fixed(fit.f_p_value, 3) << " |\n";
  out << "| df residuals | " << fit.df_residual << " |\n";
  out << "| df model | " << fit.df_model << " |\n";
}

void write_figure3_csv(std::ostream& out, const RestaurantRegression& regression) {
  out << "business_id,x2,y\n";
  for (const auto& p : regression.points) {
    csv::write_field(out, p.business_id);
    out << ',' << number(p.restaurant_mean) << ',' << number(p.rater_mean) << '\n';
  }
}

void write_figure4_csv(std::ostream& out, std::span<const BootstrapResult> results) {
  out << "cohort,category,accuracy_mean,accuracy_se,R,seed\n";
  for (const auto& r : results) {
    for (const auto& c : r.categories) {
      out << to_string(r.cohort) << ',' << number(c.score) << ',' << number(c.mean) << ','
          << number(c.se) << ',' << r.replicates << ',' << r.seed << '\n';
    }
  }
}

void write_universe_csv(std::ostream& out, const Universe& universe) {
  out << "business_id,true_score,n_total,deflating_raters,inflating_raters\n";
  for (const auto& r : universe.restaurants) {
    csv::write_field(out, r.business_id);
    out << ',' << number(r.true_score) << ',' << r.total_ratings << ','
        << r.deflating_pool.size() << ',' << r.inflating_pool.size() << '\n';
  }
}

Json bootstrap_json(const BootstrapResult& result) {
  Json cats = Json::array();
  for (const auto& c : result.categories) {
    cats.push_back(Json{{"score", c.score},
                        {"restaurants", c.restaurants},
                        {"accuracy_mean", json_number(c.mean)},
                        {"accuracy_se", json_number(c.se)}});
  }
  return Json{{"cohort", std::string(to_string(result.cohort))},
              {"replicates", result.replicates},
              {"sample_size", result.sample_size},
              {"seed", result.seed},
              {"categories", cats}};
}

std::uint64_t HistogramSeries::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::vector<HistogramSeries> yelp_score_histogram(std::span<const BusinessStats> businesses,
                                                  std::span<const CountRange> strata) {
  std::vector<HistogramSeries> out;
  const auto bins = half_star_bins();
  for (const auto& range : strata) {
    HistogramSeries s{range_label(range), bins, std::vector<std::uint64_t>(bins.size(), 0)};
    for (const auto& b : businesses) {
      if (b.n < range.lo || b.n > range.hi) continue;
      ++s.counts[static_cast<std::size_t>(b.yelp_score * 2.0) - 2];
    }
    if (s.total() > 0) out.push_back(std::move(s));
  }
  return out;
}

std::vector<HistogramSeries> experience_star_histogram(const RatingTable& table,
                                                       std::span<const UserStats> users,
                                                       std::span<const CountRange> strata) {
  std::vector<HistogramSeries> out;
  for (const auto& range : strata) {
    HistogramSeries s{range_label(range), star_bins(), std::vector<std::uint64_t>(5, 0)};
    for (const auto& r : table.ratings()) {
      const auto n = users[r.user].n;
      if (n >= range.lo && n <= range.hi) ++s.counts[r.stars - 1];
    }
    if (s.total() > 0) out.push_back(std::move(s));
  }
  return out;
}

std::vector<HistogramSeries> segment_star_histogram(const RatingTable& table,
                                                    const SegmentAssignment& segments,
                                                    Segment segment) {
  HistogramSeries s{std::string(to_string(segment)), star_bins(),
                    std::vector<std::uint64_t>(5, 0)};
  for (const auto& r : table.ratings()) {
    if (segments.labels[r.user] == segment) ++s.counts[r.stars - 1];
  }
  if (s.total() == 0) return {};
  return {std::move(s)};
}

void write_histogram_csv(std::ostream& out, std::span<const HistogramSeries> series) {
  out << "stratum,bin,count\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.bins.size(); ++i) {
      out << s.stratum << ',' << number(s.bins[i]) << ',' << s.counts[i] << '\n';
    }
  }
}

std::vector<std::string> export_histograms(const std::filesystem::path& dir,
                                           const RatingTable& table,
                                           std::span<const UserStats> users,
                                           std::span<const BusinessStats> businesses,
                                           const SegmentAssignment& segments) {
  const std::array<CountRange, 2> restaurant_strata{{{10, 199}, {200, 2000}}};
  const std::array<CountRange, 2> rater_strata{{{0, 4}, {5, 2000}}};
  const std::vector<std::pair<std::string, std::vector<HistogramSeries>>> files{
      {"figure1_panel1.csv", yelp_score_histogram(businesses, restaurant_strata)},
      {"figure1_panel2.csv", experience_star_histogram(table, users, rater_strata)},
      {"figure2_panel1.csv", segment_star_histogram(table, segments, Segment::inflating)},
      {"figure2_panel2.csv", segment_star_histogram(table, segments, Segment::deflating)},
  };
  std::vector<std::string> names;
  for (const auto& [name, series] : files) {
    write_file(dir / name, [&](std::ostream& out) { write_histogram_csv(out, series); });
    names.push_back(name);
  }
  return names;
}

}  // namespace ratebias::report
