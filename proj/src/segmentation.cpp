#include "ratebias/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "ratebias/error.hpp"

namespace ratebias {

std::string_view to_string(Segment s) {
  switch (s) {
    case Segment::ineligible: return "ineligible";
    case Segment::neutral: return "neutral";
    case Segment::deflating: return "deflating";
    case Segment::inflating: return "inflating";
  }
  return "?";
}

std::string_view to_string(PercentileConvention c) {
  return c == PercentileConvention::linear ? "linear-interpolation (type 7)"
                                           : "nearest-rank";
}

double percentile(std::span<const double> sorted, double pct, PercentileConvention convention) {
  if (sorted.empty()) throw InsufficientDataError("percentile of an empty set");
  if (!(pct >= 0.0 && pct <= 100.0)) throw ConfigError("percentile outside [0, 100]");
  const double p = pct / 100.0;
  const std::size_t n = sorted.size();
  if (convention == PercentileConvention::nearest_rank) {
    const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    return sorted[std::clamp<std::size_t>(rank, 1, n) - 1];
  }
  const double h = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SegmentAssignment segment_raters(std::span<const UserStats> users, const SegmentOptions& options) {
  if (options.lo_pct > options.hi_pct) throw ConfigError("lower percentile exceeds upper percentile");
  std::vector<double> means;
  for (const auto& u : users) {
    if (u.n >= options.min_ratings) means.push_back(u.mean);
  }
  if (means.empty()) {
    throw InsufficientDataError("no user has " + std::to_string(options.min_ratings) +
                                " or more ratings");
  }
  std::sort(means.begin(), means.end());

  SegmentAssignment a;
  a.options = options;
  a.eligible = means.size();
  a.lo_threshold = percentile(means, options.lo_pct, options.convention);
  a.hi_threshold = percentile(means, options.hi_pct, options.convention);
  if (means.front() == means.back()) {
    a.warnings.push_back("all eligible users share the same mean rating; both cohorts are empty");
  }

  a.labels.resize(users.size(), Segment::ineligible);
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (users[i].n < options.min_ratings) continue;
    const double m = users[i].mean;
    if (m < a.lo_threshold) {
      a.labels[i] = Segment::deflating;
      ++a.deflating;
    } else if (m > a.hi_threshold) {
      a.labels[i] = Segment::inflating;
      ++a.inflating;
    } else {
      a.labels[i] = Segment::neutral;
    }
  }
  return a;
}

CohortSummary cohort_summary(const SegmentAssignment& assignment,
                             std::span<const UserStats> users,
                             std::span<const BusinessStats> businesses,
                             const RatingTable& table) {
  if (assignment.labels.size() != users.size() || users.size() != table.user_count() ||
      businesses.size() != table.business_count()) {
    throw Error("cohort summary inputs describe different populations");
  }
  struct Acc {
    std::size_t members = 0, ratings = 0;
    std::uint64_t stars = 0;
    double restaurant_sum = 0.0, user_mean_sum = 0.0;
  };
  std::array<Acc, 2> acc{};  // deflating, inflating
  auto slot = [](Segment s) -> int {
    return s == Segment::deflating ? 0 : s == Segment::inflating ? 1 : -1;
  };
  for (std::size_t u = 0; u < users.size(); ++u) {
    if (const int k = slot(assignment.labels[u]); k >= 0) {
      ++acc[k].members;
      acc[k].user_mean_sum += users[u].mean;
    }
  }
  for (const auto& r : table.ratings()) {
    if (const int k = slot(assignment.labels[r.user]); k >= 0) {
      ++acc[k].ratings;
      acc[k].stars += r.stars;
      acc[k].restaurant_sum += businesses[r.business].mean;
    }
  }

  CohortSummary summary;
  auto finish = [&](const Acc& a, std::string_view name) -> std::optional<CohortFigures> {
    if (a.members == 0 || a.ratings == 0) {
      summary.warnings.push_back(std::string(name) + " cohort is empty");
      return std::nullopt;
    }
    CohortFigures f;
    f.members = a.members;
    f.ratings = a.ratings;
    f.mean_rating = static_cast<double>(a.stars) / static_cast<double>(a.ratings);
    f.mean_restaurant_rating = a.restaurant_sum / static_cast<double>(a.ratings);
    f.mean_of_user_means = a.user_mean_sum / static_cast<double>(a.members);
    return f;
  };
  summary.deflating = finish(acc[0], "deflating");
  summary.inflating = finish(acc[1], "inflating");
  return summary;
}

}  // namespace ratebias
