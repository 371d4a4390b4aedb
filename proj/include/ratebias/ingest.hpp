#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ratebias {

enum class Format { json_lines, csv };

/// Accepts "json", "jsonl" or "csv".
Format parse_format(std::string_view name);

/// One (user, business, stars) observation.
struct RatingRecord {
  std::string user_id;
  std::string business_id;
  int stars = 0;  // 1..5

  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

struct BusinessRecord {
  std::string business_id;
  std::uint64_t source_review_count = 0;
  double source_score = 0.0;  // half-star, 1.0..5.0
  bool is_restaurant = false;

  friend bool operator==(const BusinessRecord&, const BusinessRecord&) = default;
};

struct UserRecord {
  std::string user_id;
  std::uint64_t source_review_count = 0;
  double source_average = 0.0;

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

struct ParseOptions {
  Format format = Format::json_lines;
  /// Malformed lines become fatal ParseErrors instead of being skipped.
  bool strict = false;
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  std::size_t skipped = 0;
};

/// True iff a comma separated category list contains "Restaurants"
/// (trimmed, case-insensitive).
bool has_restaurant_tag(std::string_view categories);

// Stream parsers. CSV input must start with a header line; JSON-lines input is
// one object per line. Blank lines are ignored and never counted.
ParseResult<RatingRecord> parse_reviews(std::istream& in, const ParseOptions& options);
ParseResult<BusinessRecord> parse_businesses(std::istream& in, const ParseOptions& options);
ParseResult<UserRecord> parse_users(std::istream& in, const ParseOptions& options);

/// Callback form of parse_reviews for inputs too large to materialize.
/// Returns the number of skipped lines.
std::size_t for_each_review(std::istream& in, const ParseOptions& options,
                            const std::function<void(RatingRecord&&)>& sink);

/// Sharded file parsers. The file is memory mapped and split into `shards`
/// line-aligned ranges parsed concurrently; records come back in file order
/// and counts never depend on the shard layout.
ParseResult<RatingRecord> parse_reviews_file(const std::filesystem::path& path,
                                             const ParseOptions& options,
                                             unsigned shards = 0);
ParseResult<BusinessRecord> parse_businesses_file(const std::filesystem::path& path,
                                                  const ParseOptions& options,
                                                  unsigned shards = 0);
ParseResult<UserRecord> parse_users_file(const std::filesystem::path& path,
                                         const ParseOptions& options,
                                         unsigned shards = 0);

/// business_id -> is_restaurant
using BusinessIndex = std::unordered_map<std::string, bool>;

BusinessIndex index_businesses(std::span<const BusinessRecord> businesses);

struct FilterResult {
  std::vector<RatingRecord> records;
  std::size_t non_restaurant = 0;
  std::size_t unknown_business = 0;
};

/// Keeps reviews of restaurant businesses, order preserved. Reviews that
/// reference a business missing from `businesses` are dropped and counted,
/// or raise UnknownBusinessError when `strict`.
FilterResult filter_restaurant_reviews(std::span<const RatingRecord> reviews,
                                       std::span<const BusinessRecord> businesses,
                                       bool strict = false);

struct ReviewIngestCounts {
  std::size_t parsed = 0;
  std::size_t skipped = 0;
  std::size_t kept = 0;
  std::size_t non_restaurant = 0;
  std::size_t unknown_business = 0;
};

/// Streams a review file straight to the generic review CSV, keeping only
/// restaurant reviews. Used for multi-GB inputs where materializing every
/// RatingRecord would not fit in memory.
ReviewIngestCounts ingest_restaurant_reviews(const std::filesystem::path& path,
                                             const ParseOptions& options,
                                             const BusinessIndex& businesses,
                                             std::ostream& out,
                                             unsigned shards = 0);

// Generic CSV writers; their output parses back with Format::csv.
void write_reviews_csv(std::ostream& out, std::span<const RatingRecord> records);
void write_businesses_csv(std::ostream& out, std::span<const BusinessRecord> records);
void write_users_csv(std::ostream& out, std::span<const UserRecord> records);

inline constexpr std::string_view kReviewCsvHeader = "user_id,business_id,stars";
inline constexpr std::string_view kBusinessCsvHeader =
    "business_id,review_count,stars,categories";
inline constexpr std::string_view kUserCsvHeader = "user_id,review_count,average_stars";

}  // namespace ratebias
