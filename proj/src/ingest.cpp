#include "ratebias/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mapped_file.hpp"
#include "ratebias/csv.hpp"
#include "ratebias/error.hpp"
#include "ratebias/parallel.hpp"

namespace ratebias {

namespace {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON: pull a handful of top-level fields out of one object without building
// a DOM for the (large) rest of the line.

struct JsonValue {
  enum class Kind { absent, null, boolean, number, string, string_list, other };
  Kind kind = Kind::absent;
  double number = 0.0;
  bool integral = false;
  std::string text;
  std::vector<std::string> list;
};

template <std::size_t N>
class FieldGrabber final : public nlohmann::json_sax<json> {
 public:
  explicit FieldGrabber(const std::array<std::string_view, N>& keys) : keys_(keys) {}

  const JsonValue& operator[](std::size_t i) const { return values_[i]; }

  bool null() override { return scalar([](JsonValue& v) { v.kind = JsonValue::Kind::null; }); }
  bool boolean(bool) override {
    return scalar([](JsonValue& v) { v.kind = JsonValue::Kind::boolean; });
  }
  bool number_integer(number_integer_t val) override { return number(static_cast<double>(val), true); }
  bool number_unsigned(number_unsigned_t val) override { return number(static_cast<double>(val), true); }
  bool number_float(number_float_t val, const string_t&) override { return number(val, false); }
  bool binary(binary_t&) override { return scalar([](JsonValue& v) { v.kind = JsonValue::Kind::other; }); }

  bool string(string_t& val) override {
    if (depth_ == 2 && in_list_) {
      values_[current_].list.push_back(std::move(val));
      return true;
    }
    return scalar([&](JsonValue& v) {
      v.kind = JsonValue::Kind::string;
      v.text = std::move(val);
    });
  }

  bool start_object(std::size_t) override {
    if (depth_ == 0 && seen_root_) return false;
    seen_root_ = true;
    if (depth_ == 1) mark_other();
    if (depth_ == 2 && in_list_) values_[current_].kind = JsonValue::Kind::other;
    ++depth_;
    return true;
  }

  bool key(string_t& val) override {
    if (depth_ == 1) {
      current_ = -1;
      for (std::size_t i = 0; i < N; ++i) {
        if (keys_[i] == val) {
          current_ = static_cast<int>(i);
          values_[i] = JsonValue{};
          break;
        }
      }
    }
    return true;
  }

  bool end_object() override {
    --depth_;
    return true;
  }

  bool start_array(std::size_t) override {
    if (depth_ == 0) return false;
    if (depth_ == 1 && current_ >= 0) {
      values_[current_].kind = JsonValue::Kind::string_list;
      in_list_ = true;
    } else if (depth_ == 2 && in_list_) {
      values_[current_].kind = JsonValue::Kind::other;
    }
    ++depth_;
    return true;
  }

  bool end_array() override {
    --depth_;
    if (depth_ == 1) in_list_ = false;
    return true;
  }

  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
    return false;
  }

  bool complete() const noexcept { return seen_root_ && depth_ == 0; }

 private:
  template <typename Fn>
  bool scalar(Fn&& assign) {
    if (depth_ == 0) return false;  // top level must be an object
    if (depth_ == 1 && current_ >= 0) assign(values_[current_]);
    if (depth_ == 2 && in_list_) values_[current_].kind = JsonValue::Kind::other;
    return true;
  }

  bool number(double v, bool integral) {
    return scalar([&](JsonValue& slot) {
      slot.kind = JsonValue::Kind::number;
      slot.number = v;
      slot.integral = integral;
    });
  }

  void mark_other() {
    if (current_ >= 0) values_[current_].kind = JsonValue::Kind::other;
  }

  std::array<std::string_view, N> keys_;
  std::array<JsonValue, N> values_{};
  int depth_ = 0;
  int current_ = -1;
  bool in_list_ = false;
  bool seen_root_ = false;
};

template <std::size_t N>
std::optional<FieldGrabber<N>> grab(std::string_view line, const std::array<std::string_view, N>& keys) {
  FieldGrabber<N> grabber(keys);
  const bool ok = json::sax_parse(line.begin(), line.end(), &grabber,
                                  nlohmann::detail::input_format_t::json, true);
  if (!ok || !grabber.complete()) return std::nullopt;
  return grabber;
}

// ---------------------------------------------------------------------------
// Field validation shared by both formats.

std::optional<double> to_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::optional<int> to_stars(double v) {
  if (v < 1.0 || v > 5.0 || v != std::floor(v)) return std::nullopt;
  return static_cast<int>(v);
}

std::optional<std::uint64_t> to_count(double v) {
  if (v < 0.0 || v != std::floor(v) || v > 1e15) return std::nullopt;
  return static_cast<std::uint64_t>(v);
}

bool valid_half_star(double v) {
  return v >= 1.0 && v <= 5.0 && v * 2.0 == std::floor(v * 2.0);
}

bool valid_user_average(std::uint64_t count, double avg) {
  if (!std::isfinite(avg)) return false;
  return count == 0 || (avg >= 1.0 && avg <= 5.0);
}

std::optional<std::string> json_string(const JsonValue& v) {
  if (v.kind != JsonValue::Kind::string || v.text.empty()) return std::nullopt;
  return v.text;
}

std::optional<double> json_number(const JsonValue& v) {
  if (v.kind != JsonValue::Kind::number) return std::nullopt;
  return v.number;
}

bool equals_ignore_case(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

// ---------------------------------------------------------------------------
// Per-record decoders. Each is built once per stream (CSV needs the header)
// and then decodes single lines; nullopt means "malformed".

template <typename Record>
class Decoder;

template <>
class Decoder<RatingRecord> {
 public:
  Decoder(Format format, const csv::Header* header) : format_(format) {
    if (format_ == Format::csv) {
      user_ = header->require("user_id");
      business_ = header->require("business_id");
      stars_ = header->require("stars");
    }
  }

  std::optional<RatingRecord> operator()(std::string_view line) const {
    if (format_ == Format::json_lines) {
      static constexpr std::array<std::string_view, 3> keys{"user_id", "business_id", "stars"};
      const auto g = grab(line, keys);
      if (!g) return std::nullopt;
      auto user = json_string((*g)[0]);
      auto business = json_string((*g)[1]);
      auto stars_raw = json_number((*g)[2]);
      if (!user || !business || !stars_raw) return std::nullopt;
      const auto stars = to_stars(*stars_raw);
      if (!stars) return std::nullopt;
      return RatingRecord{std::move(*user), std::move(*business), *stars};
    }
    auto fields = csv::split(line);
    if (!fields || fields->size() <= std::max({user_, business_, stars_})) return std::nullopt;
    auto& f = *fields;
    if (f[user_].empty() || f[business_].empty()) return std::nullopt;
    const auto raw = to_double(f[stars_]);
    if (!raw) return std::nullopt;
    const auto stars = to_stars(*raw);
    if (!stars) return std::nullopt;
    return RatingRecord{std::move(f[user_]), std::move(f[business_]), *stars};
  }

 private:
  Format format_;
  std::size_t user_ = 0, business_ = 0, stars_ = 0;
};

template <>
class Decoder<BusinessRecord> {
 public:
  Decoder(Format format, const csv::Header* header) : format_(format) {
    if (format_ == Format::csv) {
      business_ = header->require("business_id");
      count_ = header->require("review_count");
      stars_ = header->require("stars");
      categories_ = header->require("categories");
    }
  }

  std::optional<BusinessRecord> operator()(std::string_view line) const {
    BusinessRecord rec;
    if (format_ == Format::json_lines) {
      static constexpr std::array<std::string_view, 4> keys{"business_id", "review_count",
                                                            "stars", "categories"};
      const auto g = grab(line, keys);
      if (!g) return std::nullopt;
      auto id = json_string((*g)[0]);
      auto count = json_number((*g)[1]);
      auto score = json_number((*g)[2]);
      if (!id || !count || !score) return std::nullopt;
      const auto n = to_count(*count);
      if (!n || !valid_half_star(*score)) return std::nullopt;
      const auto& cats = (*g)[3];
      bool restaurant = false;
      switch (cats.kind) {
        case JsonValue::Kind::string:
          restaurant = has_restaurant_tag(cats.text);
          break;
        case JsonValue::Kind::string_list:
          restaurant = std::any_of(cats.list.begin(), cats.list.end(),
                                   [](const std::string& c) { return has_restaurant_tag(c); });
          break;
        case JsonValue::Kind::null:
        case JsonValue::Kind::absent:
          break;
        default:
          return std::nullopt;
      }
      rec.business_id = std::move(*id);
      rec.source_review_count = *n;
      rec.source_score = *score;
      rec.is_restaurant = restaurant;
      return rec;
    }
    auto fields = csv::split(line);
    if (!fields || fields->size() <= std::max({business_, count_, stars_, categories_})) {
      return std::nullopt;
    }
    auto& f = *fields;
    if (f[business_].empty()) return std::nullopt;
    const auto count = to_double(f[count_]);
    const auto score = to_double(f[stars_]);
    if (!count || !score) return std::nullopt;
    const auto n = to_count(*count);
    if (!n || !valid_half_star(*score)) return std::nullopt;
    rec.business_id = std::move(f[business_]);
    rec.source_review_count = *n;
    rec.source_score = *score;
    rec.is_restaurant = has_restaurant_tag(f[categories_]);
    return rec;
  }

 private:
  Format format_;
  std::size_t business_ = 0, count_ = 0, stars_ = 0, categories_ = 0;
};

template <>
class Decoder<UserRecord> {
 public:
  Decoder(Format format, const csv::Header* header) : format_(format) {
    if (format_ == Format::csv) {
      user_ = header->require("user_id");
      count_ = header->require("review_count");
      average_ = header->require("average_stars");
    }
  }

  std::optional<UserRecord> operator()(std::string_view line) const {
    std::optional<std::string> id;
    std::optional<double> count, average;
    if (format_ == Format::json_lines) {
      static constexpr std::array<std::string_view, 3> keys{"user_id", "review_count",
                                                            "average_stars"};
      const auto g = grab(line, keys);
      if (!g) return std::nullopt;
      id = json_string((*g)[0]);
      count = json_number((*g)[1]);
      average = json_number((*g)[2]);
    } else {
      auto fields = csv::split(line);
      if (!fields || fields->size() <= std::max({user_, count_, average_})) return std::nullopt;
      auto& f = *fields;
      if (!f[user_].empty()) id = std::move(f[user_]);
      count = to_double(f[count_]);
      average = to_double(f[average_]);
    }
    if (!id || !count || !average) return std::nullopt;
    const auto n = to_count(*count);
    if (!n || !valid_user_average(*n, *average)) return std::nullopt;
    return UserRecord{std::move(*id), *n, *average};
  }

 private:
  Format format_;
  std::size_t user_ = 0, count_ = 0, average_ = 0;
};

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

/// Reads the CSV header from the front of `text`, advancing past it.
std::optional<csv::Header> take_header(std::string_view& text, std::size_t& lines_consumed) {
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = csv::chomp(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lines_consumed;
    if (blank(line)) continue;
    auto names = csv::split(line);
    if (!names) throw ParseError("unreadable CSV header", lines_consumed);
    for (auto& n : *names) n = std::string(trim(n));
    return csv::Header(std::move(*names));
  }
  return std::nullopt;
}

template <typename Record, typename Sink>
std::size_t scan_stream(std::istream& in, const ParseOptions& options, Sink&& sink) {
  if (!in) throw IoError("input stream is not readable");
  std::size_t skipped = 0;
  std::string line;
  std::size_t lineno = 0;
  std::optional<csv::Header> header;
  if (options.format == Format::csv) {
    while (std::getline(in, line)) {
      ++lineno;
      const auto view = csv::chomp(line);
      if (blank(view)) continue;
      auto names = csv::split(view);
      if (!names) throw ParseError("unreadable CSV header", lineno);
      for (auto& n : *names) n = std::string(trim(n));
      header.emplace(std::move(*names));
      break;
    }
    if (!header) {
      if (in.bad()) throw IoError("read failure");
      return skipped;
    }
  }
  const Decoder<Record> decode(options.format, header ? &*header : nullptr);
  while (std::getline(in, line)) {
    ++lineno;
    const auto view = csv::chomp(line);
    if (blank(view)) continue;
    if (auto rec = decode(view)) {
      sink(std::move(*rec));
    } else if (options.strict) {
      throw ParseError("malformed record", lineno);
    } else {
      ++skipped;
    }
  }
  if (in.bad()) throw IoError("read failure");
  return skipped;
}

template <typename Record>
ParseResult<Record> parse_stream(std::istream& in, const ParseOptions& options) {
  ParseResult<Record> result;
  result.skipped = scan_stream<Record>(
      in, options, [&](Record&& r) { result.records.push_back(std::move(r)); });
  return result;
}

template <typename State>
struct ShardOutcome {
  State state{};
  std::size_t skipped = 0;
  std::size_t lines = 0;
  std::optional<std::size_t> first_bad;  // shard-local line number
};

/// Parses a mapped file shard by shard; `consume(state, record)` runs on the
/// shard's own thread. Returns per-shard states in file order.
template <typename Record, typename State, typename Consume>
std::vector<ShardOutcome<State>> scan_file(const std::filesystem::path& path,
                                           const ParseOptions& options, unsigned shards,
                                           Consume consume) {
  const detail::MappedFile file(path);
  std::string_view text = file.view();
  std::size_t header_lines = 0;
  std::optional<csv::Header> header;
  if (options.format == Format::csv) {
    header = take_header(text, header_lines);
    if (!header) return {};
  }
  const Decoder<Record> decode(options.format, header ? &*header : nullptr);
  if (shards == 0) shards = default_workers();
  const auto pieces = detail::split_at_lines(text, shards);
  std::vector<ShardOutcome<State>> outcomes(pieces.size());

  parallel_for(pieces.size(), shards, [&](std::size_t s) {
    auto& out = outcomes[s];
    std::string_view rest = pieces[s];
    while (!rest.empty()) {
      const auto nl = rest.find('\n');
      const auto line = csv::chomp(rest.substr(0, nl));
      rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
      ++out.lines;
      if (blank(line)) continue;
      if (auto rec = decode(line)) {
        consume(out.state, std::move(*rec));
      } else {
        if (!out.first_bad) out.first_bad = out.lines;
        ++out.skipped;
        if (options.strict) return;
      }
    }
  });

  if (options.strict) {
    std::size_t offset = header_lines;
    for (const auto& o : outcomes) {
      if (o.first_bad) throw ParseError("malformed record", offset + *o.first_bad);
      offset += o.lines;
    }
  }
  return outcomes;
}

template <typename Record>
ParseResult<Record> parse_file(const std::filesystem::path& path, const ParseOptions& options,
                               unsigned shards) {
  auto outcomes = scan_file<Record, std::vector<Record>>(
      path, options, shards, [](std::vector<Record>& v, Record&& r) { v.push_back(std::move(r)); });
  ParseResult<Record> result;
  std::size_t total = 0;
  for (const auto& o : outcomes) total += o.state.size();
  result.records.reserve(total);
  for (auto& o : outcomes) {
    result.skipped += o.skipped;
    std::move(o.state.begin(), o.state.end(), std::back_inserter(result.records));
  }
  return result;
}

void write_number(std::ostream& out, double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.write(buf.data(), ptr - buf.data());
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "json" || name == "jsonl" || name == "json-lines") return Format::json_lines;
  if (name == "csv") return Format::csv;
  throw ConfigError("unknown input format '" + std::string(name) + "' (expected json or csv)");
}

bool has_restaurant_tag(std::string_view categories) {
  while (true) {
    const auto comma = categories.find(',');
    if (equals_ignore_case(trim(categories.substr(0, comma)), "restaurants")) return true;
    if (comma == std::string_view::npos) return false;
    categories.remove_prefix(comma + 1);
  }
}

ParseResult<RatingRecord> parse_reviews(std::istream& in, const ParseOptions& options) {
  return parse_stream<RatingRecord>(in, options);
}

std::size_t for_each_review(std::istream& in, const ParseOptions& options,
                            const std::function<void(RatingRecord&&)>& sink) {
  return scan_stream<RatingRecord>(in, options, sink);
}

ParseResult<BusinessRecord> parse_businesses(std::istream& in, const ParseOptions& options) {
  return parse_stream<BusinessRecord>(in, options);
}

ParseResult<UserRecord> parse_users(std::istream& in, const ParseOptions& options) {
  return parse_stream<UserRecord>(in, options);
}

ParseResult<RatingRecord> parse_reviews_file(const std::filesystem::path& path,
                                             const ParseOptions& options, unsigned shards) {
  return parse_file<RatingRecord>(path, options, shards);
}

ParseResult<BusinessRecord> parse_businesses_file(const std::filesystem::path& path,
                                                  const ParseOptions& options, unsigned shards) {
  return parse_file<BusinessRecord>(path, options, shards);
}

ParseResult<UserRecord> parse_users_file(const std::filesystem::path& path,
                                         const ParseOptions& options, unsigned shards) {
  return parse_file<UserRecord>(path, options, shards);
}

BusinessIndex index_businesses(std::span<const BusinessRecord> businesses) {
  BusinessIndex index;
  index.reserve(businesses.size());
  for (const auto& b : businesses) index[b.business_id] = b.is_restaurant;
  return index;
}

FilterResult filter_restaurant_reviews(std::span<const RatingRecord> reviews,
                                       std::span<const BusinessRecord> businesses, bool strict) {
  const auto index = index_businesses(businesses);
  FilterResult result;
  for (const auto& r : reviews) {
    const auto it = index.find(r.business_id);
    if (it == index.end()) {
      if (strict) throw UnknownBusinessError("review references unknown business " + r.business_id);
      ++result.unknown_business;
    } else if (it->second) {
      result.records.push_back(r);
    } else {
      ++result.non_restaurant;
    }
  }
  return result;
}

ReviewIngestCounts ingest_restaurant_reviews(const std::filesystem::path& path,
                                             const ParseOptions& options,
                                             const BusinessIndex& businesses, std::ostream& out,
                                             unsigned shards) {
  struct Chunk {
    std::string text;
    std::size_t parsed = 0, kept = 0, non_restaurant = 0, unknown = 0;
    std::string first_unknown;
  };
  auto outcomes = scan_file<RatingRecord, Chunk>(
      path, options, shards, [&](Chunk& c, RatingRecord&& r) {
        ++c.parsed;
        const auto it = businesses.find(r.business_id);
        if (it == businesses.end()) {
          if (c.unknown++ == 0) c.first_unknown = r.business_id;
          return;
        }
        if (!it->second) {
          ++c.non_restaurant;
          return;
        }
        ++c.kept;
        std::ostringstream line;
        csv::write_field(line, r.user_id);
        line << ',';
        csv::write_field(line, r.business_id);
        line << ',' << r.stars << '\n';
        c.text += line.str();
      });

  ReviewIngestCounts counts;
  out << kReviewCsvHeader << '\n';
  for (const auto& o : outcomes) {
    if (options.strict && o.state.unknown > 0) {
      throw UnknownBusinessError("review references unknown business " + o.state.first_unknown);
    }
    counts.parsed += o.state.parsed;
    counts.skipped += o.skipped;
    counts.kept += o.state.kept;
    counts.non_restaurant += o.state.non_restaurant;
    counts.unknown_business += o.state.unknown;
    out << o.state.text;
  }
  if (!out) throw IoError("failed writing review output");
  return counts;
}

void write_reviews_csv(std::ostream& out, std::span<const RatingRecord> records) {
  out << kReviewCsvHeader << '\n';
  for (const auto& r : records) {
    csv::write_field(out, r.user_id);
    out << ',';
    csv::write_field(out, r.business_id);
    out << ',' << r.stars << '\n';
  }
}

void write_businesses_csv(std::ostream& out, std::span<const BusinessRecord> records) {
  out << kBusinessCsvHeader << '\n';
  for (const auto& b : records) {
    csv::write_field(out, b.business_id);
    out << ',' << b.source_review_count << ',';
    write_number(out, b.source_score);
    out << ',' << (b.is_restaurant ? "Restaurants" : "") << '\n';
  }
}

void write_users_csv(std::ostream& out, std::span<const UserRecord> records) {
  out << kUserCsvHeader << '\n';
  for (const auto& u : records) {
    csv::write_field(out, u.user_id);
    out << ',' << u.source_review_count << ',';
    write_number(out, u.source_average);
    out << '\n';
  }
}

}  // namespace ratebias
