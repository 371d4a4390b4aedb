#include "ratebias/table.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "ratebias/error.hpp"

namespace ratebias {

namespace {

/// Sorts interned ids and returns (sorted ids, old index -> new index).
std::pair<std::vector<std::string>, std::vector<std::uint32_t>> canonicalize(
    std::unordered_map<std::string, std::uint32_t>&& ids) {
  std::vector<std::pair<std::string, std::uint32_t>> entries;
  entries.reserve(ids.size());
  for (auto& kv : ids) entries.emplace_back(kv.first, kv.second);
  ids.clear();
  std::sort(entries.begin(), entries.end());
  std::vector<std::string> sorted(entries.size());
  std::vector<std::uint32_t> remap(entries.size());
  for (std::uint32_t i = 0; i < entries.size(); ++i) {
    remap[entries[i].second] = i;
    sorted[i] = std::move(entries[i].first);
  }
  return {std::move(sorted), std::move(remap)};
}

template <typename Ids>
std::optional<std::uint32_t> lookup(const Ids& ids, std::string_view key) {
  const auto it = std::lower_bound(ids.begin(), ids.end(), key);
  if (it == ids.end() || *it != key) return std::nullopt;
  return static_cast<std::uint32_t>(it - ids.begin());
}

}  // namespace

std::uint32_t RatingTable::Builder::intern(std::unordered_map<std::string, std::uint32_t>& ids,
                                           std::string_view key) {
  const auto next = static_cast<std::uint32_t>(ids.size());
  const auto [it, inserted] = ids.try_emplace(std::string(key), next);
  return it->second;
}

void RatingTable::Builder::add(std::string_view user_id, std::string_view business_id,
                               int stars) {
  if (stars < 1 || stars > 5 || user_id.empty() || business_id.empty()) {
    throw Error("invalid rating record");
  }
  ratings_.push_back(Rating{intern(users_, user_id), intern(businesses_, business_id),
                            static_cast<std::uint8_t>(stars)});
}

RatingTable RatingTable::Builder::build() && {
  RatingTable table;
  auto [users, user_map] = canonicalize(std::move(users_));
  auto [businesses, business_map] = canonicalize(std::move(businesses_));
  for (auto& r : ratings_) {
    r.user = user_map[r.user];
    r.business = business_map[r.business];
  }
  table.user_ids_ = std::move(users);
  table.business_ids_ = std::move(businesses);
  table.ratings_ = std::move(ratings_);
  return table;
}

RatingTable RatingTable::from_records(std::span<const RatingRecord> records) {
  Builder builder;
  for (const auto& r : records) builder.add(r);
  return std::move(builder).build();
}

RatingTable RatingTable::load_csv(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Builder builder;
  const auto skipped = for_each_review(in, ParseOptions{Format::csv, strict},
                                       [&](RatingRecord&& r) { builder.add(r); });
  auto table = std::move(builder).build();
  table.skipped_ = skipped;
  return table;
}

std::optional<UserIdx> RatingTable::find_user(std::string_view id) const {
  return lookup(user_ids_, id);
}

std::optional<BusinessIdx> RatingTable::find_business(std::string_view id) const {
  return lookup(business_ids_, id);
}

std::vector<RatingRecord> RatingTable::to_records() const {
  std::vector<RatingRecord> out;
  out.reserve(ratings_.size());
  for (const auto& r : ratings_) {
    out.push_back(RatingRecord{user_ids_[r.user], business_ids_[r.business], r.stars});
  }
  return out;
}

}  // namespace ratebias
