#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ratebias/ingest.hpp"

namespace ratebias {

using UserIdx = std::uint32_t;
using BusinessIdx = std::uint32_t;

/// A rating with both ids replaced by dense indices into a RatingTable.
struct Rating {
  UserIdx user;
  BusinessIdx business;
  std::uint8_t stars;
};

/// Columnar, id-interned form of a rating sequence. Indices are assigned in
/// lexicographic id order, so they do not depend on input order; ratings keep
/// input order.
class RatingTable {
 public:
  class Builder {
   public:
    void add(std::string_view user_id, std::string_view business_id, int stars);
    void add(const RatingRecord& r) { add(r.user_id, r.business_id, r.stars); }
    RatingTable build() &&;

   private:
    static std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& ids,
                                std::string_view key);

    std::unordered_map<std::string, std::uint32_t> users_;
    std::unordered_map<std::string, std::uint32_t> businesses_;
    std::vector<Rating> ratings_;
  };

  RatingTable() = default;

  static RatingTable from_records(std::span<const RatingRecord> records);

  /// Loads a generic review CSV (`user_id,business_id,stars`).
  static RatingTable load_csv(const std::filesystem::path& path, bool strict = false);

  std::span<const Rating> ratings() const noexcept { return ratings_; }
  std::size_t size() const noexcept { return ratings_.size(); }
  std::size_t user_count() const noexcept { return user_ids_.size(); }
  std::size_t business_count() const noexcept { return business_ids_.size(); }

  const std::string& user_id(UserIdx u) const { return user_ids_[u]; }
  const std::string& business_id(BusinessIdx b) const { return business_ids_[b]; }

  std::optional<UserIdx> find_user(std::string_view id) const;
  std::optional<BusinessIdx> find_business(std::string_view id) const;

  std::vector<RatingRecord> to_records() const;

  /// Lines skipped while loading (0 for tables built in memory).
  std::size_t skipped() const noexcept { return skipped_; }

 private:
  std::vector<std::string> user_ids_;
  std::vector<std::string> business_ids_;
  std::vector<Rating> ratings_;
  std::size_t skipped_ = 0;
};

}  // namespace ratebias
