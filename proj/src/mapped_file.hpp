#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

namespace ratebias::detail {

/// Read-only memory map of a whole file. Empty files map to an empty view.
class MappedFile {
 public:
  explicit MappedFile(const std::filesystem::path& path);
  ~MappedFile();

  MappedFile(const MappedFile&) = delete;
  MappedFile& operator=(const MappedFile&) = delete;

  std::string_view view() const noexcept {
    return {static_cast<const char*>(data_), size_};
  }

 private:
  void* data_ = nullptr;
  std::size_t size_ = 0;
};

/// Cuts `text` into at most `shards` contiguous pieces, each ending just after
/// a '\n' (or at the end of text).
std::vector<std::string_view> split_at_lines(std::string_view text, unsigned shards);

}  // namespace ratebias::detail
