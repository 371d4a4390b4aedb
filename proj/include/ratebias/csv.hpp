#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ratebias::csv {

/// Splits one CSV record (RFC 4180 quoting, no embedded newlines). Returns
/// nullopt when a quoted field is unterminated or followed by junk.
std::optional<std::vector<std::string>> split(std::string_view line);

/// Writes `field`, quoting it only when it contains a comma, quote or newline.
void write_field(std::ostream& out, std::string_view field);

/// Column positions of a header line, looked up by name.
class Header {
 public:
  explicit Header(std::vector<std::string> names);

  std::optional<std::size_t> find(std::string_view name) const;

  /// Like find() but throws ParseError naming the missing column.
  std::size_t require(std::string_view name) const;

  std::size_t size() const noexcept { return names_.size(); }

 private:
  std::vector<std::string> names_;
};

/// Drops a trailing '\r' left by CRLF files.
inline std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace ratebias::csv
