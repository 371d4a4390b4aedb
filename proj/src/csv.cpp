#include "ratebias/csv.hpp"

#include <algorithm>

#include "ratebias/error.hpp"

namespace ratebias::csv {

std::optional<std::vector<std::string>> split(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (true) {
    current.clear();
    if (i < n && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < n) {
        if (line[i] == '"') {
          if (i + 1 < n && line[i + 1] == '"') {
            current.push_back('"');
            i += 2;
          } else {
            ++i;
            closed = true;
            break;
          }
        } else {
          current.push_back(line[i++]);
        }
      }
      if (!closed) return std::nullopt;
      if (i < n && line[i] != ',') return std::nullopt;
    } else {
      const auto end = line.find(',', i);
      const auto stop = end == std::string_view::npos ? n : end;
      current.assign(line.substr(i, stop - i));
      i = stop;
    }
    fields.push_back(current);
    if (i >= n) break;
    ++i;  // comma
    if (i == n) {
      fields.emplace_back();
      break;
    }
  }
  return fields;
}

void write_field(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

Header::Header(std::vector<std::string> names) : names_(std::move(names)) {}

std::optional<std::size_t> Header::find(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t Header::require(std::string_view name) const {
  if (auto pos = find(name)) return *pos;
  throw ParseError("CSV header lacks column '" + std::string(name) + "'", 1);
}

}  // namespace ratebias::csv
