#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratebias/ingest.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(RATEBIAS_FIXTURES) / name;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "ratebias-XXXXXX").string();
    if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Random ratings over `users` x `businesses` ids, each pair at most once.
inline std::vector<ratebias::RatingRecord> random_ratings(std::mt19937_64& rng, int users,
                                                          int businesses, double density) {
  std::vector<ratebias::RatingRecord> out;
  std::bernoulli_distribution take(density);
  std::uniform_int_distribution<int> star(1, 5);
  for (int u = 0; u < users; ++u) {
    for (int b = 0; b < businesses; ++b) {
      if (take(rng)) out.push_back({"u" + std::to_string(u), "b" + std::to_string(b), star(rng)});
    }
  }
  return out;
}

}  // namespace testing
