#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "strata/data/frame.hpp"

namespace fixtures {

inline strata::Series make_series(std::string id, std::vector<double> values,
                                  std::int64_t start_ts = 0, std::int64_t step = 1) {
  strata::Series s;
  s.id = std::move(id);
  s.target = std::move(values);
  s.timestamps.reserve(s.target.size());
  for (std::size_t i = 0; i < s.target.size(); ++i) {
    s.timestamps.push_back(start_ts + static_cast<std::int64_t>(i) * step);
  }
  return s;
}

inline strata::LongFrame make_frame(std::vector<strata::Series> series,
                                    strata::FrequencySpec freq = strata::FrequencySpec::integer()) {
  return strata::LongFrame(freq, {}, std::move(series));
}

inline std::vector<double> iota_values(std::size_t n, double start = 1.0, double step = 1.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = start + step * static_cast<double>(i);
  return v;
}

/// Random walk with drift; strictly reproducible for a given seed.
inline std::vector<double> random_walk(std::uint64_t seed, std::size_t n, double start = 100.0,
                                       double drift = 0.0, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<double> v(n);
  double x = start;
  for (std::size_t i = 0; i < n; ++i) {
    x += drift + noise(rng);
    v[i] = x;
  }
  return v;
}

inline std::vector<double> ar1(double phi, double x0, std::size_t n) {
  std::vector<double> v(n);
  double x = x0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = x;
    x *= phi;
  }
  return v;
}

/// Scratch directory under the system temp root, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("strata_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return s;
}

}  // namespace fixtures
