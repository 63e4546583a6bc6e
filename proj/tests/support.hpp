#pragma once

// Shared fixtures for the test suites: seeded random instances/heatmaps and
// throwaway files.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "heataco/heatmap.hpp"
#include "heataco/instance.hpp"
#include "heataco/rng.hpp"

namespace testsupport {

using namespace heataco;

inline TspInstance random_instance(int n, std::uint64_t seed) {
  Rng rng(seed ^ 0x5EEDF00Dull);
  TspInstance inst;
  inst.n = n;
  inst.mode = DistanceMode::EuclideanExact;
  inst.name = "random" + std::to_string(n) + "_" + std::to_string(seed);
  inst.coords.reserve(n);
  for (int i = 0; i < n; ++i) inst.coords.push_back({rng.uniform01(), rng.uniform01()});
  return inst;
}

inline Heatmap random_heatmap(int n, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Rng rng(seed ^ 0x48454154ull);
  Heatmap h(n, Heatmap::Storage::F64);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) h.set(i, j, lo + (hi - lo) * rng.uniform01());
  return h;
}

/// Writes content under a per-process temp dir; returns the path.
inline std::string write_temp_file(const std::string& name, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "heataco_tests";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path.string();
}

inline std::string temp_path(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "heataco_tests";
  fs::create_directories(dir);
  return (dir / name).string();
}

}  // namespace testsupport
