#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "driftbound/core.hpp"

namespace driftbound {

// n×d matrix of draws, one draw per row.
struct SampleSet {
  Matrix points;
  std::string label;
  std::uint64_t seed = 0;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }

  /// Throws InvalidArgument unless n ≥ 1 and every entry is finite.
  void validate() const;

  SampleSet rows(const std::vector<Eigen::Index>& idx, std::string new_label) const;
};

// CSV layout: header "index,x0,...,x{d-1}", one row per draw.
void write_csv(const SampleSet& s, const std::filesystem::path& path);
SampleSet read_sample_csv(const std::filesystem::path& path, std::string label = {});

}  // namespace driftbound
