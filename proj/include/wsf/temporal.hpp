// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsf/raster.hpp"

namespace wsf {

/// Seconds since the Unix epoch (UTC).
using Timestamp = std::int64_t;

/// Parses "YYYY-MM-DD" or "YYYY-MM-DDTHH:MM:SS" (UTC). Throws FormatError.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

/// One co-registered observation. `validity` false excludes the pixel from
/// every temporal statistic; so does a nodata sample.
struct Observation {
  Grid values;
  Mask validity;
  Timestamp timestamp = 0;
};

/// Co-registered observations ordered by acquisition time.
class TemporalStack {
 public:
  TemporalStack() = default;
  /// Sorts by timestamp (stable) and checks co-registration.
  explicit TemporalStack(std::vector<Observation> scenes);

  bool empty() const { return scenes_.empty(); }
  std::size_t size() const { return scenes_.size(); }
  const Observation& operator[](std::size_t i) const { return scenes_[i]; }
  const std::vector<Observation>& scenes() const { return scenes_; }
  GridGeometry geometry() const;

 private:
  std::vector<Observation> scenes_;
};

/// Per-pixel temporal statistics; nodata wherever undefined.
struct TemporalStatistics {
  Grid max;
  Grid min;
  Grid mean;
  Grid std;         // sample standard deviation, needs count >= 2
  Grid mean_slope;  // mean |x[k+1] - x[k]| over the valid subsequence, needs count >= 2
  Grid count;       // number of valid observations (never nodata)
};

/// Statistics of one pixel's valid series, in timestamp order.
struct SeriesStatistics {
  int count = 0;
  double max = 0.0;
  double min = 0.0;
  double mean = 0.0;
  double std = 0.0;
  double mean_slope = 0.0;
};

/// Statistics over `series` (already restricted to valid samples).
SeriesStatistics series_statistics(std::span<const double> series);

/// Requires a non-empty stack.
TemporalStatistics temporal_statistics(const TemporalStack& stack);

/// Local coefficient of variation (sample std / mean) over an odd square
/// window, truncated at the raster border. Nodata where fewer than two valid
/// cells fall in the window or their mean is zero.
Grid cov_texture(const Grid& grid, int window);

/// Named bands on one lattice; the feature source of a classifier.
class FeatureStack {
 public:
  void add(std::string name, Grid band);

  std::size_t size() const { return bands_.size(); }
  bool empty() const { return bands_.empty(); }
  const Grid& band(std::size_t i) const { return bands_[i]; }
  const Grid& band(std::string_view name) const;
  bool has(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }
  GridGeometry geometry() const;

  /// Copies the feature vector of `pixel` into `out` (size() values). Returns
  /// false if any band is nodata there.
  bool pixel_vector(std::size_t pixel, std::span<double> out) const;

  /// Nearest-neighbour resampling of every band.
  FeatureStack resampled(const GridGeometry& target) const;

 private:
  std::vector<std::string> names_;
  std::vector<Grid> bands_;
};

}  // namespace wsf
