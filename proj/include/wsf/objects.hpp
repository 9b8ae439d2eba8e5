// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wsf/raster.hpp"

namespace wsf {

enum class Connectivity { kFour = 4, kEight = 8 };

struct BoundingBox {
  int min_col = 0;
  int min_row = 0;
  int max_col = 0;
  int max_row = 0;
};

struct ObjectRecord {
  std::int32_t label = 0;
  std::size_t pixel_count = 0;
  BoundingBox bbox;
};

/// Connected foreground regions of a mask. `labels` holds 0 for background
/// and the object label elsewhere; `objects` is ordered by label.
struct ObjectSet {
  LabelGrid labels;
  std::vector<ObjectRecord> objects;

  std::size_t foreground_count() const;
  const ObjectRecord* find(std::int32_t label) const;
  /// Footprint of all objects as a {0,1} mask.
  Mask footprint() const;
};

/// Single-pass component labelling by contour tracing (Chang, Chen & Lu 2004)
/// for 8-connectivity. Labels are 1..n in raster-scan order of each region's
/// first pixel. 4-connectivity uses a two-pass union-find labelling with the
/// same numbering.
ObjectSet connected_components(const Mask& mask, Connectivity connectivity = Connectivity::kEight);

/// Per-object fraction of its pixels that are positive in `mask`.
std::vector<double> overlap_fractions(const ObjectSet& objects, const Mask& mask);

/// Per-object mean of the valid samples of `grid`; nullopt when none.
std::vector<std::optional<double>> zonal_means(const ObjectSet& objects, const Grid& grid);

}  // namespace wsf
