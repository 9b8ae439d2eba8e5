// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "wsf/raster.hpp"

namespace wsf {

namespace detail {

/// Input pixel whose footprint contains the given output pixel center, or
/// false when it falls outside the input.
inline bool nearest_source(const GeoTransform& src, int src_w, int src_h, const GeoTransform& dst,
                           int col, int row, int& src_col, int& src_row) {
  const double lon = dst.center_lon(col);
  const double lat = dst.center_lat(row);
  const double fc = std::floor((lon - src.origin_lon) / src.pixel_width);
  const double fr = std::floor((src.origin_lat - lat) / src.pixel_height);
  if (fc < 0 || fr < 0 || fc >= src_w || fr >= src_h) {
    return false;
  }
  src_col = static_cast<int>(fc);
  src_row = static_cast<int>(fr);
  return true;
}

}  // namespace detail

/// Nearest-neighbour resampling onto `target`. Output pixels outside the input
/// footprint become nodata (the input's sentinel, or kNodata / 0 for masks).
/// Throws DomainError when no output pixel intersects the input.
template <typename T>
Raster<T> resample_nearest(const Raster<T>& grid, const GeoTransform& target, int target_width,
                           int target_height) {
  std::optional<T> nodata = grid.nodata();
  if (!nodata && std::is_floating_point_v<T>) {
    nodata = static_cast<T>(kNodata);
  }
  Raster<T> out(target_width, target_height, target, nodata.value_or(T{}), nodata);
  bool any = false;
  for (int row = 0; row < target_height; ++row) {
    for (int col = 0; col < target_width; ++col) {
      int sc = 0;
      int sr = 0;
      if (detail::nearest_source(grid.transform(), grid.width(), grid.height(), target, col, row,
                                 sc, sr)) {
        out(col, row) = grid(sc, sr);
        any = true;
      }
    }
  }
  if (!any) {
    throw DomainError("resample_nearest: target does not intersect the input grid");
  }
  return out;
}

template <typename T>
Raster<T> resample_nearest(const Raster<T>& grid, const GridGeometry& target) {
  return resample_nearest(grid, target.transform, target.width, target.height);
}

/// Percent of settlement cells per factor x factor block. Partial edge blocks
/// are padded; padded cells count as non-settlement so that
/// factor^2 * sum(percent) / 100 equals the settlement count of the input.
Grid downsample_percent(const Mask& mask, int factor);

}  // namespace wsf
