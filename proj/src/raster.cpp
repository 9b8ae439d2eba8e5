// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/raster.hpp"

#include <algorithm>
#include <cmath>

namespace wsf {

namespace {

bool close(double a, double b, double scale, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max(scale, 1e-300);
}

}  // namespace

bool GeoTransform::same_as(const GeoTransform& other, double rel_tol) const {
  // Origins are compared relative to the pixel size; a fraction of a pixel
  // apart is already a different lattice.
  return close(pixel_width, other.pixel_width, pixel_width, rel_tol) &&
         close(pixel_height, other.pixel_height, pixel_height, rel_tol) &&
         close(origin_lon, other.origin_lon, pixel_width, 1e-6) &&
         close(origin_lat, other.origin_lat, pixel_height, 1e-6);
}

void validate_grid(const Grid& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.is_nodata(i) && !std::isfinite(grid[i])) {
      throw ContractError("grid contains a non-finite sample that is not nodata");
    }
  }
}

std::size_t count_positive(const Mask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.values().begin(), mask.values().end(), [](std::uint8_t v) { return v != 0; }));
}

}  // namespace wsf
