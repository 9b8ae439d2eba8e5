// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "wsf/raster.hpp"

namespace wsf {

/// Sample encoding used when exporting a grid.
enum class Encoding {
  kBinaryMask,  // uint8 {0, 255}; input must be {0, 1}
  kPercent,     // uint8 0..100, rounded; nodata stored as 255
  kFloat,       // float64, exact
};

/// Reads a single-band raster. `.asc` files are parsed as ESRI ASCII grids;
/// anything else is opened as GeoTIFF.
Grid read_grid(const std::filesystem::path& path);

/// Writes `grid` with the requested encoding. GeoTIFF output uses deflate.
void write_grid(const Grid& grid, const std::filesystem::path& path, Encoding encoding);

/// Reads a raster and interprets non-zero, non-nodata samples as positive.
Mask read_mask(const std::filesystem::path& path);

/// Writes a {0,1} mask as {0,255}.
void write_mask(const Mask& mask, const std::filesystem::path& path);

Grid mask_to_grid(const Mask& mask);

/// Converts a {0,1} grid to a mask; any other value is a ContractError.
Mask grid_to_mask(const Grid& grid);

}  // namespace wsf
