// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsf/error.hpp"

namespace wsf {

/// Default sentinel for real-valued products computed by the library.
inline constexpr double kNodata = -9999.0;

/// Affine mapping from pixel indices to geographic coordinates (EPSG:4326).
/// Pixel (0, 0) is the upper-left pixel; rows grow southward.
struct GeoTransform {
  double origin_lon = 0.0;
  double origin_lat = 0.0;
  double pixel_width = 1.0;
  double pixel_height = 1.0;

  void validate() const {
    if (!(pixel_width > 0.0) || !(pixel_height > 0.0) || !std::isfinite(origin_lon) ||
        !std::isfinite(origin_lat)) {
      throw ContractError("GeoTransform requires positive pixel sizes and a finite origin");
    }
  }

  double center_lon(double col) const { return origin_lon + (col + 0.5) * pixel_width; }
  double center_lat(double row) const { return origin_lat - (row + 0.5) * pixel_height; }

  /// True when both transforms describe the same lattice (relative tolerance).
  bool same_as(const GeoTransform& other, double rel_tol = 1e-9) const;

  bool operator==(const GeoTransform&) const = default;
};

/// Width, height and transform of a raster, without samples.
struct GridGeometry {
  int width = 0;
  int height = 0;
  GeoTransform transform;

  std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool matches(const GridGeometry& other) const {
    return width == other.width && height == other.height && transform.same_as(other.transform);
  }
};

/// Single-band georeferenced raster. Samples are row-major.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;

  Raster(int width, int height, GeoTransform transform, T fill = T{},
         std::optional<T> nodata = std::nullopt)
      : width_(width), height_(height), transform_(transform), nodata_(nodata) {
    if (width <= 0 || height <= 0) {
      throw ContractError("raster dimensions must be positive");
    }
    transform_.validate();
    values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  Raster(const GridGeometry& geometry, T fill = T{}, std::optional<T> nodata = std::nullopt)
      : Raster(geometry.width, geometry.height, geometry.transform, fill, nodata) {}

  Raster(int width, int height, GeoTransform transform, std::vector<T> values,
         std::optional<T> nodata)
      : width_(width), height_(height), transform_(transform), nodata_(nodata),
        values_(std::move(values)) {
    if (width <= 0 || height <= 0) {
      throw ContractError("raster dimensions must be positive");
    }
    transform_.validate();
    if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw ContractError("raster sample count does not match width x height");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const GeoTransform& transform() const { return transform_; }
  GridGeometry geometry() const { return {width_, height_, transform_}; }
  const std::optional<T>& nodata() const { return nodata_; }
  void set_nodata(std::optional<T> nodata) { nodata_ = nodata; }

  bool contains(int col, int row) const {
    return col >= 0 && row >= 0 && col < width_ && row < height_;
  }
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  T& operator()(int col, int row) { return values_[index(col, row)]; }
  const T& operator()(int col, int row) const { return values_[index(col, row)]; }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  bool is_nodata_value(T v) const { return nodata_.has_value() && v == *nodata_; }
  bool is_nodata(std::size_t i) const { return is_nodata_value(values_[i]); }
  bool is_nodata(int col, int row) const { return is_nodata(index(col, row)); }
  bool valid(std::size_t i) const { return !is_nodata(i); }
  bool valid(int col, int row) const { return !is_nodata(col, row); }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  bool same_grid(const GridGeometry& g) const { return geometry().matches(g); }
  template <typename U>
  bool same_grid(const Raster<U>& other) const {
    return geometry().matches(other.geometry());
  }

 private:
  int width_ = 0;
  int height_ = 0;
  GeoTransform transform_;
  std::optional<T> nodata_;
  std::vector<T> values_;
};

/// Real-valued raster (reflectances, indices, dB, statistics, categorical codes).
using Grid = Raster<double>;
/// Binary map; 1 = settlement/positive, 0 = negative. 255 appears only in files.
using Mask = Raster<std::uint8_t>;
/// Integer component labels; 0 = background.
using LabelGrid = Raster<std::int32_t>;

/// Throws ContractError naming `what` unless the rasters share one lattice.
template <typename A, typename B>
void require_same_grid(const Raster<A>& a, const Raster<B>& b, const std::string& what) {
  if (!a.same_grid(b)) {
    throw ContractError(what + ": rasters are not co-registered");
  }
}

/// Checks the Grid invariant that every non-nodata sample is finite.
void validate_grid(const Grid& grid);

/// Counts positive cells of a mask.
std::size_t count_positive(const Mask& mask);

}  // namespace wsf
