// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "wsf/pipeline.hpp"
#include "wsf/validation.hpp"

namespace wsf {

/// Land-cover classes of the generative model.
enum class Cover : std::uint8_t { kVegetation = 0, kSettlement = 1, kWater = 2, kBareSoil = 3 };

/// Mean reflectance per band (blue, green, red, NIR, SWIR1, SWIR2).
using Spectrum = std::array<double, 6>;

struct SyntheticScenario {
  std::string id = "synthetic";
  int width = 512;   // product (radar) grid
  int height = 512;
  int optical_factor = 3;  // optical pixel = factor x factor product pixels
  GeoTransform transform{10.0, 50.0, 0.32 / 3600.0, 0.32 / 3600.0};

  double settlement_fraction = 0.12;
  double water_fraction = 0.05;
  double bare_soil_fraction = 0.0;
  int min_radius = 5;
  int max_radius = 18;
  int soil_gap = 6;  // product pixels kept between soil and settlement

  int optical_scenes = 12;
  int radar_scenes_per_pass = 10;
  double cloud_fraction = 0.10;

  Spectrum settlement_spectrum{0.12, 0.13, 0.15, 0.22, 0.30, 0.26};
  Spectrum vegetation_spectrum{0.04, 0.08, 0.05, 0.40, 0.22, 0.11};
  Spectrum water_spectrum{0.08, 0.07, 0.05, 0.03, 0.02, 0.01};
  Spectrum soil_spectrum{0.14, 0.16, 0.19, 0.25, 0.33, 0.29};
  double reflectance_noise = 0.012;  // per scene and pixel
  double reflectance_texture = 0.008;  // static per pixel

  double settlement_db = -5.0;
  double background_db = -14.0;
  double water_db = -20.0;
  double soil_db = -14.0;
  double speckle_db = 1.5;   // per scene and pixel
  double texture_db = 0.5;   // static per pixel
  double suppressed_fraction = 0.0;  // settlement objects with weak radar return
  double suppressed_db = -9.5;

  int climate_class = 1;
  double dem_ramp_m = 0.0;  // elevation gain across the unit, west to east

  double reference_dropout = 0.1;  // objects missing from each agreement layer
  double reference_noise = 0.002;  // random pixel flips per reference layer

  std::uint64_t seed = 1;

  /// Both sensors separate the classes.
  static SyntheticScenario separated(std::uint64_t seed);
  /// Half the settlement objects return weak radar; optics still separate.
  static SyntheticScenario optical_only(std::uint64_t seed);
  /// Bare soil mimics settlement optically; radar still separates.
  static SyntheticScenario radar_only(std::uint64_t seed);

  /// Throws ContractError for infeasible parameters.
  void validate() const;
};

struct SyntheticUnit {
  UnitInputs inputs;
  Mask truth;
  Raster<std::uint8_t> cover;  // Cover codes on the product grid
};

SyntheticUnit generate_synthetic(const SyntheticScenario& scenario);

/// Writes rasters, manifests and unit.json under `dir`; returns the unit.
WorkingUnit write_synthetic_unit(const SyntheticUnit& unit, const std::filesystem::path& dir);

/// A complete assessment on generated tiles: `candidate_tiles` random tiles
/// are stratified down to `tiles`, each supplying n_per_class settlement and
/// non-settlement blocks with generated reference labels and a classification
/// that errs at the given rate.
struct SyntheticValidationOptions {
  int candidate_tiles = 100;
  int tiles = 50;
  std::size_t n_per_class = 1000;
  int tile_size = 160;
  double classification_error = 0.08;
  int workers = 1;
  std::uint64_t seed = 1;
};

struct SyntheticValidationResult {
  Stratification stratification;
  ValidationReport report;
};

SyntheticValidationResult run_synthetic_validation(const SyntheticValidationOptions& options);

}  // namespace wsf
