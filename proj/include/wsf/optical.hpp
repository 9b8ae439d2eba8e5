// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wsf/temporal.hpp"

namespace wsf {

/// Landsat-8 OLI reflective bands used by the indices (bands 2..7).
enum class Band { kBlue, kGreen, kRed, kNir, kSwir1, kSwir2 };
inline constexpr std::size_t kBandCount = 6;

enum class SpectralIndex { kNdbi, kNdvi, kMndwi, kNdmir, kNdrb, kNdgb };
inline constexpr std::array<SpectralIndex, 6> kAllIndices = {
    SpectralIndex::kNdbi, SpectralIndex::kNdvi, SpectralIndex::kMndwi,
    SpectralIndex::kNdmir, SpectralIndex::kNdrb, SpectralIndex::kNdgb};

std::string_view index_name(SpectralIndex index);
/// Case-insensitive; throws ContractError for unknown names.
SpectralIndex parse_index(std::string_view name);
std::string_view band_name(Band band);

/// The two bands of a normalized difference (a - b) / (a + b).
struct IndexOperands {
  Band a;
  Band b;
};
IndexOperands index_operands(SpectralIndex index);

/// One optical acquisition. `validity` is the cloud/shadow/snow-free mask.
struct SpectralScene {
  std::array<Grid, kBandCount> bands;
  Mask validity;
  Timestamp timestamp = 0;
  double cloud_cover = 0.0;  // percent, from scene metadata

  const Grid& band(Band b) const { return bands[static_cast<std::size_t>(b)]; }
  void validate() const;
};

/// Normalized difference of `index`. Masked pixels, nodata bands and zero
/// denominators yield nodata.
Grid spectral_index(const SpectralScene& scene, SpectralIndex index);

enum class Statistic { kMax, kMin, kMean, kStd, kMeanSlope, kCov };
inline constexpr std::array<Statistic, 6> kAllStatistics = {
    Statistic::kMax, Statistic::kMin, Statistic::kMean,
    Statistic::kStd, Statistic::kMeanSlope, Statistic::kCov};
std::string_view statistic_name(Statistic stat);

/// Band name inside the optical stack, e.g. "NDVI_mean".
std::string optical_band_name(SpectralIndex index, Statistic stat);
inline constexpr std::string_view kOpticalCountBand = "N_LC8";
inline constexpr std::size_t kOpticalBandCount = 37;

struct OpticalStackOptions {
  int cov_window = 3;
  double max_cloud_cover = 60.0;  // scenes at or above are rejected
};

/// Builds the 37-band optical feature stack: for every index its temporal
/// max, min, mean, std, mean slope and the COV of the temporal mean, plus the
/// clear-observation count.
FeatureStack build_optical_stack(const std::vector<SpectralScene>& scenes,
                                 const OpticalStackOptions& options = {});

}  // namespace wsf
