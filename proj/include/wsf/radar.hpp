// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wsf/temporal.hpp"

namespace wsf {

enum class Pass { kAscending, kDescending };
std::string_view pass_name(Pass pass);
Pass parse_pass(std::string_view text);

enum class BackscatterUnits { kLinear, kDecibel };

/// One VV acquisition.
struct RadarScene {
  Grid backscatter;
  BackscatterUnits units = BackscatterUnits::kDecibel;
  Pass pass = Pass::kAscending;
  Timestamp timestamp = 0;
  std::optional<Mask> validity;  // border-noise swaths
};

/// 10 * log10(linear). Zero becomes nodata; negative samples are a
/// ContractError.
Grid to_decibel(const Grid& linear);

/// Band names inside a radar stack, e.g. "S1A_mean" / "N_S1A".
std::string radar_band_name(Pass pass, std::string_view stat);
std::string radar_count_band(Pass pass);
inline constexpr std::size_t kRadarBandCount = 7;

struct RadarStackOptions {
  int cov_window = 5;
};

/// 7-band dB feature stack of one pass: temporal max, min, mean, std, mean
/// slope, COV of the mean, scene count. Scenes of the other pass are ignored.
/// Without any scene of `pass` the stack is all nodata with count 0.
FeatureStack build_radar_stack(const std::vector<RadarScene>& scenes, Pass pass,
                               const GridGeometry& geometry, const RadarStackOptions& options = {});

}  // namespace wsf
