// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/radar.hpp"

#include <cmath>

namespace wsf {

std::string_view pass_name(Pass pass) {
  return pass == Pass::kAscending ? "ascending" : "descending";
}

Pass parse_pass(std::string_view text) {
  if (text == "ascending" || text == "asc" || text == "A") {
    return Pass::kAscending;
  }
  if (text == "descending" || text == "desc" || text == "D") {
    return Pass::kDescending;
  }
  throw FormatError("unknown orbit pass '" + std::string(text) + "'");
}

Grid to_decibel(const Grid& linear) {
  Grid out(linear.geometry(), kNodata, kNodata);
  for (std::size_t i = 0; i < linear.size(); ++i) {
    if (linear.is_nodata(i)) {
      continue;
    }
    const double v = linear[i];
    if (v < 0.0) {
      throw ContractError("to_decibel: negative linear backscatter");
    }
    if (v > 0.0) {
      out[i] = 10.0 * std::log10(v);
    }
  }
  return out;
}

std::string radar_band_name(Pass pass, std::string_view stat) {
  return std::string(pass == Pass::kAscending ? "S1A_" : "S1D_") + std::string(stat);
}

std::string radar_count_band(Pass pass) {
  return pass == Pass::kAscending ? "N_S1A" : "N_S1D";
}

FeatureStack build_radar_stack(const std::vector<RadarScene>& scenes, Pass pass,
                               const GridGeometry& geometry, const RadarStackOptions& options) {
  std::vector<Observation> obs;
  for (const RadarScene& s : scenes) {
    if (s.pass != pass) {
      continue;
    }
    if (!s.backscatter.same_grid(geometry)) {
      throw ContractError("radar scene " + format_timestamp(s.timestamp) +
                          " is not on the stack grid");
    }
    Grid db = s.units == BackscatterUnits::kLinear ? to_decibel(s.backscatter) : s.backscatter;
    Mask validity = s.validity ? *s.validity : Mask(geometry, 1);
    require_same_grid(validity, db, "radar validity");
    obs.push_back({std::move(db), std::move(validity), s.timestamp});
  }

  FeatureStack stack;
  if (obs.empty()) {
    for (const char* stat : {"max", "min", "mean", "std", "mean_slope", "cov"}) {
      stack.add(radar_band_name(pass, stat), Grid(geometry, kNodata, kNodata));
    }
    stack.add(radar_count_band(pass), Grid(geometry, 0.0, kNodata));
    return stack;
  }
  TemporalStatistics st = temporal_statistics(TemporalStack(std::move(obs)));
  Grid cov = cov_texture(st.mean, options.cov_window);
  stack.add(radar_band_name(pass, "max"), std::move(st.max));
  stack.add(radar_band_name(pass, "min"), std::move(st.min));
  stack.add(radar_band_name(pass, "mean"), std::move(st.mean));
  stack.add(radar_band_name(pass, "std"), std::move(st.std));
  stack.add(radar_band_name(pass, "mean_slope"), std::move(st.mean_slope));
  stack.add(radar_band_name(pass, "cov"), std::move(cov));
  stack.add(radar_count_band(pass), std::move(st.count));
  return stack;
}

}  // namespace wsf
