// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "wsf/optical.hpp"
#include "wsf/radar.hpp"
#include "wsf/training.hpp"

namespace fixture {

inline wsf::GeoTransform unit_transform() { return {0.0, 0.0, 1.0, 1.0}; }

inline wsf::Grid grid(int w, int h, std::vector<double> values,
                      std::optional<double> nodata = wsf::kNodata) {
  return wsf::Grid(w, h, unit_transform(), std::move(values), nodata);
}

inline wsf::Mask mask(int w, int h, std::vector<std::uint8_t> values) {
  return wsf::Mask(w, h, unit_transform(), std::move(values), std::nullopt);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("wsf_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Feature stacks carrying exactly the bands the candidate rules read,
/// one pixel per evidence record on a 1-row grid.
struct CandidateInputs {
  wsf::FeatureStack optical;
  wsf::FeatureStack radar_a;
  wsf::FeatureStack radar_d;
  wsf::Grid climate;
  wsf::Grid slope;
};

inline CandidateInputs candidate_inputs(const std::vector<oracle::Pixel>& px, int climate_class = 1) {
  const int w = static_cast<int>(px.size());
  std::vector<double> ndbi, ndvi, mndwi, n_lc8, a_mean, a_n, d_mean, d_n, slope;
  for (const oracle::Pixel& p : px) {
    ndbi.push_back(p.ndbi);
    ndvi.push_back(p.ndvi);
    mndwi.push_back(p.mndwi);
    n_lc8.push_back(p.n_lc8);
    a_mean.push_back(p.s1_a);
    a_n.push_back(p.n_a);
    d_mean.push_back(p.s1_d);
    d_n.push_back(p.n_d);
    slope.push_back(p.slope);
  }
  CandidateInputs in;
  using wsf::SpectralIndex;
  using wsf::Statistic;
  in.optical.add(wsf::optical_band_name(SpectralIndex::kNdbi, Statistic::kMean), grid(w, 1, ndbi));
  in.optical.add(wsf::optical_band_name(SpectralIndex::kNdvi, Statistic::kMean), grid(w, 1, ndvi));
  in.optical.add(wsf::optical_band_name(SpectralIndex::kMndwi, Statistic::kMean), grid(w, 1, mndwi));
  in.optical.add(std::string(wsf::kOpticalCountBand), grid(w, 1, n_lc8));
  in.radar_a.add(wsf::radar_band_name(wsf::Pass::kAscending, "mean"), grid(w, 1, a_mean));
  in.radar_a.add(wsf::radar_count_band(wsf::Pass::kAscending), grid(w, 1, a_n));
  in.radar_d.add(wsf::radar_band_name(wsf::Pass::kDescending, "mean"), grid(w, 1, d_mean));
  in.radar_d.add(wsf::radar_count_band(wsf::Pass::kDescending), grid(w, 1, d_n));
  in.climate = grid(w, 1, std::vector<double>(px.size(), climate_class));
  in.slope = grid(w, 1, slope);
  return in;
}

/// Thresholds of the demonstration table, as oracle bands.
inline void oracle_bands(const wsf::ThresholdTable& t, int kg, oracle::Band out[3]) {
  for (std::size_t k = 0; k < 3; ++k) {
    const wsf::ThresholdBand& b = t.get(kg, wsf::kThresholdIndices[k]);
    out[k] = {b.s_min, b.s_max, b.ns_min, b.ns_max};
  }
}

/// Every combination of: each index inside the settlement band, between the
/// bands, or outside the non-settlement band; N_LC8 of 5 or 6; per pass a
/// count of 4 or 5 and a mean of -6, -9 or -12 dB; slope 9.9 or 10.
inline std::vector<oracle::Pixel> enumerate_cases(const oracle::Band b[3]) {
  std::vector<double> levels[3];
  for (int k = 0; k < 3; ++k) {
    levels[k] = {(b[k].s_min + b[k].s_max) / 2.0,                   // inside settlement band
                 b[k].s_max + (b[k].ns_max - b[k].s_max) / 2.0,    // between the bands
                 b[k].ns_max + 0.05};                              // outside non-settlement band
  }
  std::vector<oracle::Pixel> out;
  for (double x0 : levels[0])
    for (double x1 : levels[1])
      for (double x2 : levels[2])
        for (int n_lc8 : {5, 6})
          for (int n_a : {4, 5})
            for (double s_a : {-6.0, -9.0, -12.0})
              for (int n_d : {4, 5})
                for (double s_d : {-6.0, -9.0, -12.0})
                  for (double slope : {9.9, 10.0}) {
                    out.push_back({x0, x1, x2, n_lc8, n_a, s_a, n_d, s_d, slope});
                  }
  return out;
}

}  // namespace fixture

namespace fixture {

/// Twelve 10x10 objects in a row, spaced 12 pixels apart, each straddling one
/// removal threshold. Objects 0 (R1), 5 (R2), 8 and 10 (R3) must go.
struct RuleFixture {
  wsf::Mask map;
  wsf::Mask agreement;
  wsf::Mask exclusion;
  wsf::Grid ndvi;
  wsf::Grid s1_a;
  wsf::Grid s1_d;
  std::vector<int> expected_removed;
};

inline RuleFixture rule_fixture() {
  constexpr int kObjects = 12;
  constexpr int kSide = 10;
  constexpr int kPitch = 12;
  const int w = kObjects * kPitch;
  const int h = kSide;
  RuleFixture f{wsf::Mask(w, h, unit_transform(), 0),
                wsf::Mask(w, h, unit_transform(), 1),
                wsf::Mask(w, h, unit_transform(), 0),
                wsf::Grid(w, h, unit_transform(), 0.2, wsf::kNodata),
                wsf::Grid(w, h, unit_transform(), -5.0, wsf::kNodata),
                wsf::Grid(w, h, unit_transform(), -5.0, wsf::kNodata),
                {0, 5, 8, 10}};
  // Agreement and exclusion pixel counts out of 100 for objects 0..4.
  const int agree[5] = {29, 31, 29, 30, 29};
  const int excl[5] = {31, 31, 29, 31, 30};
  const double ndvi[3] = {0.61, 0.59, 0.55};
  for (int k = 0; k < kObjects; ++k) {
    const int x0 = k * kPitch;
    int n = 0;
    for (int r = 0; r < kSide; ++r) {
      for (int c = x0; c < x0 + kSide; ++c, ++n) {
        f.map(c, r) = 1;
        if (k < 5) {
          f.agreement(c, r) = n < agree[k] ? 1 : 0;
          f.exclusion(c, r) = n >= 100 - excl[k] ? 1 : 0;
        } else if (k < 8) {
          f.ndvi(c, r) = ndvi[k - 5];
        } else if (k == 8) {
          f.s1_a(c, r) = -11.1;
        } else if (k == 9) {
          f.s1_a(c, r) = -10.9;
        } else if (k == 10) {
          f.s1_d(c, r) = -11.1;
        } else {
          f.s1_d(c, r) = -10.9;
        }
      }
    }
  }
  return f;
}

}  // namespace fixture
