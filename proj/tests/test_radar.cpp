// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "fixtures.hpp"
#include "wsf/radar.hpp"

using namespace wsf;

TEST_CASE("linear backscatter converts to decibels") {
  const Grid db = to_decibel(fixture::grid(4, 1, {1.0, 0.1, 0.0, kNodata}));
  CHECK(db[0] == doctest::Approx(0.0));
  CHECK(db[1] == doctest::Approx(-10.0));
  CHECK(db.is_nodata(2));
  CHECK(db.is_nodata(3));
  CHECK_THROWS_AS(to_decibel(fixture::grid(1, 1, {-0.1})), ContractError);
}

TEST_CASE("pass names") {
  CHECK(parse_pass("ascending") == Pass::kAscending);
  CHECK(parse_pass("desc") == Pass::kDescending);
  CHECK(parse_pass("A") == Pass::kAscending);
  CHECK_THROWS_AS(parse_pass("sideways"), FormatError);
  CHECK(radar_band_name(Pass::kDescending, "mean") == "S1D_mean");
  CHECK(radar_count_band(Pass::kAscending) == "N_S1A");
}

TEST_CASE("radar stack keeps only the requested pass") {
  const GridGeometry g{2, 1, fixture::unit_transform()};
  std::vector<RadarScene> scenes;
  scenes.push_back({fixture::grid(2, 1, {-5, -15}), BackscatterUnits::kDecibel, Pass::kAscending, 1});
  scenes.push_back({fixture::grid(2, 1, {0.1, 0.01}), BackscatterUnits::kLinear, Pass::kAscending, 2});
  scenes.push_back({fixture::grid(2, 1, {-30, -30}), BackscatterUnits::kDecibel, Pass::kDescending, 3});
  scenes[1].validity = fixture::mask(2, 1, {1, 0});

  const FeatureStack a = build_radar_stack(scenes, Pass::kAscending, g);
  CHECK(a.size() == kRadarBandCount);
  CHECK(a.band("N_S1A")[0] == 2);
  CHECK(a.band("N_S1A")[1] == 1);
  CHECK(a.band("S1A_mean")[0] == doctest::Approx(-7.5));
  CHECK(a.band("S1A_max")[0] == doctest::Approx(-5.0));
  CHECK(a.band("S1A_mean")[1] == doctest::Approx(-15.0));
  CHECK(a.band("S1A_std").is_nodata(1));

  const FeatureStack d = build_radar_stack(scenes, Pass::kDescending, g);
  CHECK(d.band("S1D_mean")[0] == -30.0);
}

TEST_CASE("a pass without scenes yields nodata bands and zero counts") {
  const GridGeometry g{3, 1, fixture::unit_transform()};
  const FeatureStack d = build_radar_stack({}, Pass::kDescending, g);
  CHECK(d.size() == kRadarBandCount);
  CHECK(d.band("N_S1D")[1] == 0);
  CHECK(d.band("S1D_mean").is_nodata(1));
}

TEST_CASE("scenes off the stack grid are rejected") {
  const GridGeometry g{3, 1, fixture::unit_transform()};
  std::vector<RadarScene> scenes{
      {fixture::grid(2, 1, {-5, -5}), BackscatterUnits::kDecibel, Pass::kAscending, 0}};
  CHECK_THROWS_AS(build_radar_stack(scenes, Pass::kAscending, g), ContractError);
}
