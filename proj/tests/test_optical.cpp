// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "wsf/optical.hpp"

using namespace wsf;

namespace {

SpectralScene scene_of(const std::vector<oracle::Reflectance>& px, Timestamp ts,
                       std::vector<std::uint8_t> validity = {}) {
  const int w = static_cast<int>(px.size());
  SpectralScene s;
  std::array<std::vector<double>, kBandCount> b;
  for (const auto& r : px) {
    b[0].push_back(r.blue);
    b[1].push_back(r.green);
    b[2].push_back(r.red);
    b[3].push_back(r.nir);
    b[4].push_back(r.swir1);
    b[5].push_back(r.swir2);
  }
  for (std::size_t k = 0; k < kBandCount; ++k) {
    s.bands[k] = fixture::grid(w, 1, b[k]);
  }
  if (validity.empty()) {
    validity.assign(px.size(), 1);
  }
  s.validity = fixture::mask(w, 1, validity);
  s.timestamp = ts;
  return s;
}

}  // namespace

TEST_CASE("index names round trip") {
  for (SpectralIndex idx : kAllIndices) {
    CHECK(parse_index(index_name(idx)) == idx);
  }
  CHECK(parse_index("ndvi") == SpectralIndex::kNdvi);
  CHECK_THROWS_AS(parse_index("EVI"), ContractError);
  CHECK(optical_band_name(SpectralIndex::kNdbi, Statistic::kMeanSlope) == "NDBI_mean_slope");
}

TEST_CASE("indices match the band formulas") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> refl(0.001, 1.0);
  std::vector<oracle::Reflectance> px(200);
  for (auto& r : px) {
    r = {refl(gen), refl(gen), refl(gen), refl(gen), refl(gen), refl(gen)};
  }
  const SpectralScene s = scene_of(px, 0);
  double (*const formulas[])(const oracle::Reflectance&) = {oracle::ndbi,  oracle::ndvi,
                                                            oracle::mndwi, oracle::ndmir,
                                                            oracle::ndrb,  oracle::ndgb};
  for (std::size_t k = 0; k < kAllIndices.size(); ++k) {
    const Grid g = spectral_index(s, kAllIndices[k]);
    for (std::size_t i = 0; i < px.size(); ++i) {
      CHECK(oracle::close(g[i], formulas[k](px[i])));
      CHECK(g[i] >= -1.0);
      CHECK(g[i] <= 1.0);
    }
  }
}

TEST_CASE("masked pixels and zero denominators give nodata") {
  const SpectralScene s = scene_of({{0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, {0, 0, 0, 0, 0, 0}}, 0, {0, 1});
  const Grid g = spectral_index(s, SpectralIndex::kNdvi);
  CHECK(g.is_nodata(0));
  CHECK(g.is_nodata(1));
}

TEST_CASE("optical stack has 37 bands and counts valid scenes") {
  std::vector<SpectralScene> scenes;
  scenes.push_back(scene_of({{0.1, 0.2, 0.1, 0.5, 0.2, 0.1}, {0.1, 0.1, 0.1, 0.1, 0.1, 0.1}}, 2));
  scenes.push_back(scene_of({{0.1, 0.2, 0.1, 0.3, 0.2, 0.1}, {0.2, 0.2, 0.2, 0.2, 0.2, 0.2}}, 1,
                            {1, 0}));
  const FeatureStack fs = build_optical_stack(scenes);
  CHECK(fs.size() == kOpticalBandCount);
  CHECK(fs.band(kOpticalCountBand)[0] == 2);
  CHECK(fs.band(kOpticalCountBand)[1] == 1);
  // NDVI of pixel 0: date 1 gives 0.5, date 2 gives 2/3, in time order.
  const Grid& ndvi_mean = fs.band("NDVI_mean");
  CHECK(ndvi_mean[0] == doctest::Approx((0.5 + 2.0 / 3.0) / 2.0));
  CHECK(fs.band("NDVI_mean_slope")[0] == doctest::Approx(2.0 / 3.0 - 0.5));
  CHECK(fs.band("NDVI_std").is_nodata(1));
  CHECK(fs.has("NDGB_cov"));
}

TEST_CASE("cloudy scenes are rejected") {
  std::vector<SpectralScene> scenes{scene_of({{0.1, 0.2, 0.1, 0.5, 0.2, 0.1}}, 0)};
  scenes[0].cloud_cover = 60.0;
  CHECK_THROWS_AS(build_optical_stack(scenes), ContractError);
  scenes[0].cloud_cover = 59.9;
  CHECK_NOTHROW(build_optical_stack(scenes));
  CHECK_THROWS_AS(build_optical_stack({}), DomainError);
}
