// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "wsf/parallel.hpp"
#include "wsf/random.hpp"
#include "wsf/raster.hpp"
#include "wsf/raster_io.hpp"
#include "wsf/resample.hpp"

using namespace wsf;

TEST_CASE("raster construction checks dimensions and transform") {
  CHECK_THROWS_AS(Grid(0, 3, fixture::unit_transform()), ContractError);
  CHECK_THROWS_AS(Grid(3, 3, GeoTransform{0, 0, -1, 1}), ContractError);
  CHECK_THROWS_AS(Grid(2, 2, fixture::unit_transform(), std::vector<double>(3), std::nullopt),
                  ContractError);
  Grid g(4, 3, GeoTransform{10, 50, 0.5, 0.25}, 1.5);
  CHECK(g.size() == 12);
  CHECK(g(3, 2) == 1.5);
  CHECK(g.transform().center_lon(0) == doctest::Approx(10.25));
  CHECK(g.transform().center_lat(0) == doctest::Approx(49.875));
}

TEST_CASE("co-registration uses a relative tolerance") {
  const GeoTransform a{10, 50, 1e-4, 1e-4};
  GeoTransform b = a;
  b.origin_lon += 1e-15;
  CHECK(a.same_as(b));
  b.origin_lon += 1e-5;
  CHECK_FALSE(a.same_as(b));
  Grid ga(3, 3, a);
  Mask mb(3, 3, b);
  CHECK_THROWS_AS(require_same_grid(ga, mb, "test"), ContractError);
}

TEST_CASE("nodata and finiteness") {
  Grid g = fixture::grid(3, 1, {1.0, kNodata, 2.0});
  CHECK(g.is_nodata(1));
  CHECK(g.valid(std::size_t{0}));
  validate_grid(g);
  g[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate_grid(g), ContractError);
  CHECK(count_positive(fixture::mask(4, 1, {0, 1, 1, 0})) == 2);
}

TEST_CASE("GeoTIFF round trip in every encoding") {
  const auto dir = fixture::scratch("raster_io");
  const GeoTransform t{-3.5, 41.25, 0.001, 0.002};

  Grid real(5, 4, t, 0.0, kNodata);
  for (std::size_t i = 0; i < real.size(); ++i) {
    real[i] = std::sin(static_cast<double>(i)) * 1e3;
  }
  real[7] = kNodata;
  write_grid(real, dir / "real.tif", Encoding::kFloat);
  const Grid back = read_grid(dir / "real.tif");
  CHECK(back.geometry().matches(real.geometry()));
  REQUIRE(back.nodata().has_value());
  CHECK(back.is_nodata(7));
  for (std::size_t i = 0; i < real.size(); ++i) {
    if (i != 7) {
      CHECK(back[i] == real[i]);
    }
  }

  Grid pct(3, 1, t, 0.0, kNodata);
  pct[0] = 12.4;
  pct[1] = 100.0;
  pct[2] = kNodata;
  write_grid(pct, dir / "pct.tif", Encoding::kPercent);
  const Grid pb = read_grid(dir / "pct.tif");
  CHECK(pb[0] == 12.0);
  CHECK(pb[1] == 100.0);
  CHECK(pb.is_nodata(2));
  pct[0] = 101.0;
  CHECK_THROWS_AS(write_grid(pct, dir / "bad.tif", Encoding::kPercent), ContractError);

  Mask m(4, 2, t, 0);
  m(1, 0) = 1;
  m(3, 1) = 1;
  write_mask(m, dir / "mask.tif");
  const Grid raw = read_grid(dir / "mask.tif");
  CHECK(raw(1, 0) == 255.0);
  CHECK(raw(0, 0) == 0.0);
  const Mask mb = read_mask(dir / "mask.tif");
  CHECK(std::equal(mb.values().begin(), mb.values().end(), m.values().begin()));

  CHECK_THROWS_AS(write_grid(fixture::grid(2, 1, {0.0, 2.0}), dir / "x.tif", Encoding::kBinaryMask),
                  ContractError);
  CHECK_THROWS_AS(read_grid(dir / "missing.tif"), IoError);
}

TEST_CASE("ASCII grid round trip") {
  const auto dir = fixture::scratch("raster_asc");
  Grid g(3, 2, GeoTransform{1, 2, 0.5, 0.5}, 0.0, kNodata);
  g(0, 0) = 1.25;
  g(2, 1) = kNodata;
  write_grid(g, dir / "g.asc", Encoding::kFloat);
  const Grid b = read_grid(dir / "g.asc");
  CHECK(b.geometry().matches(g.geometry()));
  CHECK(b(0, 0) == 1.25);
  CHECK(b.is_nodata(2, 1));
}

TEST_CASE("mask and grid conversion") {
  const Mask m = fixture::mask(3, 1, {1, 0, 1});
  const Grid g = mask_to_grid(m);
  CHECK(g[0] == 1.0);
  CHECK(grid_to_mask(g)[2] == 1);
  CHECK_THROWS_AS(grid_to_mask(fixture::grid(1, 1, {0.5})), ContractError);
}

TEST_CASE("nearest-neighbour resampling") {
  // 2x2 source of 2-degree pixels onto a 4x4 lattice of 1-degree pixels.
  const Grid src(2, 2, GeoTransform{0, 4, 2, 2}, std::vector<double>{1, 2, 3, 4}, kNodata);
  const Grid dst = resample_nearest(src, GeoTransform{0, 4, 1, 1}, 4, 4);
  CHECK(dst(0, 0) == 1);
  CHECK(dst(1, 1) == 1);
  CHECK(dst(2, 1) == 2);
  CHECK(dst(3, 3) == 4);
  // Partially outside: cells with no source are nodata.
  const Grid shifted = resample_nearest(src, GeoTransform{3, 4, 1, 1}, 3, 1);
  CHECK(shifted[0] == 2);
  CHECK(shifted.is_nodata(1));
  CHECK_THROWS_AS(resample_nearest(src, GeoTransform{100, 4, 1, 1}, 2, 2), DomainError);
}

TEST_CASE("downsampling to settlement percentage") {
  // 4x4 mask, factor 2: blocks hold 3, 0, 4 and 1 settlement cells.
  const Mask m = fixture::mask(4, 4, {1, 1, 0, 0,
                                      1, 0, 0, 0,
                                      1, 1, 0, 1,
                                      1, 1, 0, 0});
  const Grid p = downsample_percent(m, 2);
  CHECK(p.width() == 2);
  CHECK(p(0, 0) == 75.0);
  CHECK(p(1, 0) == 0.0);
  CHECK(p(0, 1) == 100.0);
  CHECK(p(1, 1) == 25.0);
  CHECK(p.transform().pixel_width == 2.0);
  CHECK_THROWS_AS(downsample_percent(m, 1), ContractError);

  // Partial edge blocks keep the full block as denominator.
  const Grid e = downsample_percent(fixture::mask(3, 1, {1, 1, 1}), 2);
  CHECK(e.width() == 2);
  CHECK(e[0] == 50.0);
  CHECK(e[1] == 25.0);
}

TEST_CASE("seed streams are reproducible and distinct") {
  CHECK(derive_seed(7, "optical") == derive_seed(7, "optical"));
  CHECK(derive_seed(7, "optical") != derive_seed(7, "radar"));
  CHECK(derive_seed(7, 1) != derive_seed(8, 1));
  Rng a(derive_seed(1, "x"));
  Rng b(derive_seed(1, "x"));
  for (int i = 0; i < 100; ++i) {
    CHECK(a.below(17) == b.below(17));
  }
  Rng r(3);
  const auto idx = r.sample_indices(10, 20);
  CHECK(idx.size() == 10);
  std::vector<bool> seen(10, false);
  for (auto i : idx) {
    CHECK_FALSE(seen[i]);
    seen[i] = true;
  }
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 5) throw DomainError("boom");
                               }),
                  DomainError);
}
