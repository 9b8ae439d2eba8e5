// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "wsf/objects.hpp"

using namespace wsf;

namespace {

bool matches_oracle(const std::vector<std::uint8_t>& m, int w, int h, Connectivity conn) {
  const ObjectSet s = connected_components(fixture::mask(w, h, m), conn);
  const std::vector<int> want = oracle::flood_fill(m, w, h, conn == Connectivity::kEight);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (s.labels[i] != want[i]) {
      return false;
    }
  }
  int n = 0;
  for (int v : want) n = std::max(n, v);
  return s.objects.size() == static_cast<std::size_t>(n);
}

}  // namespace

TEST_CASE("diagonal neighbours join only under eight-connectivity") {
  const Mask m = fixture::mask(3, 3, {1, 0, 0,
                                      0, 1, 0,
                                      0, 0, 1});
  CHECK(connected_components(m, Connectivity::kEight).objects.size() == 1);
  CHECK(connected_components(m, Connectivity::kFour).objects.size() == 3);
}

TEST_CASE("object records carry size and bounding box in raster order") {
  const Mask m = fixture::mask(5, 4, {0, 1, 1, 0, 0,
                                      0, 0, 1, 0, 1,
                                      1, 0, 0, 0, 1,
                                      1, 1, 0, 0, 0});
  const ObjectSet s = connected_components(m);
  REQUIRE(s.objects.size() == 3);
  CHECK(s.labels(1, 0) == 1);
  CHECK(s.labels(4, 1) == 2);
  CHECK(s.labels(0, 2) == 3);
  CHECK(s.objects[0].pixel_count == 3);
  CHECK(s.objects[2].bbox.min_col == 0);
  CHECK(s.objects[2].bbox.max_col == 1);
  CHECK(s.objects[2].bbox.min_row == 2);
  CHECK(s.objects[2].bbox.max_row == 3);
  CHECK(s.foreground_count() == 8);
  CHECK(s.find(2)->pixel_count == 2);
  CHECK(s.find(9) == nullptr);
  const Mask f = s.footprint();
  CHECK(std::equal(f.values().begin(), f.values().end(), m.values().begin()));
}

TEST_CASE("rings with holes and nested objects") {
  const Mask m = fixture::mask(7, 7, {1, 1, 1, 1, 1, 1, 1,
                                      1, 0, 0, 0, 0, 0, 1,
                                      1, 0, 1, 1, 1, 0, 1,
                                      1, 0, 1, 0, 1, 0, 1,
                                      1, 0, 1, 1, 1, 0, 1,
                                      1, 0, 0, 0, 0, 0, 1,
                                      1, 1, 1, 1, 1, 1, 1});
  for (Connectivity c : {Connectivity::kFour, Connectivity::kEight}) {
    const ObjectSet s = connected_components(m, c);
    CHECK(s.objects.size() == 2);
    CHECK(s.labels(3, 2) == 2);
    CHECK(s.labels(3, 3) == 0);
  }
}

TEST_CASE("empty and full masks") {
  const ObjectSet e = connected_components(Mask(4, 3, fixture::unit_transform(), 0));
  CHECK(e.objects.empty());
  const ObjectSet f = connected_components(Mask(4, 3, fixture::unit_transform(), 1));
  REQUIRE(f.objects.size() == 1);
  CHECK(f.objects[0].pixel_count == 12);
  const ObjectSet one = connected_components(fixture::mask(1, 1, {1}));
  CHECK(one.objects.size() == 1);
}

TEST_CASE("every 4x4 mask matches flood fill") {
  for (std::uint32_t bits = 0; bits < (1u << 16); ++bits) {
    std::vector<std::uint8_t> m(16);
    for (int i = 0; i < 16; ++i) {
      m[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
    }
    REQUIRE(matches_oracle(m, 4, 4, Connectivity::kEight));
    REQUIRE(matches_oracle(m, 4, 4, Connectivity::kFour));
  }
}

TEST_CASE("random masks of various shapes match flood fill") {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> dim(1, 24);
  for (int trial = 0; trial < 500; ++trial) {
    const int w = dim(gen);
    const int h = dim(gen);
    const double p = (trial % 9 + 1) / 10.0;
    const auto m = oracle::random_mask(gen, w, h, p);
    REQUIRE(matches_oracle(m, w, h, Connectivity::kEight));
    REQUIRE(matches_oracle(m, w, h, Connectivity::kFour));
  }
}

TEST_CASE("overlap fractions and zonal means") {
  const Mask m = fixture::mask(4, 1, {1, 1, 0, 1});
  const ObjectSet s = connected_components(m);
  const std::vector<double> f = overlap_fractions(s, fixture::mask(4, 1, {1, 0, 1, 1}));
  CHECK(f[0] == 0.5);
  CHECK(f[1] == 1.0);
  const auto z = zonal_means(s, fixture::grid(4, 1, {2.0, 4.0, 100.0, kNodata}));
  CHECK(*z[0] == 3.0);
  CHECK_FALSE(z[1].has_value());
  CHECK_THROWS_AS(overlap_fractions(s, fixture::mask(3, 1, {1, 1, 1})), ContractError);
}
