// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "wsf/temporal.hpp"

using namespace wsf;

TEST_CASE("series statistics of a hand example") {
  const std::vector<double> x{0.2, 0.4, 0.1, 0.3};
  const SeriesStatistics s = series_statistics(x);
  CHECK(s.count == 4);
  CHECK(s.max == 0.4);
  CHECK(s.min == 0.1);
  CHECK(s.mean == doctest::Approx(0.25));
  CHECK(s.std == doctest::Approx(std::sqrt(0.05 / 3.0)));
  CHECK(s.mean_slope == doctest::Approx((0.2 + 0.3 + 0.2) / 3.0));
}

TEST_CASE("constant series are exact") {
  const std::vector<double> x(7, 0.1);
  const SeriesStatistics s = series_statistics(x);
  CHECK(s.mean == 0.1);
  CHECK(s.std == 0.0);
  CHECK(s.mean_slope == 0.0);
}

TEST_CASE("temporal statistics skip invalid observations") {
  std::vector<Observation> obs;
  // Two pixels, three dates; pixel 1 is valid only once, pixel 0 twice.
  obs.push_back({fixture::grid(2, 1, {1.0, 5.0}), fixture::mask(2, 1, {1, 0}), 30});
  obs.push_back({fixture::grid(2, 1, {3.0, kNodata}), fixture::mask(2, 1, {1, 1}), 10});
  obs.push_back({fixture::grid(2, 1, {9.0, 2.0}), fixture::mask(2, 1, {0, 1}), 20});
  const TemporalStatistics st = temporal_statistics(TemporalStack(std::move(obs)));
  CHECK(st.count[0] == 2);
  CHECK(st.count[1] == 1);
  // Time order is 10, 20, 30, so the valid series of pixel 0 is {3, 1}.
  CHECK(st.mean[0] == 2.0);
  CHECK(st.mean_slope[0] == 2.0);
  CHECK(st.std[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(st.mean[1] == 2.0);
  CHECK(st.std.is_nodata(1));
  CHECK(st.mean_slope.is_nodata(1));
}

TEST_CASE("pixels with no valid observation are nodata with count zero") {
  std::vector<Observation> obs;
  obs.push_back({fixture::grid(1, 1, {1.0}), fixture::mask(1, 1, {0}), 0});
  const TemporalStatistics st = temporal_statistics(TemporalStack(std::move(obs)));
  CHECK(st.count[0] == 0);
  CHECK(st.max.is_nodata(0));
  CHECK(st.mean.is_nodata(0));
}

TEST_CASE("temporal statistics agree with the brute-force oracle") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int len = 1; len <= 10; ++len) {
    const int w = 50;
    std::vector<std::vector<double>> values(static_cast<std::size_t>(len));
    std::vector<std::vector<bool>> valid(static_cast<std::size_t>(len));
    std::vector<Observation> obs;
    for (int k = 0; k < len; ++k) {
      std::vector<double> v(w);
      std::vector<std::uint8_t> m(w);
      for (int i = 0; i < w; ++i) {
        v[i] = val(gen);
        m[i] = val(gen) > -0.5 ? 1 : 0;
        values[k].push_back(v[i]);
        valid[k].push_back(m[i] != 0);
      }
      obs.push_back({fixture::grid(w, 1, v), fixture::mask(w, 1, m), k});
    }
    const TemporalStatistics st = temporal_statistics(TemporalStack(std::move(obs)));
    for (int i = 0; i < w; ++i) {
      std::vector<double> xs;
      std::vector<bool> ok;
      for (int k = 0; k < len; ++k) {
        xs.push_back(values[k][i]);
        ok.push_back(valid[k][i]);
      }
      const oracle::Stats o = oracle::brute_stats(xs, ok);
      REQUIRE(st.count[i] == o.count);
      if (o.count == 0) {
        CHECK(st.mean.is_nodata(i));
        continue;
      }
      CHECK(oracle::close(st.max[i], o.max));
      CHECK(oracle::close(st.min[i], o.min));
      CHECK(oracle::close(st.mean[i], o.mean));
      if (o.std) {
        CHECK(oracle::close(st.std[i], *o.std));
        CHECK(oracle::close(st.mean_slope[i], *o.mean_slope));
      } else {
        CHECK(st.std.is_nodata(i));
      }
    }
  }
}

TEST_CASE("stack rejects mixed grids and sorts by time") {
  std::vector<Observation> obs;
  obs.push_back({fixture::grid(2, 1, {1, 1}), fixture::mask(2, 1, {1, 1}), 0});
  obs.push_back({fixture::grid(1, 1, {1}), fixture::mask(1, 1, {1}), 1});
  CHECK_THROWS_AS(TemporalStack(std::move(obs)), ContractError);
  CHECK_THROWS_AS(temporal_statistics(TemporalStack()), ContractError);
}

TEST_CASE("timestamps parse and format") {
  const Timestamp t = parse_timestamp("2015-03-02");
  CHECK(format_timestamp(t).rfind("2015-03-02", 0) == 0);
  CHECK(parse_timestamp("2015-03-02T12:00:00") == t + 12 * 3600);
  CHECK_THROWS_AS(parse_timestamp("2015-13-40"), FormatError);
}

TEST_CASE("coefficient-of-variation texture") {
  // 3x3 window on a 3x3 grid: only the centre sees every cell.
  const Grid g = fixture::grid(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const Grid c = cov_texture(g, 3);
  const SeriesStatistics all = series_statistics(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(c(1, 1) == doctest::Approx(all.std / all.mean));
  const SeriesStatistics corner = series_statistics(std::vector<double>{1, 2, 4, 5});
  CHECK(c(0, 0) == doctest::Approx(corner.std / corner.mean));
  CHECK_THROWS_AS(cov_texture(g, 4), ContractError);
  // Zero mean leaves nodata.
  const Grid z = cov_texture(fixture::grid(2, 1, {-1, 1}), 3);
  CHECK(z.is_nodata(0));
}

TEST_CASE("feature stack access") {
  FeatureStack fs;
  fs.add("a", fixture::grid(2, 1, {1, kNodata}));
  fs.add("b", fixture::grid(2, 1, {3, 4}));
  CHECK_THROWS_AS(fs.add("a", fixture::grid(2, 1, {0, 0})), ContractError);
  CHECK_THROWS_AS(fs.add("c", fixture::grid(3, 1, {0, 0, 0})), ContractError);
  CHECK_THROWS_AS(fs.band("zzz"), ContractError);
  std::vector<double> v(2);
  CHECK(fs.pixel_vector(0, v));
  CHECK(v[1] == 3);
  CHECK_FALSE(fs.pixel_vector(1, v));
}
