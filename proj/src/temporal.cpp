// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/temporal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "wsf/resample.hpp"

namespace wsf {

Timestamp parse_timestamp(std::string_view text) {
  int y = 0;
  unsigned mo = 0;
  unsigned d = 0;
  int hh = 0;
  int mm = 0;
  int ss = 0;
  const std::string s(text);
  int consumed = 0;
  const int n = std::sscanf(s.c_str(), "%d-%u-%u%n", &y, &mo, &d, &consumed);
  if (n != 3) {
    throw FormatError("bad timestamp '" + s + "'");
  }
  if (static_cast<std::size_t>(consumed) < s.size()) {
    int tail = 0;
    if (std::sscanf(s.c_str() + consumed, "T%d:%d:%d%n", &hh, &mm, &ss, &tail) != 3 ||
        static_cast<std::size_t>(consumed + tail) != s.size()) {
      throw FormatError("bad timestamp '" + s + "'");
    }
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo},
                                        std::chrono::day{d}};
  if (!ymd.ok() || hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60) {
    throw FormatError("bad timestamp '" + s + "'");
  }
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * 86400 + hh * 3600 + mm * 60 + ss;
}

std::string format_timestamp(Timestamp ts) {
  const auto days = std::chrono::sys_days{std::chrono::days{ts >= 0 ? ts / 86400 : (ts - 86399) / 86400}};
  const std::chrono::year_month_day ymd{days};
  const Timestamp secs = ts - static_cast<Timestamp>(days.time_since_epoch().count()) * 86400;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(secs / 3600), static_cast<int>((secs / 60) % 60),
                static_cast<int>(secs % 60));
  return buf;
}

TemporalStack::TemporalStack(std::vector<Observation> scenes) : scenes_(std::move(scenes)) {
  std::stable_sort(scenes_.begin(), scenes_.end(),
                   [](const Observation& a, const Observation& b) { return a.timestamp < b.timestamp; });
  for (const Observation& s : scenes_) {
    require_same_grid(s.values, s.validity, "temporal stack validity");
    require_same_grid(s.values, scenes_.front().values, "temporal stack");
  }
}

GridGeometry TemporalStack::geometry() const {
  if (scenes_.empty()) {
    throw ContractError("empty temporal stack has no geometry");
  }
  return scenes_.front().values.geometry();
}

SeriesStatistics series_statistics(std::span<const double> series) {
  SeriesStatistics s;
  s.count = static_cast<int>(series.size());
  if (series.empty()) {
    return s;
  }
  // Shifted accumulation keeps constant series exact.
  const double shift = series.front();
  double sum = 0.0;
  double slope = 0.0;
  s.max = s.min = series.front();
  for (std::size_t k = 0; k < series.size(); ++k) {
    sum += series[k] - shift;
    s.max = std::max(s.max, series[k]);
    s.min = std::min(s.min, series[k]);
    if (k > 0) {
      slope += std::abs(series[k] - series[k - 1]);
    }
  }
  const double mean_shifted = sum / s.count;
  s.mean = shift + mean_shifted;
  // Rounding in the final addition may place the mean a hair outside [min, max].
  s.mean = std::clamp(s.mean, s.min, s.max);
  if (s.count >= 2) {
    double ss = 0.0;
    for (double v : series) {
      const double d = (v - shift) - mean_shifted;
      ss += d * d;
    }
    s.std = std::sqrt(ss / (s.count - 1));
    s.mean_slope = slope / (s.count - 1);
  }
  return s;
}

TemporalStatistics temporal_statistics(const TemporalStack& stack) {
  if (stack.empty()) {
    throw ContractError("temporal_statistics requires a non-empty stack");
  }
  const GridGeometry g = stack.geometry();
  TemporalStatistics out{Grid(g, kNodata, kNodata), Grid(g, kNodata, kNodata),
                         Grid(g, kNodata, kNodata), Grid(g, kNodata, kNodata),
                         Grid(g, kNodata, kNodata), Grid(g, 0.0, kNodata)};
  std::vector<double> series;
  series.reserve(stack.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    series.clear();
    for (const Observation& s : stack.scenes()) {
      if (s.validity[i] != 0 && !s.values.is_nodata(i)) {
        series.push_back(s.values[i]);
      }
    }
    const SeriesStatistics st = series_statistics(series);
    out.count[i] = st.count;
    if (st.count >= 1) {
      out.max[i] = st.max;
      out.min[i] = st.min;
      out.mean[i] = st.mean;
    }
    if (st.count >= 2) {
      out.std[i] = st.std;
      out.mean_slope[i] = st.mean_slope;
    }
  }
  return out;
}

Grid cov_texture(const Grid& grid, int window) {
  if (window < 3 || window % 2 == 0) {
    throw ContractError("cov_texture: window must be odd and >= 3");
  }
  const int half = window / 2;
  Grid out(grid.geometry(), kNodata, kNodata);
  std::vector<double> cells;
  cells.reserve(static_cast<std::size_t>(window) * window);
  for (int row = 0; row < grid.height(); ++row) {
    for (int col = 0; col < grid.width(); ++col) {
      cells.clear();
      for (int r = std::max(0, row - half); r <= std::min(grid.height() - 1, row + half); ++r) {
        for (int c = std::max(0, col - half); c <= std::min(grid.width() - 1, col + half); ++c) {
          if (grid.valid(c, r)) {
            cells.push_back(grid(c, r));
          }
        }
      }
      if (cells.size() < 2) {
        continue;
      }
      const SeriesStatistics st = series_statistics(cells);
      if (st.mean == 0.0) {
        continue;
      }
      out(col, row) = st.std / st.mean;
    }
  }
  return out;
}

void FeatureStack::add(std::string name, Grid band) {
  if (has(name)) {
    throw ContractError("duplicate feature band '" + name + "'");
  }
  if (!bands_.empty()) {
    require_same_grid(band, bands_.front(), "feature band '" + name + "'");
  }
  names_.push_back(std::move(name));
  bands_.push_back(std::move(band));
}

bool FeatureStack::has(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const Grid& FeatureStack::band(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    throw ContractError("feature stack has no band '" + std::string(name) + "'");
  }
  return bands_[static_cast<std::size_t>(it - names_.begin())];
}

GridGeometry FeatureStack::geometry() const {
  if (bands_.empty()) {
    throw ContractError("empty feature stack has no geometry");
  }
  return bands_.front().geometry();
}

bool FeatureStack::pixel_vector(std::size_t pixel, std::span<double> out) const {
  if (out.size() != bands_.size()) {
    throw ContractError("feature vector size does not match the stack");
  }
  for (std::size_t b = 0; b < bands_.size(); ++b) {
    if (bands_[b].is_nodata(pixel)) {
      return false;
    }
    out[b] = bands_[b][pixel];
  }
  return true;
}

FeatureStack FeatureStack::resampled(const GridGeometry& target) const {
  FeatureStack out;
  for (std::size_t b = 0; b < bands_.size(); ++b) {
    out.add(names_[b], resample_nearest(bands_[b], target));
  }
  return out;
}

}  // namespace wsf
