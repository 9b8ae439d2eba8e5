// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference implementations used to check the library. They are
// written for clarity, not speed, and share no code with src/.

#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

struct Stats {
  int count = 0;
  double max = 0.0;
  double min = 0.0;
  double mean = 0.0;
  std::optional<double> std;
  std::optional<double> mean_slope;
};

/// Two-pass statistics of the samples whose validity flag is set, in order.
inline Stats brute_stats(const std::vector<double>& values, const std::vector<bool>& valid) {
  std::vector<long double> xs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (valid[i]) {
      xs.push_back(values[i]);
    }
  }
  Stats s;
  s.count = static_cast<int>(xs.size());
  if (xs.empty()) {
    return s;
  }
  long double mx = xs[0];
  long double mn = xs[0];
  long double sum = 0;
  for (long double x : xs) {
    mx = x > mx ? x : mx;
    mn = x < mn ? x : mn;
    sum += x;
  }
  const long double mean = sum / xs.size();
  s.max = static_cast<double>(mx);
  s.min = static_cast<double>(mn);
  s.mean = static_cast<double>(mean);
  if (xs.size() >= 2) {
    long double ss = 0;
    long double slope = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      ss += (xs[i] - mean) * (xs[i] - mean);
      if (i > 0) {
        slope += std::fabs(xs[i] - xs[i - 1]);
      }
    }
    s.std = static_cast<double>(std::sqrt(ss / (xs.size() - 1)));
    s.mean_slope = static_cast<double>(slope / (xs.size() - 1));
  }
  return s;
}

/// Relative difference with an absolute floor for values near zero.
inline bool close(double a, double b, double rel = 1e-12) {
  const double scale = std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(b)));
  return std::fabs(a - b) <= rel * scale;
}

/// Breadth-first flood fill; labels 1..n in raster order of the seed pixel.
inline std::vector<int> flood_fill(const std::vector<std::uint8_t>& mask, int w, int h, bool eight) {
  std::vector<int> labels(mask.size(), 0);
  int next = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y * w + x);
      if (mask[i] == 0 || labels[i] != 0) {
        continue;
      }
      ++next;
      std::deque<std::pair<int, int>> queue{{x, y}};
      labels[i] = next;
      while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0)) {
              continue;
            }
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
              continue;
            }
            const std::size_t j = static_cast<std::size_t>(ny * w + nx);
            if (mask[j] != 0 && labels[j] == 0) {
              labels[j] = next;
              queue.emplace_back(nx, ny);
            }
          }
        }
      }
    }
  }
  return labels;
}

/// Normalized differences written out band by band.
struct Reflectance {
  double blue, green, red, nir, swir1, swir2;
};
inline double ndbi(const Reflectance& r) { return (r.swir1 - r.nir) / (r.swir1 + r.nir); }
inline double ndvi(const Reflectance& r) { return (r.nir - r.red) / (r.nir + r.red); }
inline double mndwi(const Reflectance& r) { return (r.green - r.nir) / (r.green + r.nir); }
inline double ndmir(const Reflectance& r) { return (r.swir1 - r.swir2) / (r.swir1 + r.swir2); }
inline double ndrb(const Reflectance& r) { return (r.red - r.blue) / (r.red + r.blue); }
inline double ndgb(const Reflectance& r) { return (r.green - r.blue) / (r.green + r.blue); }

/// Candidate rules restated directly from the criteria table.
struct Pixel {
  double ndbi, ndvi, mndwi;
  int n_lc8;
  int n_a;
  double s1_a;
  int n_d;
  double s1_d;
  double slope;
};
struct Band {
  double s_min, s_max, ns_min, ns_max;
};

inline bool settlement_rule(const Pixel& p, const Band b[3]) {
  const double idx[3] = {p.ndbi, p.ndvi, p.mndwi};
  for (int k = 0; k < 3; ++k) {
    if (!(b[k].s_min < idx[k] && idx[k] < b[k].s_max)) {
      return false;
    }
  }
  const bool asc = p.n_a < 5 || (p.s1_a > -7.0 && p.n_a >= 5);
  const bool desc = p.n_d < 5 || (p.s1_d > -7.0 && p.n_d >= 5);
  return p.n_lc8 > 5 && asc && desc && p.slope < 10.0;
}

inline bool non_settlement_rule(const Pixel& p, const Band b[3]) {
  const double idx[3] = {p.ndbi, p.ndvi, p.mndwi};
  for (int k = 0; k < 3; ++k) {
    if (!(idx[k] < b[k].ns_min || idx[k] > b[k].ns_max)) {
      return false;
    }
  }
  const bool asc = p.n_a < 5 || (p.s1_a < -11.0 && p.n_a >= 5);
  const bool desc = p.n_d < 5 || (p.s1_d < -11.0 && p.n_d >= 5);
  return p.n_lc8 > 5 && asc && desc && p.slope < 10.0;
}

/// Kappa and accuracies computed from the textbook definitions.
struct Metrics {
  double kappa, pa_s, pa_ns, ua_s, ua_ns, aa;
};
inline Metrics metrics(double tp, double fp, double fn, double tn) {
  const double n = tp + fp + fn + tn;
  const double po = (tp + tn) / n;
  const double pe = ((tp + fp) / n) * ((tp + fn) / n) + ((fn + tn) / n) * ((fp + tn) / n);
  Metrics m{};
  m.kappa = (po - pe) / (1.0 - pe);
  m.pa_s = 100.0 * tp / (tp + fn);
  m.pa_ns = 100.0 * tn / (tn + fp);
  m.ua_s = 100.0 * tp / (tp + fp);
  m.ua_ns = 100.0 * tn / (tn + fn);
  m.aa = (m.pa_s + m.pa_ns) / 2.0;
  return m;
}

/// Random binary mask with the given foreground probability.
inline std::vector<std::uint8_t> random_mask(std::mt19937_64& gen, int w, int h, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<std::uint8_t> m(static_cast<std::size_t>(w * h));
  for (auto& v : m) {
    v = coin(gen) ? 1 : 0;
  }
  return m;
}

}  // namespace oracle
