// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/objects.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace wsf {

namespace {

// Clockwise from east, y pointing down.
constexpr std::array<int, 8> kDx = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr std::array<int, 8> kDy = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kMarked = -1;

/// Padded working copy: one background pixel on every side.
class TracingImage {
 public:
  explicit TracingImage(const Mask& mask)
      : w_(mask.width() + 2), h_(mask.height() + 2),
        fg_(static_cast<std::size_t>(w_) * h_, 0), label_(fg_.size(), 0) {
    for (int r = 0; r < mask.height(); ++r) {
      for (int c = 0; c < mask.width(); ++c) {
        fg_[at(c + 1, r + 1)] = mask(c, r) != 0 ? 1 : 0;
      }
    }
  }

  std::size_t at(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(x);
  }
  bool fg(int x, int y) const { return fg_[at(x, y)] != 0; }
  int& label(int x, int y) { return label_[at(x, y)]; }

  /// Searches clockwise from `dir` for the next contour pixel, marking the
  /// background pixels it passes. Returns false for an isolated pixel.
  bool tracer(int x, int y, int dir, int& nx, int& ny, int& found_dir) {
    for (int k = 0; k < 8; ++k) {
      const int d = (dir + k) % 8;
      const int qx = x + kDx[d];
      const int qy = y + kDy[d];
      if (fg(qx, qy)) {
        nx = qx;
        ny = qy;
        found_dir = d;
        return true;
      }
      label(qx, qy) = kMarked;
    }
    return false;
  }

  /// Follows a contour from (sx, sy) until it returns to the start and is
  /// about to repeat its second point.
  void trace_contour(int sx, int sy, int lbl, int start_dir) {
    int tx = 0;
    int ty = 0;
    int dir = 0;
    if (!tracer(sx, sy, start_dir, tx, ty, dir)) {
      return;
    }
    label(tx, ty) = lbl;
    int cx = tx;
    int cy = ty;
    while (true) {
      int nx = 0;
      int ny = 0;
      int ndir = 0;
      tracer(cx, cy, (dir + 6) % 8, nx, ny, ndir);
      label(nx, ny) = lbl;
      if (cx == sx && cy == sy && nx == tx && ny == ty) {
        break;
      }
      cx = nx;
      cy = ny;
      dir = ndir;
    }
  }

  int width() const { return w_; }
  int height() const { return h_; }

 private:
  int w_;
  int h_;
  std::vector<std::uint8_t> fg_;
  std::vector<int> label_;
};

LabelGrid label_eight(const Mask& mask) {
  TracingImage img(mask);
  int next_label = 1;
  for (int y = 1; y < img.height() - 1; ++y) {
    for (int x = 1; x < img.width() - 1; ++x) {
      if (!img.fg(x, y)) {
        continue;
      }
      if (img.label(x, y) == 0 && !img.fg(x, y - 1)) {
        // External contour of a new component.
        img.label(x, y) = next_label;
        img.trace_contour(x, y, next_label, 7);
        ++next_label;
      }
      if (!img.fg(x, y + 1) && img.label(x, y + 1) == 0) {
        // Newly met internal contour.
        if (img.label(x, y) == 0) {
          img.label(x, y) = img.label(x - 1, y);
        }
        img.trace_contour(x, y, img.label(x, y), 3);
      }
      if (img.label(x, y) == 0) {
        img.label(x, y) = img.label(x - 1, y);
      }
      if (img.label(x, y) <= 0) {
        throw ContractError("contour tracing left a foreground pixel unlabelled");
      }
    }
  }
  LabelGrid out(mask.geometry(), 0);
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      out(c, r) = img.fg(c + 1, r + 1) ? img.label(c + 1, r + 1) : 0;
    }
  }
  return out;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

LabelGrid label_four(const Mask& mask) {
  const std::size_t n = mask.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  const auto unite = [&](std::size_t a, std::size_t b) {
    a = find_root(parent, a);
    b = find_root(parent, b);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
    }
  };
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (mask(c, r) == 0) {
        continue;
      }
      if (c > 0 && mask(c - 1, r) != 0) {
        unite(mask.index(c, r), mask.index(c - 1, r));
      }
      if (r > 0 && mask(c, r - 1) != 0) {
        unite(mask.index(c, r), mask.index(c, r - 1));
      }
    }
  }
  LabelGrid out(mask.geometry(), 0);
  std::vector<std::int32_t> root_label(n, 0);
  std::int32_t next = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i] == 0) {
      continue;
    }
    const std::size_t root = find_root(parent, i);
    if (root_label[root] == 0) {
      root_label[root] = next++;
    }
    out[i] = root_label[root];
  }
  return out;
}

std::vector<std::int32_t> label_lookup(const ObjectSet& objects) {
  std::int32_t max_label = 0;
  for (const ObjectRecord& o : objects.objects) {
    max_label = std::max(max_label, o.label);
  }
  std::vector<std::int32_t> lut(static_cast<std::size_t>(max_label) + 1, -1);
  for (std::size_t k = 0; k < objects.objects.size(); ++k) {
    lut[static_cast<std::size_t>(objects.objects[k].label)] = static_cast<std::int32_t>(k);
  }
  return lut;
}

}  // namespace

std::size_t ObjectSet::foreground_count() const {
  std::size_t n = 0;
  for (const ObjectRecord& o : objects) {
    n += o.pixel_count;
  }
  return n;
}

const ObjectRecord* ObjectSet::find(std::int32_t label) const {
  for (const ObjectRecord& o : objects) {
    if (o.label == label) {
      return &o;
    }
  }
  return nullptr;
}

Mask ObjectSet::footprint() const {
  Mask m(labels.geometry(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    m[i] = labels[i] > 0 ? 1 : 0;
  }
  return m;
}

ObjectSet connected_components(const Mask& mask, Connectivity connectivity) {
  ObjectSet set;
  set.labels = connectivity == Connectivity::kEight ? label_eight(mask) : label_four(mask);
  std::int32_t max_label = 0;
  for (std::int32_t v : set.labels.values()) {
    max_label = std::max(max_label, v);
  }
  set.objects.resize(static_cast<std::size_t>(max_label));
  for (std::int32_t k = 0; k < max_label; ++k) {
    ObjectRecord& o = set.objects[static_cast<std::size_t>(k)];
    o.label = k + 1;
    o.bbox = {mask.width(), mask.height(), -1, -1};
  }
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      const std::int32_t l = set.labels(c, r);
      if (l == 0) {
        continue;
      }
      ObjectRecord& o = set.objects[static_cast<std::size_t>(l - 1)];
      ++o.pixel_count;
      o.bbox.min_col = std::min(o.bbox.min_col, c);
      o.bbox.min_row = std::min(o.bbox.min_row, r);
      o.bbox.max_col = std::max(o.bbox.max_col, c);
      o.bbox.max_row = std::max(o.bbox.max_row, r);
    }
  }
  return set;
}

std::vector<double> overlap_fractions(const ObjectSet& objects, const Mask& mask) {
  require_same_grid(objects.labels, mask, "overlap_fractions");
  const std::vector<std::int32_t> lut = label_lookup(objects);
  std::vector<std::size_t> hits(objects.objects.size(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const std::int32_t l = objects.labels[i];
    if (l > 0 && mask[i] != 0) {
      const std::int32_t k = lut[static_cast<std::size_t>(l)];
      if (k >= 0) {
        ++hits[static_cast<std::size_t>(k)];
      }
    }
  }
  std::vector<double> out(objects.objects.size(), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const std::size_t n = objects.objects[k].pixel_count;
    out[k] = n > 0 ? static_cast<double>(hits[k]) / static_cast<double>(n) : 0.0;
  }
  return out;
}

std::vector<std::optional<double>> zonal_means(const ObjectSet& objects, const Grid& grid) {
  require_same_grid(objects.labels, grid, "zonal_means");
  const std::vector<std::int32_t> lut = label_lookup(objects);
  std::vector<double> sum(objects.objects.size(), 0.0);
  std::vector<std::size_t> n(objects.objects.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::int32_t l = objects.labels[i];
    if (l <= 0 || grid.is_nodata(i)) {
      continue;
    }
    const std::int32_t k = lut[static_cast<std::size_t>(l)];
    if (k >= 0) {
      sum[static_cast<std::size_t>(k)] += grid[i];
      ++n[static_cast<std::size_t>(k)];
    }
  }
  std::vector<std::optional<double>> out(objects.objects.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (n[k] > 0) {
      out[k] = sum[k] / static_cast<double>(n[k]);
    }
  }
  return out;
}

}  // namespace wsf
