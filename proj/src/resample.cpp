// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/resample.hpp"

#include <algorithm>

namespace wsf {

Grid downsample_percent(const Mask& mask, int factor) {
  if (factor < 2) {
    throw ContractError("downsample_percent: factor must be >= 2");
  }
  const int out_w = (mask.width() + factor - 1) / factor;
  const int out_h = (mask.height() + factor - 1) / factor;
  const GeoTransform& t = mask.transform();
  GeoTransform out_t{t.origin_lon, t.origin_lat, t.pixel_width * factor, t.pixel_height * factor};
  Grid out(out_w, out_h, out_t, 0.0, kNodata);

  const double block = static_cast<double>(factor) * factor;
  for (int orow = 0; orow < out_h; ++orow) {
    for (int ocol = 0; ocol < out_w; ++ocol) {
      int positives = 0;
      const int r_end = std::min(mask.height(), (orow + 1) * factor);
      const int c_end = std::min(mask.width(), (ocol + 1) * factor);
      for (int r = orow * factor; r < r_end; ++r) {
        for (int c = ocol * factor; c < c_end; ++c) {
          positives += mask(c, r) != 0 ? 1 : 0;
        }
      }
      out(ocol, orow) = 100.0 * positives / block;
    }
  }
  return out;
}

}  // namespace wsf
