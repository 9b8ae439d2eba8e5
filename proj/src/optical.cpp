// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/optical.hpp"

#include <algorithm>
#include <cctype>

namespace wsf {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

}  // namespace

std::string_view index_name(SpectralIndex index) {
  switch (index) {
    case SpectralIndex::kNdbi: return "NDBI";
    case SpectralIndex::kNdvi: return "NDVI";
    case SpectralIndex::kMndwi: return "MNDWI";
    case SpectralIndex::kNdmir: return "NDMIR";
    case SpectralIndex::kNdrb: return "NDRB";
    case SpectralIndex::kNdgb: return "NDGB";
  }
  return "?";
}

SpectralIndex parse_index(std::string_view name) {
  const std::string u = upper(name);
  for (SpectralIndex idx : kAllIndices) {
    if (index_name(idx) == u) {
      return idx;
    }
  }
  throw ContractError("unknown spectral index '" + std::string(name) + "'");
}

std::string_view band_name(Band band) {
  switch (band) {
    case Band::kBlue: return "blue";
    case Band::kGreen: return "green";
    case Band::kRed: return "red";
    case Band::kNir: return "nir";
    case Band::kSwir1: return "swir1";
    case Band::kSwir2: return "swir2";
  }
  return "?";
}

// Formulas exactly as tabulated for Landsat-8; MNDWI uses Green and NIR.
IndexOperands index_operands(SpectralIndex index) {
  switch (index) {
    case SpectralIndex::kNdbi: return {Band::kSwir1, Band::kNir};
    case SpectralIndex::kNdvi: return {Band::kNir, Band::kRed};
    case SpectralIndex::kMndwi: return {Band::kGreen, Band::kNir};
    case SpectralIndex::kNdmir: return {Band::kSwir1, Band::kSwir2};
    case SpectralIndex::kNdrb: return {Band::kRed, Band::kBlue};
    case SpectralIndex::kNdgb: return {Band::kGreen, Band::kBlue};
  }
  throw ContractError("unknown spectral index");
}

void SpectralScene::validate() const {
  for (const Grid& b : bands) {
    require_same_grid(b, bands[0], "spectral scene band");
  }
  require_same_grid(validity, bands[0], "spectral scene validity");
}

Grid spectral_index(const SpectralScene& scene, SpectralIndex index) {
  scene.validate();
  const auto [a_band, b_band] = index_operands(index);
  const Grid& a = scene.band(a_band);
  const Grid& b = scene.band(b_band);
  Grid out(a.geometry(), kNodata, kNodata);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (scene.validity[i] == 0 || a.is_nodata(i) || b.is_nodata(i)) {
      continue;
    }
    const double den = a[i] + b[i];
    if (den == 0.0) {
      continue;
    }
    out[i] = (a[i] - b[i]) / den;
  }
  return out;
}

std::string_view statistic_name(Statistic stat) {
  switch (stat) {
    case Statistic::kMax: return "max";
    case Statistic::kMin: return "min";
    case Statistic::kMean: return "mean";
    case Statistic::kStd: return "std";
    case Statistic::kMeanSlope: return "mean_slope";
    case Statistic::kCov: return "cov";
  }
  return "?";
}

std::string optical_band_name(SpectralIndex index, Statistic stat) {
  return std::string(index_name(index)) + "_" + std::string(statistic_name(stat));
}

FeatureStack build_optical_stack(const std::vector<SpectralScene>& scenes,
                                 const OpticalStackOptions& options) {
  if (scenes.empty()) {
    throw DomainError("build_optical_stack: no scenes");
  }
  for (const SpectralScene& s : scenes) {
    s.validate();
    require_same_grid(s.bands[0], scenes.front().bands[0], "optical scene");
    if (s.cloud_cover >= options.max_cloud_cover) {
      throw ContractError("optical scene " + format_timestamp(s.timestamp) + " reports " +
                          std::to_string(s.cloud_cover) + "% cloud cover, limit is " +
                          std::to_string(options.max_cloud_cover) + "%");
    }
  }
  const GridGeometry g = scenes.front().bands[0].geometry();

  FeatureStack stack;
  for (SpectralIndex index : kAllIndices) {
    std::vector<Observation> obs;
    obs.reserve(scenes.size());
    for (const SpectralScene& s : scenes) {
      obs.push_back({spectral_index(s, index), s.validity, s.timestamp});
    }
    TemporalStatistics st = temporal_statistics(TemporalStack(std::move(obs)));
    Grid cov = cov_texture(st.mean, options.cov_window);
    stack.add(optical_band_name(index, Statistic::kMax), std::move(st.max));
    stack.add(optical_band_name(index, Statistic::kMin), std::move(st.min));
    stack.add(optical_band_name(index, Statistic::kMean), std::move(st.mean));
    stack.add(optical_band_name(index, Statistic::kStd), std::move(st.std));
    stack.add(optical_band_name(index, Statistic::kMeanSlope), std::move(st.mean_slope));
    stack.add(optical_band_name(index, Statistic::kCov), std::move(cov));
  }

  Grid count(g, 0.0, kNodata);
  for (const SpectralScene& s : scenes) {
    for (std::size_t i = 0; i < count.size(); ++i) {
      count[i] += s.validity[i] != 0 ? 1.0 : 0.0;
    }
  }
  stack.add(std::string(kOpticalCountBand), std::move(count));
  return stack;
}

}  // namespace wsf
