// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wsf/log.hpp"
#include "wsf/radar.hpp"
#include "wsf/random.hpp"

namespace wsf {

namespace {

constexpr double kEarthRadiusM = 6371008.8;

std::optional<double> value_at(const Grid& g, std::size_t i) {
  if (g.is_nodata(i)) {
    return std::nullopt;
  }
  return g[i];
}

int count_at(const Grid& g, std::size_t i) {
  return g.is_nodata(i) ? 0 : static_cast<int>(std::lround(g[i]));
}

bool radar_gate_settlement(int count, const std::optional<double>& mean_db,
                           const CandidateCriteria& c) {
  if (count < c.radar_count_gate) {
    return true;
  }
  return mean_db.has_value() && *mean_db > c.settlement_db_min;
}

bool radar_gate_non_settlement(int count, const std::optional<double>& mean_db,
                               const CandidateCriteria& c) {
  if (count < c.radar_count_gate) {
    return true;
  }
  return mean_db.has_value() && *mean_db < c.non_settlement_db_max;
}

}  // namespace

// ---------------------------------------------------------------------------
// ThresholdTable

std::size_t ThresholdTable::slot(SpectralIndex index) {
  for (std::size_t k = 0; k < kThresholdIndices.size(); ++k) {
    if (kThresholdIndices[k] == index) {
      return k;
    }
  }
  throw ConfigError("thresholds are defined only for NDBI, NDVI and MNDWI, not " +
                    std::string(index_name(index)));
}

void ThresholdTable::set(int climate_class, SpectralIndex index, const ThresholdBand& band) {
  if (climate_class < 1 || climate_class > kClimateClassCount) {
    throw ConfigError("climate class " + std::to_string(climate_class) + " outside 1.." +
                      std::to_string(kClimateClassCount));
  }
  const auto in_range = [](double v) { return std::isfinite(v) && v >= -1.0 && v <= 1.0; };
  if (!in_range(band.s_min) || !in_range(band.s_max) || !in_range(band.ns_min) ||
      !in_range(band.ns_max)) {
    throw ConfigError("thresholds of class " + std::to_string(climate_class) + " / " +
                      std::string(index_name(index)) + " must lie in [-1, 1]");
  }
  if (!(band.s_min < band.s_max)) {
    throw ConfigError("class " + std::to_string(climate_class) + " / " +
                      std::string(index_name(index)) + ": s_min must be below s_max");
  }
  if (band.ns_min > band.ns_max) {
    throw ConfigError("class " + std::to_string(climate_class) + " / " +
                      std::string(index_name(index)) + ": ns_min must not exceed ns_max");
  }
  auto& row = rows_[climate_class];
  auto& cell = row[slot(index)];
  if (cell) {
    throw ConfigError("duplicate thresholds for class " + std::to_string(climate_class) + " / " +
                      std::string(index_name(index)));
  }
  cell = band;
}

const ThresholdBand& ThresholdTable::get(int climate_class, SpectralIndex index) const {
  const auto it = rows_.find(climate_class);
  if (it == rows_.end() || !it->second[slot(index)]) {
    throw ConfigError("no thresholds for climate class " + std::to_string(climate_class) +
                      " (" + std::string(index_name(index)) + ")");
  }
  return *it->second[slot(index)];
}

bool ThresholdTable::has_class(int climate_class) const {
  const auto it = rows_.find(climate_class);
  return it != rows_.end() &&
         std::all_of(it->second.begin(), it->second.end(), [](const auto& c) { return c.has_value(); });
}

std::set<int> ThresholdTable::classes() const {
  std::set<int> out;
  for (const auto& [kg, row] : rows_) {
    out.insert(kg);
  }
  return out;
}

std::size_t ThresholdTable::threshold_count() const {
  std::size_t n = 0;
  for (const auto& [kg, row] : rows_) {
    for (const auto& cell : row) {
      n += cell ? 4 : 0;
    }
  }
  return n;
}

void ThresholdTable::validate_coverage(const std::set<int>& classes_in_use) const {
  for (int kg : classes_in_use) {
    for (SpectralIndex idx : kThresholdIndices) {
      get(kg, idx);
    }
  }
}

ThresholdTable load_threshold_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open threshold table " + path.string());
  }
  ThresholdTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) {
      continue;
    }
    if (first == "kg_class") {
      continue;  // header
    }
    std::string index;
    ThresholdBand band;
    int kg = 0;
    try {
      kg = std::stoi(first);
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad class '" + first + "'");
    }
    if (!(fields >> index >> band.s_min >> band.s_max >> band.ns_min >> band.ns_max)) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected kg_class index s_min s_max ns_min ns_max");
    }
    std::string extra;
    if (fields >> extra) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": trailing field '" +
                        extra + "'");
    }
    SpectralIndex idx{};
    try {
      idx = parse_index(index);
    } catch (const ContractError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    table.set(kg, idx, band);
  }
  return table;
}

void save_threshold_table(const ThresholdTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot create " + path.string());
  }
  out.precision(17);
  out << "kg_class index s_min s_max ns_min ns_max\n";
  for (int kg : table.classes()) {
    for (SpectralIndex idx : kThresholdIndices) {
      const ThresholdBand& b = table.get(kg, idx);
      out << kg << ' ' << index_name(idx) << ' ' << b.s_min << ' ' << b.s_max << ' ' << b.ns_min
          << ' ' << b.ns_max << '\n';
    }
  }
}

ThresholdTable sample_threshold_table() {
  ThresholdTable t;
  for (int kg = 1; kg <= kClimateClassCount; ++kg) {
    t.set(kg, SpectralIndex::kNdbi, {0.0, 0.4, -0.1, 0.5});
    t.set(kg, SpectralIndex::kNdvi, {-0.05, 0.4, -0.15, 0.5});
    t.set(kg, SpectralIndex::kMndwi, {-0.55, -0.05, -0.6, 0.0});
  }
  return t;
}

std::set<int> climate_classes_in_use(const Grid& climate) {
  std::set<int> out;
  for (std::size_t i = 0; i < climate.size(); ++i) {
    if (!climate.is_nodata(i)) {
      out.insert(static_cast<int>(std::lround(climate[i])));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Slope

Grid slope_from_dem(const Grid& dem, const SlopeOptions& options) {
  if (dem.width() < 2 && dem.height() < 2) {
    throw DomainError("slope_from_dem: a 1x1 DEM has no neighbours");
  }
  const GeoTransform& t = dem.transform();
  const double m_per_deg = kEarthRadiusM * std::numbers::pi / 180.0;
  Grid out(dem.geometry(), kNodata, kNodata);
  for (int row = 0; row < dem.height(); ++row) {
    double dx = 0.0;
    double dy = 0.0;
    if (options.pixel_size_m) {
      dx = dy = *options.pixel_size_m;
    } else {
      const double lat = t.center_lat(row) * std::numbers::pi / 180.0;
      dx = t.pixel_width * m_per_deg * std::cos(lat);
      dy = t.pixel_height * m_per_deg;
    }
    for (int col = 0; col < dem.width(); ++col) {
      if (!dem.valid(col, row)) {
        continue;
      }
      const double z = dem(col, row);
      double best_diff = -1.0;
      double best_dist = 0.0;
      bool any = false;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if ((dr == 0 && dc == 0) || !dem.contains(col + dc, row + dr) ||
              !dem.valid(col + dc, row + dr)) {
            continue;
          }
          const double diff = std::abs(dem(col + dc, row + dr) - z);
          const double dist = std::hypot(dc * dx, dr * dy);
          // Largest difference wins; among equal differences the closer neighbour.
          if (!any || diff > best_diff || (diff == best_diff && dist < best_dist)) {
            best_diff = diff;
            best_dist = dist;
            any = true;
          }
        }
      }
      if (any) {
        out(col, row) = std::atan(best_diff / best_dist) * 180.0 / std::numbers::pi;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Candidates

CandidateDecision evaluate_candidate(const PixelEvidence& e, const std::array<ThresholdBand, 3>& bands,
                                     const CandidateCriteria& c) {
  CandidateDecision d;
  const bool slope_ok = e.slope_deg.has_value() && *e.slope_deg < c.max_slope_deg;
  const bool count_ok = e.optical_count > c.min_optical_count_exclusive;
  if (!slope_ok || !count_ok) {
    return d;
  }
  bool inside_all = true;
  bool outside_all = true;
  for (std::size_t k = 0; k < 3; ++k) {
    if (!e.index_mean[k]) {
      return d;
    }
    const double v = *e.index_mean[k];
    inside_all = inside_all && v > bands[k].s_min && v < bands[k].s_max;
    outside_all = outside_all && (v < bands[k].ns_min || v > bands[k].ns_max);
  }
  d.settlement = inside_all &&
                 radar_gate_settlement(e.ascending_count, e.ascending_mean_db, c) &&
                 radar_gate_settlement(e.descending_count, e.descending_mean_db, c);
  d.non_settlement = outside_all &&
                     radar_gate_non_settlement(e.ascending_count, e.ascending_mean_db, c) &&
                     radar_gate_non_settlement(e.descending_count, e.descending_mean_db, c);
  return d;
}

CandidateMasks candidate_masks(const FeatureStack& optical, const FeatureStack& radar_ascending,
                               const FeatureStack& radar_descending, const Grid& climate,
                               const ThresholdTable& thresholds, const Grid& slope,
                               const CandidateCriteria& criteria) {
  const std::array<const Grid*, 3> means = {
      &optical.band(optical_band_name(SpectralIndex::kNdbi, Statistic::kMean)),
      &optical.band(optical_band_name(SpectralIndex::kNdvi, Statistic::kMean)),
      &optical.band(optical_band_name(SpectralIndex::kMndwi, Statistic::kMean))};
  const Grid& n_lc8 = optical.band(kOpticalCountBand);
  const Grid& asc_mean = radar_ascending.band(radar_band_name(Pass::kAscending, "mean"));
  const Grid& asc_count = radar_ascending.band(radar_count_band(Pass::kAscending));
  const Grid& desc_mean = radar_descending.band(radar_band_name(Pass::kDescending, "mean"));
  const Grid& desc_count = radar_descending.band(radar_count_band(Pass::kDescending));
  for (const Grid* g : {&n_lc8, &asc_mean, &asc_count, &desc_mean, &desc_count, &climate, &slope}) {
    require_same_grid(*g, *means[0], "candidate_masks");
  }
  thresholds.validate_coverage(climate_classes_in_use(climate));

  CandidateMasks out{Mask(n_lc8.geometry(), 0), Mask(n_lc8.geometry(), 0)};
  std::map<int, std::array<ThresholdBand, 3>> band_cache;
  for (std::size_t i = 0; i < n_lc8.size(); ++i) {
    if (climate.is_nodata(i)) {
      continue;
    }
    const int kg = static_cast<int>(std::lround(climate[i]));
    auto it = band_cache.find(kg);
    if (it == band_cache.end()) {
      std::array<ThresholdBand, 3> b{};
      for (std::size_t k = 0; k < 3; ++k) {
        b[k] = thresholds.get(kg, kThresholdIndices[k]);
      }
      it = band_cache.emplace(kg, b).first;
    }
    PixelEvidence e;
    for (std::size_t k = 0; k < 3; ++k) {
      e.index_mean[k] = value_at(*means[k], i);
    }
    e.optical_count = count_at(n_lc8, i);
    e.ascending_count = count_at(asc_count, i);
    e.ascending_mean_db = value_at(asc_mean, i);
    e.descending_count = count_at(desc_count, i);
    e.descending_mean_db = value_at(desc_mean, i);
    e.slope_deg = value_at(slope, i);
    const CandidateDecision d = evaluate_candidate(e, it->second, criteria);
    if (d.settlement && d.non_settlement) {
      throw ContractError("thresholds of climate class " + std::to_string(kg) +
                          " make settlement and non-settlement candidates overlap");
    }
    out.settlement[i] = d.settlement ? 1 : 0;
    out.non_settlement[i] = d.non_settlement ? 1 : 0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

TrainingSet::TrainingSet(std::vector<Sample> samples) {
  for (Sample& s : samples) {
    add(std::move(s));
  }
}

void TrainingSet::add(Sample sample) {
  if (samples_.empty()) {
    dims_ = sample.features.size();
  } else if (sample.features.size() != dims_) {
    throw ContractError("training sample dimensionality mismatch");
  }
  if (!locations_.insert({sample.col, sample.row}).second) {
    throw ContractError("duplicate training location (" + std::to_string(sample.col) + ", " +
                        std::to_string(sample.row) + ")");
  }
  samples_.push_back(std::move(sample));
}

std::size_t TrainingSet::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(samples_.begin(), samples_.end(),
                                                [label](const Sample& s) { return s.label == label; }));
}

TrainingSet sample_training(const CandidateMasks& masks, const FeatureStack& features,
                            std::size_t n_per_class, std::uint64_t seed, SamplingReport* report) {
  require_same_grid(masks.settlement, masks.non_settlement, "sample_training masks");
  if (features.empty() || !masks.settlement.same_grid(features.geometry())) {
    throw ContractError("sample_training: features are not on the candidate grid");
  }
  const int width = masks.settlement.width();
  std::vector<double> buffer(features.size());
  const auto usable = [&](const Mask& m) {
    std::vector<std::size_t> pixels;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] != 0 && features.pixel_vector(i, buffer)) {
        pixels.push_back(i);
      }
    }
    return pixels;
  };
  const std::vector<std::size_t> pools[2] = {usable(masks.settlement), usable(masks.non_settlement)};
  const Label labels[2] = {Label::kSettlement, Label::kNonSettlement};
  const char* names[2] = {"settlement", "non-settlement"};

  SamplingReport rep;
  rep.settlement_candidates = pools[0].size();
  rep.non_settlement_candidates = pools[1].size();
  Rng rng(seed);
  TrainingSet set;
  for (int k = 0; k < 2; ++k) {
    const auto& pool = pools[k];
    if (pool.empty()) {
      throw DomainError(std::string("no usable ") + names[k] + " training candidates");
    }
    if (pool.size() < n_per_class) {
      rep.shortage = true;
      log::warning(std::string("only ") + std::to_string(pool.size()) + " " + names[k] +
                   " candidates available, " + std::to_string(n_per_class) + " requested");
    }
    std::vector<std::size_t> picked;
    for (std::size_t j : rng.sample_indices(pool.size(), n_per_class)) {
      picked.push_back(pool[j]);
    }
    std::sort(picked.begin(), picked.end());
    for (std::size_t pixel : picked) {
      Sample s;
      s.col = static_cast<int>(pixel % static_cast<std::size_t>(width));
      s.row = static_cast<int>(pixel / static_cast<std::size_t>(width));
      s.features.resize(features.size());
      features.pixel_vector(pixel, s.features);
      s.label = labels[k];
      set.add(std::move(s));
    }
    (k == 0 ? rep.settlement_drawn : rep.non_settlement_drawn) = picked.size();
  }
  if (report != nullptr) {
    *report = rep;
  }
  return set;
}

}  // namespace wsf
