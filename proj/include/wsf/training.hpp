// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wsf/optical.hpp"
#include "wsf/raster.hpp"
#include "wsf/temporal.hpp"

namespace wsf {

/// Indices conditioned on climate when selecting training candidates.
inline constexpr std::array<SpectralIndex, 3> kThresholdIndices = {
    SpectralIndex::kNdbi, SpectralIndex::kNdvi, SpectralIndex::kMndwi};
inline constexpr int kClimateClassCount = 30;

/// Thresholds of one index for one climate class. Settlement candidates lie
/// strictly inside (s_min, s_max); non-settlement candidates strictly outside
/// [ns_min, ns_max].
struct ThresholdBand {
  double s_min = 0.0;
  double s_max = 0.0;
  double ns_min = 0.0;
  double ns_max = 0.0;
};

/// Per climate class (1..30) and index thresholds: 360 values when complete.
class ThresholdTable {
 public:
  void set(int climate_class, SpectralIndex index, const ThresholdBand& band);
  /// Throws ConfigError naming the class when it is missing.
  const ThresholdBand& get(int climate_class, SpectralIndex index) const;
  bool has_class(int climate_class) const;

  std::set<int> classes() const;
  /// Number of stored threshold values (4 per class and index).
  std::size_t threshold_count() const;
  bool complete() const { return threshold_count() == 4u * 3u * kClimateClassCount; }

  /// Every class in `classes_in_use` must carry all three indices.
  void validate_coverage(const std::set<int>& classes_in_use) const;

 private:
  static std::size_t slot(SpectralIndex index);
  std::map<int, std::array<std::optional<ThresholdBand>, 3>> rows_;
};

/// Parses the plain-text table (kg_class index s_min s_max ns_min ns_max).
ThresholdTable load_threshold_table(const std::filesystem::path& path);
void save_threshold_table(const ThresholdTable& table, const std::filesystem::path& path);

/// Demonstration table for synthetic scenes. Not derived from real data: the
/// same bands are repeated for all 30 classes.
ThresholdTable sample_threshold_table();

/// Distinct climate classes present (non-nodata) in a categorical raster.
std::set<int> climate_classes_in_use(const Grid& climate);

struct SlopeOptions {
  /// Ground spacing of one pixel in metres. Unset: derived from the
  /// geographic transform with latitude-corrected longitude spacing.
  std::optional<double> pixel_size_m;
};

/// Slope in degrees: the angle towards the 8-neighbour with the largest
/// absolute elevation difference. Border pixels use the neighbours they have.
Grid slope_from_dem(const Grid& dem, const SlopeOptions& options = {});

/// Constant gates of candidate selection.
struct CandidateCriteria {
  int min_optical_count_exclusive = 5;   // N_LC8 > 5
  int radar_count_gate = 5;              // radar gates apply when N >= 5
  double settlement_db_min = -7.0;       // settlement needs mean dB > this
  double non_settlement_db_max = -11.0;  // non-settlement needs mean dB < this
  double max_slope_deg = 10.0;           // slope < this
};

/// The per-pixel quantities the candidate rules look at.
struct PixelEvidence {
  std::array<std::optional<double>, 3> index_mean;  // NDBI, NDVI, MNDWI temporal means
  int optical_count = 0;
  int ascending_count = 0;
  std::optional<double> ascending_mean_db;
  int descending_count = 0;
  std::optional<double> descending_mean_db;
  std::optional<double> slope_deg;
};

struct CandidateDecision {
  bool settlement = false;
  bool non_settlement = false;
};

/// Candidate rules for a single pixel.
CandidateDecision evaluate_candidate(const PixelEvidence& evidence,
                                     const std::array<ThresholdBand, 3>& bands,
                                     const CandidateCriteria& criteria);

struct CandidateMasks {
  Mask settlement;
  Mask non_settlement;
};

/// Candidate training masks over co-registered optical and radar stacks,
/// the climate raster and the slope grid. Throws ConfigError when a climate
/// class is missing from `thresholds`, ContractError when the resulting masks
/// overlap.
CandidateMasks candidate_masks(const FeatureStack& optical, const FeatureStack& radar_ascending,
                               const FeatureStack& radar_descending, const Grid& climate,
                               const ThresholdTable& thresholds, const Grid& slope,
                               const CandidateCriteria& criteria = {});

enum class Label : std::uint8_t { kNonSettlement = 0, kSettlement = 1 };

struct Sample {
  int col = 0;
  int row = 0;
  std::vector<double> features;
  Label label = Label::kNonSettlement;
};

/// Labelled feature vectors of one classifier; unique pixel locations per set.
class TrainingSet {
 public:
  TrainingSet() = default;
  explicit TrainingSet(std::vector<Sample> samples);

  void add(Sample sample);
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::size_t dimensions() const { return dims_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t count(Label label) const;

 private:
  std::vector<Sample> samples_;
  std::size_t dims_ = 0;
  std::set<std::pair<int, int>> locations_;
};

struct SamplingReport {
  std::size_t settlement_candidates = 0;
  std::size_t non_settlement_candidates = 0;
  std::size_t settlement_drawn = 0;
  std::size_t non_settlement_drawn = 0;
  bool shortage = false;
};

/// Uniform sampling without replacement of up to `n_per_class` candidate
/// pixels per class, with feature vectors read from `features`. Candidates
/// with an incomplete feature vector are skipped. Throws DomainError when a
/// class has no usable candidate.
TrainingSet sample_training(const CandidateMasks& masks, const FeatureStack& features,
                            std::size_t n_per_class, std::uint64_t seed,
                            SamplingReport* report = nullptr);

}  // namespace wsf
