// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsf/ensemble.hpp"
#include "wsf/objects.hpp"
#include "wsf/optical.hpp"
#include "wsf/postclass.hpp"
#include "wsf/radar.hpp"
#include "wsf/training.hpp"

namespace wsf {

/// Which S1 pass feeds the radar classifier.
enum class RadarPassChoice { kAuto, kAscending, kDescending };

struct HyperGridSpec {
  int c_exponent_min = 0;
  int c_exponent_max = 13;
  double gamma_step = 0.1;
  int gamma_count = 20;

  HyperGrid build() const;
};

struct PipelineConfig {
  std::uint64_t seed = 2015;
  int workers = 1;
  double unit_size_deg = 1.0;

  /// Unset: the built-in demonstration table is used (with a warning).
  std::optional<std::filesystem::path> threshold_table;

  OpticalStackOptions optical;
  RadarStackOptions radar;
  RadarPassChoice radar_pass = RadarPassChoice::kAuto;
  CandidateCriteria candidates;

  std::size_t members = 20;
  int vote_threshold = 11;
  std::size_t samples_per_class = 500;
  int folds = 5;
  HyperGridSpec grid;
  SmoOptions smo;

  bool post_classification = true;
  Connectivity connectivity = Connectivity::kEight;
  RemovalThresholds removal;
  RuleSelection optical_rules{true, false, true};
  RuleSelection radar_rules{true, true, false};

  std::vector<int> downsample_factors = {10, 25, 50, 100, 1000};
  std::string product_prefix = "WSF";

  EnsembleOptions ensemble_options() const;
  void validate() const;
};

/// Strict parse: unknown keys and out-of-range values are ConfigErrors.
/// Relative threshold-table paths resolve against `base_dir`.
PipelineConfig config_from_json(const nlohmann::json& doc,
                                const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const PipelineConfig& config);

}  // namespace wsf
