// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsf/config.hpp"
#include "wsf/ensemble.hpp"
#include "wsf/optical.hpp"
#include "wsf/postclass.hpp"
#include "wsf/radar.hpp"
#include "wsf/training.hpp"

namespace wsf {

/// Geographic extent in degrees.
struct Bounds {
  double west = 0.0;
  double north = 0.0;
  double east = 0.0;
  double south = 0.0;

  static Bounds of(const GridGeometry& g);
};

/// One independently processed tile and where its inputs live.
struct WorkingUnit {
  std::string id;
  Bounds bounds;
  std::filesystem::path optical_manifest;
  std::filesystem::path radar_manifest;
  std::filesystem::path climate;
  std::filesystem::path dem;
  std::optional<std::filesystem::path> references;
};

/// Reads unit.json; relative paths resolve against its directory.
WorkingUnit load_working_unit(const std::filesystem::path& path);
/// Writes unit.json with paths relative to its directory where possible.
void save_working_unit(const WorkingUnit& unit, const std::filesystem::path& path);

/// Everything a unit run consumes, in memory.
struct UnitInputs {
  std::string id;
  std::vector<SpectralScene> optical;
  std::vector<RadarScene> radar;
  Grid climate;
  Grid dem;
  ReferenceLayerSet references;
};

/// Manifests are whitespace-separated text, one record per line, '#' for
/// comments, paths relative to the manifest:
///   optical:    timestamp cloud_cover blue green red nir swir1 swir2 validity
///   radar:      timestamp pass units path [validity]
///   references: role path
UnitInputs load_unit_inputs(const WorkingUnit& unit);
std::vector<SpectralScene> load_optical_manifest(const std::filesystem::path& path);
std::vector<RadarScene> load_radar_manifest(const std::filesystem::path& path);
ReferenceLayerSet load_reference_manifest(const std::filesystem::path& path);

/// Grid of the output product: the radar grid when radar scenes exist,
/// otherwise the optical grid.
GridGeometry product_geometry(const UnitInputs& inputs);

/// Features of a unit on the product grid.
struct UnitFeatures {
  GridGeometry geometry;
  FeatureStack optical;  // resampled from the optical grid
  FeatureStack radar_ascending;
  FeatureStack radar_descending;
  Grid slope;
  Grid climate;
  std::size_t optical_scenes_used = 0;
  std::size_t optical_scenes_rejected = 0;
};

UnitFeatures compute_features(const UnitInputs& inputs, const PipelineConfig& config);

/// Threshold table named by the config, or the demonstration table.
ThresholdTable resolve_thresholds(const PipelineConfig& config);

CandidateMasks select_candidates(const UnitFeatures& features, const ThresholdTable& thresholds,
                                 const PipelineConfig& config);

/// Pass whose stack feeds the radar classifier.
Pass choose_radar_pass(const UnitFeatures& features, RadarPassChoice choice);

struct ClassifierOutput {
  EnsembleModel model;
  std::vector<MemberReport> members;
  Mask map;
};

struct Classification {
  ClassifierOutput optical;
  ClassifierOutput radar;
  Pass radar_pass = Pass::kAscending;
};

Classification classify_unit(const UnitFeatures& features, const CandidateMasks& candidates,
                             const PipelineConfig& config);

struct PostclassOutput {
  Mask fused;
  FilterReport optical;
  FilterReport radar;
  std::vector<std::string> notes;
};

/// Object-based fusion of the two maps (or their plain union when
/// post-classification is disabled).
PostclassOutput postclass_unit(const UnitFeatures& features, const Mask& optical_map,
                               const Mask& radar_map, const ReferenceLayerSet& references,
                               const PipelineConfig& config);

enum class UnitStatus { kSettlement, kEmpty, kUnclassifiable, kFailed };
std::string_view status_name(UnitStatus status);

struct UnitResult {
  std::string id;
  UnitStatus status = UnitStatus::kFailed;
  std::optional<Mask> mask;
  std::string stage;    // failing stage, when failed
  std::string message;  // diagnostic
  nlohmann::json provenance;
};

/// Features, candidates, two ensembles, two maps and fusion, in that order.
/// Stage errors are caught and reported in the result.
UnitResult run_unit(const UnitInputs& inputs, const PipelineConfig& config);

/// Loads the unit, runs it and writes `<name>.tif` (only when the mask has a
/// settlement pixel) and `<name>_provenance.json` into `out_dir`.
UnitResult run_unit_to_disk(const WorkingUnit& unit, const PipelineConfig& config,
                            const std::filesystem::path& out_dir);

/// "<prefix>_<id>_e010_n60_e020_n50": upper-left then lower-right corner.
std::string product_name(const std::string& prefix, const std::string& id, const Bounds& bounds);

/// Union of unit masks on one global lattice. Units must share pixel sizes
/// and align to whole pixels; overlapping pixels must agree.
Mask mosaic(std::span<const Mask> units);

/// Writes each band as <dir>/<name>.tif plus <dir>/bands.txt listing them.
void save_feature_stack(const FeatureStack& stack, const std::filesystem::path& dir);
FeatureStack load_feature_stack(const std::filesystem::path& dir);

}  // namespace wsf
