// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsf/raster.hpp"
#include "wsf/training.hpp"

namespace wsf {

// ---------------------------------------------------------------- sampling

struct TileSummary {
  std::string id;
  std::size_t object_count = 0;  // disjoint settlement clusters
  double area = 0.0;             // settlement area, any consistent unit
};

struct Stratum {
  int index = 0;  // 1-based
  double lower = 0.0;
  double upper = 0.0;
  std::size_t eligible = 0;
  std::optional<std::string> tile;
};

struct Stratification {
  std::vector<double> percentiles;  // P_0 .. P_100
  std::vector<Stratum> strata;
  std::size_t skipped_tiles = 0;    // tiles without settlement area
  std::size_t empty_strata = 0;

  std::vector<std::string> selected() const;
};

/// Linear-interpolation percentile of sorted data, p in [0, 100].
double percentile_sorted(std::span<const double> sorted, double p);

/// Draws one tile per stratum ]P_{2(i-1)}, P_{2i}] of the object-count to
/// area ratio (the first stratum also takes P_0). A degenerate stratum
/// (equal bounds) holds the tiles whose ratio equals the bound. A tile is
/// never drawn twice; empty strata yield no tile and are counted. Tiles
/// without settlement area are skipped. DomainError with fewer than
/// `strata` usable tiles.
Stratification stratify_tiles(std::span<const TileSummary> tiles, std::uint64_t seed, int strata = 50);

struct BlockCenter {
  int col = 0;
  int row = 0;
  Label map_class = Label::kNonSettlement;
};

/// Stratified uniform draw of distinct block centers whose 3x3 block lies
/// inside the mask: settlement centers first, then non-settlement, each in
/// raster order. DomainError with the available counts when a class is short.
std::vector<BlockCenter> draw_samples(const Mask& mask, std::size_t n_settlement,
                                      std::size_t n_non_settlement, std::uint64_t seed);

// --------------------------------------------------------------- response

enum class ReferenceLabel : std::uint8_t { kBuildings, kBuildingLots, kRoadsPaved, kNone };
char label_code(ReferenceLabel label);
/// 'B', 'L', 'R' or 'N' (case-insensitive); FormatError otherwise.
ReferenceLabel parse_reference_label(char code);

enum class SettlementDefinition { kBuildingsOnly, kBuildingsAndLots, kBuildingsLotsRoads };
inline constexpr std::array<SettlementDefinition, 3> kAllDefinitions = {
    SettlementDefinition::kBuildingsOnly, SettlementDefinition::kBuildingsAndLots,
    SettlementDefinition::kBuildingsLotsRoads};
inline constexpr std::array<int, 4> kAllCriteria = {1, 2, 3, 4};
std::string_view definition_name(SettlementDefinition definition);

/// Whether a reference cell counts as settlement under `definition`.
bool is_settlement(ReferenceLabel label, SettlementDefinition definition);

/// 3x3 assessment unit; cells in row-major order.
struct AssessmentBlock {
  double lon = 0.0;
  double lat = 0.0;
  std::array<ReferenceLabel, 9> reference{};
  std::array<bool, 9> classified{};
};

/// Settlement is the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  void add(bool classified, bool reference);
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Outcome of one block as confusion counts: nine cell units for criterion
/// 1, one block unit for criteria 2-4. The block agrees iff fp == fn == 0.
///   1: cell by cell;  2: majority on both sides;
///   3: classification majority vs reference any-cell;  4: any-cell on both.
ConfusionMatrix block_agreement(const AssessmentBlock& block, SettlementDefinition definition,
                                int criterion);

/// Classification values of the 3x3 block centred on (col, row) of the cell
/// grid, looked up by nearest value in `map` (which may be coarser).
std::array<bool, 9> block_classification(const Mask& map, const GridGeometry& cells, int col, int row);

// ---------------------------------------------------------------- metrics

struct AccuracyMetrics {
  std::optional<double> kappa;
  std::optional<double> pa_settlement;      // percent
  std::optional<double> pa_non_settlement;  // percent
  std::optional<double> ua_settlement;      // percent
  std::optional<double> ua_non_settlement;  // percent
  std::optional<double> average_accuracy;   // percent
  std::string category;                     // Landis-Koch, empty without kappa
};

/// Verbal agreement class of a kappa value.
std::string_view landis_koch(double kappa);

/// Ratios with a zero denominator are left unset. ContractError on an empty
/// matrix.
AccuracyMetrics compute_metrics(const ConfusionMatrix& matrix);

// ----------------------------------------------------------------- report

/// Confusion matrices for every (definition, criterion) combination.
class ValidationReport {
 public:
  void add_block(const AssessmentBlock& block);
  void merge(const ValidationReport& other);

  const ConfusionMatrix& matrix(SettlementDefinition definition, int criterion) const;
  std::size_t blocks() const { return blocks_; }
  /// Cells assessed under criterion 1 (nine per block).
  std::uint64_t assessed_cells() const;

  /// CSV with one row per combination: definition, criterion, tp, fp, fn, tn
  /// and the six metrics; undefined metrics are empty fields.
  void write_csv(const std::filesystem::path& path) const;
  std::string to_csv() const;

 private:
  std::map<std::pair<SettlementDefinition, int>, ConfusionMatrix> matrices_;
  std::size_t blocks_ = 0;
};

/// Reference records: "lon lat c0 .. c8" per line, '#' starts a comment.
std::vector<AssessmentBlock> load_reference_blocks(const std::filesystem::path& path);
void save_reference_blocks(std::span<const AssessmentBlock> blocks, const std::filesystem::path& path);

/// Fills the classification side of each block from `map`, locating the
/// block center on `cells`. Blocks not fully inside `cells` are a DomainError.
void classify_blocks(std::vector<AssessmentBlock>& blocks, const Mask& map, const GridGeometry& cells);

}  // namespace wsf
