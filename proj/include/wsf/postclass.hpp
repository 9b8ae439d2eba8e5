// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wsf/objects.hpp"
#include "wsf/raster.hpp"

namespace wsf {

/// Layers voting for settlement presence.
enum class AgreementRole { kDlrRc, kCil, kOsmS, kOsmR, kGl30S, kNlcd };
/// Layers vetoing settlement presence (roads mask, water, wetlands).
enum class ExclusionRole { kDlrRm, kGlc30W, kGlc30Wl };

std::string_view role_name(AgreementRole role);
std::string_view role_name(ExclusionRole role);

/// Binary reference rasters on the unit grid, at most one per role.
class ReferenceLayerSet {
 public:
  /// Adds a layer by role name ("OSM-S", "GLC30-W", ...; case-insensitive).
  /// Throws ConfigError for unknown or repeated roles, ContractError for a
  /// layer on a different grid.
  void add(std::string_view role, Mask layer);
  void add(AgreementRole role, Mask layer);
  void add(ExclusionRole role, Mask layer);

  std::size_t agreement_count() const { return agreement_.size(); }
  std::size_t exclusion_count() const { return exclusion_.size(); }
  const std::map<AgreementRole, Mask>& agreement_layers() const { return agreement_; }
  const std::map<ExclusionRole, Mask>& exclusion_layers() const { return exclusion_; }
  std::optional<GridGeometry> geometry() const;

 private:
  void check_grid(const Mask& layer) const;
  std::map<AgreementRole, Mask> agreement_;
  std::map<ExclusionRole, Mask> exclusion_;
};

/// Positive where at least two agreement layers are positive. ConfigError
/// with fewer than two layers.
Mask agreement_mask(const ReferenceLayerSet& layers);

/// Positive where any exclusion layer is positive. ConfigError without
/// exclusion layers.
Mask exclusion_mask(const ReferenceLayerSet& layers);

struct RemovalThresholds {
  double min_agreement_overlap = 0.30;  // R1: agreement fraction below this
  double max_exclusion_overlap = 0.30;  // R1: and exclusion fraction above this
  double max_ndvi_mean = 0.6;           // R2: zonal NDVI mean above this
  double min_backscatter_db = -11.0;    // R3: zonal dB mean of a pass below this
};

/// Which rules are evaluated on a given object set.
struct RuleSelection {
  bool r1 = true;
  bool r2 = true;
  bool r3 = true;
};

struct FilterReport {
  std::size_t objects_in = 0;
  std::size_t objects_kept = 0;
  // An object violating several rules is counted under each of them.
  std::size_t removed_r1 = 0;
  std::size_t removed_r2 = 0;
  std::size_t removed_r3 = 0;
  std::size_t pixels_removed = 0;
};

/// Rasters the removal rules read; all on the object grid.
struct FilterEvidence {
  const Mask* agreement = nullptr;
  const Mask* exclusion = nullptr;
  const Grid* ndvi_mean = nullptr;
  const Grid* s1_mean_ascending = nullptr;
  const Grid* s1_mean_descending = nullptr;
};

/// Removes objects violating a selected rule:
///   R1: agreement overlap < 30% and exclusion overlap > 30% of the object,
///   R2: zonal mean NDVI > 0.6,
///   R3: zonal mean dB of a pass with valid samples over the object < -11.
/// Survivors keep their labels. Evidence needed by a selected rule must be
/// present (ContractError otherwise).
ObjectSet filter_objects(const ObjectSet& objects, const FilterEvidence& evidence,
                         const RuleSelection& rules = {}, const RemovalThresholds& thresholds = {},
                         FilterReport* report = nullptr);

/// Pixel-wise union of the footprints of two object sets.
Mask merge_maps(const ObjectSet& optical_objects, const ObjectSet& radar_objects);

/// Pixel-wise union of two masks on one grid.
Mask mask_union(const Mask& a, const Mask& b);

}  // namespace wsf
