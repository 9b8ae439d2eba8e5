// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/postclass.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace wsf {

namespace {

struct AgreementEntry {
  AgreementRole role;
  std::string_view name;
};
struct ExclusionEntry {
  ExclusionRole role;
  std::string_view name;
};

constexpr std::array<AgreementEntry, 6> kAgreementRoles = {{
    {AgreementRole::kDlrRc, "DLR-RC"},
    {AgreementRole::kCil, "CIL"},
    {AgreementRole::kOsmS, "OSM-S"},
    {AgreementRole::kOsmR, "OSM-R"},
    {AgreementRole::kGl30S, "GL30-S"},
    {AgreementRole::kNlcd, "NLCD"},
}};
constexpr std::array<ExclusionEntry, 3> kExclusionRoles = {{
    {ExclusionRole::kDlrRm, "DLR-RM"},
    {ExclusionRole::kGlc30W, "GLC30-W"},
    {ExclusionRole::kGlc30Wl, "GLC30-WL"},
}};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

std::string_view role_name(AgreementRole role) {
  return kAgreementRoles[static_cast<std::size_t>(role)].name;
}

std::string_view role_name(ExclusionRole role) {
  return kExclusionRoles[static_cast<std::size_t>(role)].name;
}

void ReferenceLayerSet::check_grid(const Mask& layer) const {
  const std::optional<GridGeometry> g = geometry();
  if (g && !layer.same_grid(*g)) {
    throw ContractError("reference layer is not on the unit grid");
  }
}

void ReferenceLayerSet::add(std::string_view role, Mask layer) {
  std::string key = upper(role);
  if (key == "GLC30-S") {
    key = "GL30-S";
  }
  for (const AgreementEntry& e : kAgreementRoles) {
    if (e.name == key) {
      add(e.role, std::move(layer));
      return;
    }
  }
  for (const ExclusionEntry& e : kExclusionRoles) {
    if (e.name == key) {
      add(e.role, std::move(layer));
      return;
    }
  }
  throw ConfigError("unknown reference layer role '" + std::string(role) + "'");
}

void ReferenceLayerSet::add(AgreementRole role, Mask layer) {
  if (agreement_.contains(role)) {
    throw ConfigError("reference role " + std::string(role_name(role)) + " given twice");
  }
  check_grid(layer);
  agreement_.emplace(role, std::move(layer));
}

void ReferenceLayerSet::add(ExclusionRole role, Mask layer) {
  if (exclusion_.contains(role)) {
    throw ConfigError("reference role " + std::string(role_name(role)) + " given twice");
  }
  check_grid(layer);
  exclusion_.emplace(role, std::move(layer));
}

std::optional<GridGeometry> ReferenceLayerSet::geometry() const {
  if (!agreement_.empty()) {
    return agreement_.begin()->second.geometry();
  }
  if (!exclusion_.empty()) {
    return exclusion_.begin()->second.geometry();
  }
  return std::nullopt;
}

Mask agreement_mask(const ReferenceLayerSet& layers) {
  if (layers.agreement_count() < 2) {
    throw ConfigError("agreement mask needs at least two agreement layers, got " +
                      std::to_string(layers.agreement_count()));
  }
  const GridGeometry g = *layers.geometry();
  std::vector<std::uint8_t> votes(g.size(), 0);
  for (const auto& [role, layer] : layers.agreement_layers()) {
    for (std::size_t i = 0; i < votes.size(); ++i) {
      votes[i] += layer[i] != 0 ? 1 : 0;
    }
  }
  Mask out(g, 0);
  for (std::size_t i = 0; i < votes.size(); ++i) {
    out[i] = votes[i] >= 2 ? 1 : 0;
  }
  return out;
}

Mask exclusion_mask(const ReferenceLayerSet& layers) {
  if (layers.exclusion_count() == 0) {
    throw ConfigError("exclusion mask needs at least one exclusion layer");
  }
  Mask out(*layers.geometry(), 0);
  for (const auto& [role, layer] : layers.exclusion_layers()) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] |= layer[i] != 0 ? 1 : 0;
    }
  }
  return out;
}

ObjectSet filter_objects(const ObjectSet& objects, const FilterEvidence& evidence,
                         const RuleSelection& rules, const RemovalThresholds& thresholds,
                         FilterReport* report) {
  const std::size_t n = objects.objects.size();
  std::vector<bool> remove(n, false);
  FilterReport rep;
  rep.objects_in = n;

  if (rules.r1) {
    if (evidence.agreement == nullptr || evidence.exclusion == nullptr) {
      throw ContractError("filter_objects: R1 needs agreement and exclusion masks");
    }
    const std::vector<double> agree = overlap_fractions(objects, *evidence.agreement);
    const std::vector<double> excl = overlap_fractions(objects, *evidence.exclusion);
    for (std::size_t k = 0; k < n; ++k) {
      if (agree[k] < thresholds.min_agreement_overlap && excl[k] > thresholds.max_exclusion_overlap) {
        remove[k] = true;
        ++rep.removed_r1;
      }
    }
  }
  if (rules.r2) {
    if (evidence.ndvi_mean == nullptr) {
      throw ContractError("filter_objects: R2 needs the NDVI temporal mean");
    }
    const std::vector<std::optional<double>> ndvi = zonal_means(objects, *evidence.ndvi_mean);
    for (std::size_t k = 0; k < n; ++k) {
      if (ndvi[k] && *ndvi[k] > thresholds.max_ndvi_mean) {
        remove[k] = true;
        ++rep.removed_r2;
      }
    }
  }
  if (rules.r3) {
    if (evidence.s1_mean_ascending == nullptr && evidence.s1_mean_descending == nullptr) {
      throw ContractError("filter_objects: R3 needs at least one backscatter mean");
    }
    std::vector<bool> hit(n, false);
    for (const Grid* g : {evidence.s1_mean_ascending, evidence.s1_mean_descending}) {
      if (g == nullptr) {
        continue;
      }
      const std::vector<std::optional<double>> db = zonal_means(objects, *g);
      for (std::size_t k = 0; k < n; ++k) {
        if (db[k] && *db[k] < thresholds.min_backscatter_db) {
          hit[k] = true;
        }
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (hit[k]) {
        remove[k] = true;
        ++rep.removed_r3;
      }
    }
  }

  ObjectSet out;
  out.labels = objects.labels;
  std::int32_t max_label = 0;
  for (const ObjectRecord& o : objects.objects) {
    max_label = std::max(max_label, o.label);
  }
  std::vector<bool> drop_label(static_cast<std::size_t>(max_label) + 1, false);
  for (std::size_t k = 0; k < n; ++k) {
    if (remove[k]) {
      drop_label[static_cast<std::size_t>(objects.objects[k].label)] = true;
      rep.pixels_removed += objects.objects[k].pixel_count;
    } else {
      out.objects.push_back(objects.objects[k]);
    }
  }
  for (std::int32_t& l : out.labels.values()) {
    if (l > 0 && l <= max_label && drop_label[static_cast<std::size_t>(l)]) {
      l = 0;
    }
  }
  rep.objects_kept = out.objects.size();
  if (report != nullptr) {
    *report = rep;
  }
  return out;
}

Mask mask_union(const Mask& a, const Mask& b) {
  require_same_grid(a, b, "mask_union");
  Mask out(a.geometry(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (a[i] != 0 || b[i] != 0) ? 1 : 0;
  }
  return out;
}

Mask merge_maps(const ObjectSet& optical_objects, const ObjectSet& radar_objects) {
  require_same_grid(optical_objects.labels, radar_objects.labels, "merge_maps");
  return mask_union(optical_objects.footprint(), radar_objects.footprint());
}

}  // namespace wsf
