// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wsf/log.hpp"
#include "wsf/objects.hpp"
#include "wsf/random.hpp"
#include "wsf/raster_io.hpp"
#include "wsf/resample.hpp"

namespace wsf {

namespace fs = std::filesystem;
using nlohmann::json;

Bounds Bounds::of(const GridGeometry& g) {
  const GeoTransform& t = g.transform;
  return {t.origin_lon, t.origin_lat, t.origin_lon + g.width * t.pixel_width,
          t.origin_lat - g.height * t.pixel_height};
}

// ------------------------------------------------------------------- unit

namespace {

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_relative() ? base / p : p;
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  const fs::path rel = p.lexically_relative(base);
  return rel.empty() || rel.native().starts_with("..") ? p.string() : rel.string();
}

/// Non-empty, comment-stripped lines split into tokens.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_records(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open manifest " + path.string());
  }
  std::vector<std::pair<std::size_t, std::vector<std::string>>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const std::size_t hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    for (std::string t; ss >> t;) {
      tokens.push_back(t);
    }
    if (!tokens.empty()) {
      out.emplace_back(n, std::move(tokens));
    }
  }
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) {
      return v;
    }
  } catch (const std::exception&) {
  }
  throw FormatError(where + ": bad number '" + s + "'");
}

}  // namespace

WorkingUnit load_working_unit(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open unit " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
    const fs::path base = path.parent_path();
    WorkingUnit u;
    u.id = doc.at("id").get<std::string>();
    const std::vector<double> b = doc.at("bounds").get<std::vector<double>>();
    if (b.size() != 4) {
      throw ConfigError(path.string() + ": bounds must be [west, north, east, south]");
    }
    u.bounds = {b[0], b[1], b[2], b[3]};
    u.optical_manifest = resolve(base, doc.at("optical").get<std::string>());
    u.radar_manifest = resolve(base, doc.at("radar").get<std::string>());
    u.climate = resolve(base, doc.at("climate").get<std::string>());
    u.dem = resolve(base, doc.at("dem").get<std::string>());
    if (doc.contains("references") && !doc.at("references").is_null()) {
      u.references = resolve(base, doc.at("references").get<std::string>());
    }
    return u;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void save_working_unit(const WorkingUnit& u, const fs::path& path) {
  const fs::path base = path.parent_path();
  json doc;
  doc["id"] = u.id;
  doc["bounds"] = {u.bounds.west, u.bounds.north, u.bounds.east, u.bounds.south};
  doc["optical"] = relative_to(u.optical_manifest, base);
  doc["radar"] = relative_to(u.radar_manifest, base);
  doc["climate"] = relative_to(u.climate, base);
  doc["dem"] = relative_to(u.dem, base);
  doc["references"] = u.references ? json(relative_to(*u.references, base)) : json(nullptr);
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot create " + path.string());
  }
  out << doc.dump(2) << '\n';
}

std::vector<SpectralScene> load_optical_manifest(const fs::path& path) {
  const fs::path base = path.parent_path();
  std::vector<SpectralScene> scenes;
  for (const auto& [line, t] : read_records(path)) {
    const std::string where = path.string() + ":" + std::to_string(line);
    if (t.size() != 9) {
      throw FormatError(where + ": expected 9 fields, found " + std::to_string(t.size()));
    }
    SpectralScene s;
    s.timestamp = parse_timestamp(t[0]);
    s.cloud_cover = parse_number(t[1], where);
    for (std::size_t b = 0; b < kBandCount; ++b) {
      s.bands[b] = read_grid(resolve(base, t[2 + b]));
    }
    s.validity = read_mask(resolve(base, t[8]));
    s.validate();
    scenes.push_back(std::move(s));
  }
  return scenes;
}

std::vector<RadarScene> load_radar_manifest(const fs::path& path) {
  const fs::path base = path.parent_path();
  std::vector<RadarScene> scenes;
  for (const auto& [line, t] : read_records(path)) {
    const std::string where = path.string() + ":" + std::to_string(line);
    if (t.size() != 4 && t.size() != 5) {
      throw FormatError(where + ": expected 4 or 5 fields, found " + std::to_string(t.size()));
    }
    RadarScene s;
    s.timestamp = parse_timestamp(t[0]);
    s.pass = parse_pass(t[1]);
    if (t[2] == "db" || t[2] == "dB") {
      s.units = BackscatterUnits::kDecibel;
    } else if (t[2] == "linear") {
      s.units = BackscatterUnits::kLinear;
    } else {
      throw FormatError(where + ": units must be 'db' or 'linear'");
    }
    s.backscatter = read_grid(resolve(base, t[3]));
    if (t.size() == 5) {
      s.validity = read_mask(resolve(base, t[4]));
    }
    scenes.push_back(std::move(s));
  }
  return scenes;
}

ReferenceLayerSet load_reference_manifest(const fs::path& path) {
  const fs::path base = path.parent_path();
  ReferenceLayerSet set;
  for (const auto& [line, t] : read_records(path)) {
    if (t.size() != 2) {
      throw FormatError(path.string() + ":" + std::to_string(line) + ": expected 'role path'");
    }
    set.add(t[0], read_mask(resolve(base, t[1])));
  }
  log::info(path.string() + ": " + std::to_string(set.agreement_count()) + " agreement and " +
            std::to_string(set.exclusion_count()) + " exclusion layers");
  return set;
}

UnitInputs load_unit_inputs(const WorkingUnit& unit) {
  UnitInputs in;
  in.id = unit.id;
  in.optical = load_optical_manifest(unit.optical_manifest);
  in.radar = load_radar_manifest(unit.radar_manifest);
  in.climate = read_grid(unit.climate);
  in.dem = read_grid(unit.dem);
  if (unit.references) {
    in.references = load_reference_manifest(*unit.references);
  } else {
    log::warning("unit " + unit.id + " has no reference layers; rule R1 will be skipped");
  }
  return in;
}

GridGeometry product_geometry(const UnitInputs& inputs) {
  if (!inputs.radar.empty()) {
    return inputs.radar.front().backscatter.geometry();
  }
  if (!inputs.optical.empty()) {
    return inputs.optical.front().validity.geometry();
  }
  throw DomainError("unit " + inputs.id + " has neither optical nor radar scenes");
}

// --------------------------------------------------------------- features

namespace {

Grid on_grid(const Grid& g, const GridGeometry& target) {
  return g.same_grid(target) ? g : resample_nearest(g, target);
}

}  // namespace

UnitFeatures compute_features(const UnitInputs& inputs, const PipelineConfig& config) {
  UnitFeatures f;
  f.geometry = product_geometry(inputs);

  std::vector<SpectralScene> usable;
  for (const SpectralScene& s : inputs.optical) {
    if (s.cloud_cover >= config.optical.max_cloud_cover) {
      ++f.optical_scenes_rejected;
      log::info("skipping optical scene " + format_timestamp(s.timestamp) + " with " +
                std::to_string(s.cloud_cover) + "% cloud cover");
    } else {
      usable.push_back(s);
    }
  }
  f.optical_scenes_used = usable.size();
  if (usable.empty()) {
    throw DomainError("no optical scene below the cloud-cover limit");
  }
  f.optical = build_optical_stack(usable, config.optical).resampled(f.geometry);

  std::vector<RadarScene> radar = inputs.radar;
  for (RadarScene& s : radar) {
    if (s.units == BackscatterUnits::kLinear) {
      s.backscatter = to_decibel(s.backscatter);
      s.units = BackscatterUnits::kDecibel;
    }
  }
  f.radar_ascending = build_radar_stack(radar, Pass::kAscending, f.geometry, config.radar);
  f.radar_descending = build_radar_stack(radar, Pass::kDescending, f.geometry, config.radar);

  f.slope = on_grid(slope_from_dem(inputs.dem), f.geometry);
  f.climate = on_grid(inputs.climate, f.geometry);
  return f;
}

ThresholdTable resolve_thresholds(const PipelineConfig& config) {
  if (config.threshold_table) {
    return load_threshold_table(*config.threshold_table);
  }
  log::warning("no threshold table configured; using the demonstration table");
  return sample_threshold_table();
}

CandidateMasks select_candidates(const UnitFeatures& f, const ThresholdTable& thresholds,
                                 const PipelineConfig& config) {
  return candidate_masks(f.optical, f.radar_ascending, f.radar_descending, f.climate, thresholds,
                         f.slope, config.candidates);
}

Pass choose_radar_pass(const UnitFeatures& f, RadarPassChoice choice) {
  if (choice == RadarPassChoice::kAscending) {
    return Pass::kAscending;
  }
  if (choice == RadarPassChoice::kDescending) {
    return Pass::kDescending;
  }
  const auto median_count = [](const FeatureStack& s, Pass p) {
    std::vector<double> v(s.band(radar_count_band(p)).values().begin(),
                          s.band(radar_count_band(p)).values().end());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
  };
  return median_count(f.radar_descending, Pass::kDescending) >
                 median_count(f.radar_ascending, Pass::kAscending)
             ? Pass::kDescending
             : Pass::kAscending;
}

Classification classify_unit(const UnitFeatures& f, const CandidateMasks& candidates,
                             const PipelineConfig& config) {
  Classification c;
  const EnsembleOptions options = config.ensemble_options();
  c.optical.model = train_ensemble(candidates, f.optical, options, derive_seed(config.seed, "optical"),
                                   &c.optical.members);
  c.optical.map = classify_map(c.optical.model, f.optical, config.workers);

  c.radar_pass = choose_radar_pass(f, config.radar_pass);
  const FeatureStack& radar = c.radar_pass == Pass::kAscending ? f.radar_ascending : f.radar_descending;
  c.radar.model = train_ensemble(candidates, radar, options, derive_seed(config.seed, "radar"),
                                 &c.radar.members);
  c.radar.map = classify_map(c.radar.model, radar, config.workers);
  return c;
}

PostclassOutput postclass_unit(const UnitFeatures& f, const Mask& optical_map, const Mask& radar_map,
                               const ReferenceLayerSet& references, const PipelineConfig& config) {
  require_same_grid(optical_map, radar_map, "postclass_unit");
  PostclassOutput out;
  if (!config.post_classification) {
    out.fused = mask_union(optical_map, radar_map);
    out.notes.push_back("post-classification disabled");
    return out;
  }

  std::optional<Mask> agreement;
  std::optional<Mask> exclusion;
  if (references.agreement_count() >= 2 && references.exclusion_count() >= 1) {
    if (!references.geometry()->matches(f.geometry)) {
      throw ContractError("reference layers are not on the product grid");
    }
    agreement = agreement_mask(references);
    exclusion = exclusion_mask(references);
  } else {
    out.notes.push_back("R1 skipped: needs two agreement layers and one exclusion layer");
    log::warning(out.notes.back());
  }

  FilterEvidence evidence;
  evidence.agreement = agreement ? &*agreement : nullptr;
  evidence.exclusion = exclusion ? &*exclusion : nullptr;
  evidence.ndvi_mean = &f.optical.band(optical_band_name(SpectralIndex::kNdvi, Statistic::kMean));
  evidence.s1_mean_ascending = &f.radar_ascending.band(radar_band_name(Pass::kAscending, "mean"));
  evidence.s1_mean_descending = &f.radar_descending.band(radar_band_name(Pass::kDescending, "mean"));

  const auto run = [&](const Mask& map, RuleSelection rules, FilterReport& report) {
    rules.r1 = rules.r1 && agreement.has_value();
    return filter_objects(connected_components(map, config.connectivity), evidence, rules,
                          config.removal, &report);
  };
  const ObjectSet optical = run(optical_map, config.optical_rules, out.optical);
  const ObjectSet radar = run(radar_map, config.radar_rules, out.radar);
  out.fused = merge_maps(optical, radar);
  return out;
}

// -------------------------------------------------------------------- run

std::string_view status_name(UnitStatus status) {
  switch (status) {
    case UnitStatus::kSettlement:
      return "settlement";
    case UnitStatus::kEmpty:
      return "empty";
    case UnitStatus::kUnclassifiable:
      return "unclassifiable";
    case UnitStatus::kFailed:
      return "failed";
  }
  return "failed";
}

namespace {

json members_json(const std::vector<MemberReport>& members) {
  json out = json::array();
  for (const MemberReport& m : members) {
    out.push_back({{"seed", m.seed},
                   {"C", m.C},
                   {"gamma", m.gamma},
                   {"cv_accuracy", m.cv_accuracy},
                   {"support_vectors", m.support_vectors},
                   {"training_samples", m.training_samples},
                   {"settlement_drawn", m.sampling.settlement_drawn},
                   {"non_settlement_drawn", m.sampling.non_settlement_drawn},
                   {"shortage", m.sampling.shortage}});
  }
  return out;
}

json filter_json(const FilterReport& r) {
  return {{"objects_in", r.objects_in},     {"objects_kept", r.objects_kept},
          {"removed_r1", r.removed_r1},     {"removed_r2", r.removed_r2},
          {"removed_r3", r.removed_r3},     {"pixels_removed", r.pixels_removed}};
}

}  // namespace

UnitResult run_unit(const UnitInputs& inputs, const PipelineConfig& config) {
  UnitResult result;
  result.id = inputs.id;
  json& prov = result.provenance;
  prov["unit"] = inputs.id;
  prov["seed"] = config.seed;
  prov["config"] = config_to_json(config);
  prov["inputs"] = {{"optical_scenes", inputs.optical.size()},
                    {"radar_scenes", inputs.radar.size()},
                    {"agreement_layers", inputs.references.agreement_count()},
                    {"exclusion_layers", inputs.references.exclusion_count()}};

  std::string stage;
  try {
    stage = "config";
    config.validate();
    const ThresholdTable thresholds = resolve_thresholds(config);

    stage = "features";
    const UnitFeatures features = compute_features(inputs, config);
    prov["features"] = {{"optical_bands", features.optical.size()},
                        {"optical_scenes_used", features.optical_scenes_used},
                        {"optical_scenes_rejected", features.optical_scenes_rejected},
                        {"width", features.geometry.width},
                        {"height", features.geometry.height}};

    stage = "select";
    thresholds.validate_coverage(climate_classes_in_use(features.climate));
    const CandidateMasks candidates = select_candidates(features, thresholds, config);
    const std::size_t n_s = count_positive(candidates.settlement);
    const std::size_t n_ns = count_positive(candidates.non_settlement);
    prov["candidates"] = {{"settlement", n_s}, {"non_settlement", n_ns}};
    if (n_s == 0 || n_ns == 0) {
      result.status = UnitStatus::kUnclassifiable;
      result.message = n_s == 0 ? "no settlement candidates" : "no non-settlement candidates";
      prov["status"] = status_name(result.status);
      prov["message"] = result.message;
      return result;
    }

    stage = "classify";
    const Classification cls = classify_unit(features, candidates, config);
    prov["radar_pass"] = pass_name(cls.radar_pass);
    prov["optical_members"] = members_json(cls.optical.members);
    prov["radar_members"] = members_json(cls.radar.members);
    prov["optical_map_pixels"] = count_positive(cls.optical.map);
    prov["radar_map_pixels"] = count_positive(cls.radar.map);

    stage = "postclass";
    const PostclassOutput post =
        postclass_unit(features, cls.optical.map, cls.radar.map, inputs.references, config);
    prov["postclass"] = {{"optical", filter_json(post.optical)},
                         {"radar", filter_json(post.radar)},
                         {"notes", post.notes}};
    const std::size_t settled = count_positive(post.fused);
    prov["settlement_pixels"] = settled;
    result.mask = post.fused;
    result.status = settled > 0 ? UnitStatus::kSettlement : UnitStatus::kEmpty;
  } catch (const Error& e) {
    result.status = UnitStatus::kFailed;
    result.stage = stage;
    result.message = e.what();
    prov["stage"] = stage;
    prov["message"] = result.message;
    log::error("unit " + inputs.id + " failed in stage " + stage + ": " + e.what());
  }
  prov["status"] = status_name(result.status);
  return result;
}

std::string product_name(const std::string& prefix, const std::string& id, const Bounds& b) {
  const auto coord = [](double v, char pos, char neg, int width) {
    const char hemi = v < 0 ? neg : pos;
    const double a = std::fabs(v);
    char buf[48];
    if (std::fabs(a - std::round(a)) < 1e-9) {
      std::snprintf(buf, sizeof(buf), "%c%0*d", hemi, width, static_cast<int>(std::round(a)));
    } else {
      std::snprintf(buf, sizeof(buf), "%c%0*.4f", hemi, width + 5, a);
      for (char* p = buf; *p != '\0'; ++p) {
        if (*p == '.') {
          *p = 'p';
        }
      }
    }
    return std::string(buf);
  };
  return prefix + "_" + id + "_" + coord(b.west, 'e', 'w', 3) + "_" + coord(b.north, 'n', 's', 2) +
         "_" + coord(b.east, 'e', 'w', 3) + "_" + coord(b.south, 'n', 's', 2);
}

UnitResult run_unit_to_disk(const WorkingUnit& unit, const PipelineConfig& config,
                            const fs::path& out_dir) {
  UnitResult result;
  try {
    result = run_unit(load_unit_inputs(unit), config);
  } catch (const Error& e) {
    result.id = unit.id;
    result.status = UnitStatus::kFailed;
    result.stage = "load";
    result.message = e.what();
    result.provenance = {{"unit", unit.id}, {"status", "failed"}, {"stage", "load"}, {"message", e.what()}};
    log::error("unit " + unit.id + " failed in stage load: " + e.what());
  }
  fs::create_directories(out_dir);
  const std::string name = product_name(config.product_prefix, unit.id, unit.bounds);
  if (result.status == UnitStatus::kSettlement && result.mask) {
    write_mask(*result.mask, out_dir / (name + ".tif"));
    result.provenance["product"] = name + ".tif";
  }
  std::ofstream out(out_dir / (name + "_provenance.json"));
  if (!out) {
    throw IoError("cannot create provenance in " + out_dir.string());
  }
  out << result.provenance.dump(2) << '\n';
  return result;
}

// ----------------------------------------------------------------- mosaic

Mask mosaic(std::span<const Mask> units) {
  if (units.empty()) {
    throw ContractError("mosaic: no units");
  }
  const GeoTransform& ref = units.front().transform();
  const double tol = 1e-6;
  double west = ref.origin_lon;
  double north = ref.origin_lat;
  double east = west;
  double south = north;
  for (const Mask& m : units) {
    const GeoTransform& t = m.transform();
    if (std::fabs(t.pixel_width - ref.pixel_width) > 1e-9 * ref.pixel_width ||
        std::fabs(t.pixel_height - ref.pixel_height) > 1e-9 * ref.pixel_height) {
      throw ContractError("mosaic: units have different pixel sizes");
    }
    const double dc = (t.origin_lon - ref.origin_lon) / ref.pixel_width;
    const double dr = (ref.origin_lat - t.origin_lat) / ref.pixel_height;
    if (std::fabs(dc - std::round(dc)) > tol || std::fabs(dr - std::round(dr)) > tol) {
      throw ContractError("mosaic: units are not aligned to a common pixel lattice");
    }
    const Bounds b = Bounds::of(m.geometry());
    west = std::min(west, b.west);
    north = std::max(north, b.north);
    east = std::max(east, b.east);
    south = std::min(south, b.south);
  }
  const int width = static_cast<int>(std::llround((east - west) / ref.pixel_width));
  const int height = static_cast<int>(std::llround((north - south) / ref.pixel_height));
  const GeoTransform out_t{west, north, ref.pixel_width, ref.pixel_height};
  Mask out(width, height, out_t, 0);
  Raster<std::uint8_t> written(width, height, out_t, 0);
  for (const Mask& m : units) {
    const int c0 = static_cast<int>(std::llround((m.transform().origin_lon - west) / ref.pixel_width));
    const int r0 = static_cast<int>(std::llround((north - m.transform().origin_lat) / ref.pixel_height));
    for (int r = 0; r < m.height(); ++r) {
      for (int c = 0; c < m.width(); ++c) {
        const std::uint8_t v = m(c, r) != 0 ? 1 : 0;
        std::uint8_t& dst = out(c0 + c, r0 + r);
        std::uint8_t& seen = written(c0 + c, r0 + r);
        if (seen != 0 && dst != v) {
          throw ContractError("mosaic: overlapping units disagree at pixel (" +
                              std::to_string(c0 + c) + ", " + std::to_string(r0 + r) + ")");
        }
        dst = v;
        seen = 1;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------- feature files

void save_feature_stack(const FeatureStack& stack, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream list(dir / "bands.txt");
  if (!list) {
    throw IoError("cannot create " + (dir / "bands.txt").string());
  }
  for (std::size_t i = 0; i < stack.size(); ++i) {
    const std::string& name = stack.names()[i];
    write_grid(stack.band(i), dir / (name + ".tif"), Encoding::kFloat);
    list << name << '\n';
  }
}

FeatureStack load_feature_stack(const fs::path& dir) {
  std::ifstream list(dir / "bands.txt");
  if (!list) {
    throw IoError("cannot open " + (dir / "bands.txt").string());
  }
  FeatureStack stack;
  for (std::string name; std::getline(list, name);) {
    if (!name.empty()) {
      stack.add(name, read_grid(dir / (name + ".tif")));
    }
  }
  return stack;
}

}  // namespace wsf
