// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "wsf/objects.hpp"
#include "wsf/parallel.hpp"
#include "wsf/random.hpp"
#include "wsf/raster_io.hpp"

namespace wsf {

SyntheticScenario SyntheticScenario::separated(std::uint64_t seed) {
  SyntheticScenario s;
  s.id = "separated";
  s.seed = seed;
  return s;
}

SyntheticScenario SyntheticScenario::optical_only(std::uint64_t seed) {
  SyntheticScenario s;
  s.id = "optical_only";
  s.suppressed_fraction = 0.5;
  s.seed = seed;
  return s;
}

SyntheticScenario SyntheticScenario::radar_only(std::uint64_t seed) {
  SyntheticScenario s;
  s.id = "radar_only";
  s.bare_soil_fraction = 0.12;
  s.seed = seed;
  return s;
}

void SyntheticScenario::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) {
      throw ContractError(std::string("synthetic scenario: ") + what);
    }
  };
  require(width >= 16 && height >= 16, "unit must be at least 16 x 16 pixels");
  require(optical_factor >= 1, "optical_factor must be >= 1");
  require(settlement_fraction >= 0.0 && water_fraction >= 0.0 && bare_soil_fraction >= 0.0,
          "cover fractions must be non-negative");
  require(settlement_fraction + water_fraction + bare_soil_fraction <= 0.6,
          "cover fractions leave too little background");
  require(min_radius >= 1 && max_radius >= min_radius, "blob radii are inconsistent");
  require(2 * max_radius < std::min(width, height), "blobs do not fit the unit");
  require(optical_scenes >= 1 && radar_scenes_per_pass >= 0, "scene counts are invalid");
  require(cloud_fraction >= 0.0 && cloud_fraction < 0.6, "cloud_fraction must lie in [0, 0.6)");
  require(reflectance_noise >= 0.0 && reflectance_texture >= 0.0 && speckle_db >= 0.0 &&
              texture_db >= 0.0,
          "noise scales must be non-negative");
  require(suppressed_fraction >= 0.0 && suppressed_fraction <= 1.0,
          "suppressed_fraction must lie in [0, 1]");
  require(reference_dropout >= 0.0 && reference_dropout <= 1.0 && reference_noise >= 0.0 &&
              reference_noise <= 1.0,
          "reference corruption rates must lie in [0, 1]");
  require(climate_class >= 1 && climate_class <= kClimateClassCount, "climate class must be 1..30");
  transform.validate();
}

namespace {

constexpr Timestamp kDay = 86400;
constexpr Timestamp kYearStart = 1420070400;  // 2015-01-01T00:00:00Z

/// Paints a blob (union of up to three discs) with `value` where `allowed`
/// accepts the pixel. Returns the number of pixels newly painted.
template <typename Allowed>
std::size_t paint_blob(Raster<std::uint8_t>& cover, Rng& rng, int min_r, int max_r,
                       std::uint8_t value, Allowed allowed) {
  const int w = cover.width();
  const int h = cover.height();
  const int cx = static_cast<int>(rng.below(static_cast<std::uint64_t>(w)));
  const int cy = static_cast<int>(rng.below(static_cast<std::uint64_t>(h)));
  const int lobes = 1 + static_cast<int>(rng.below(3));
  std::size_t painted = 0;
  for (int k = 0; k < lobes; ++k) {
    const int r = min_r + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_r - min_r + 1)));
    const int ox = k == 0 ? 0 : static_cast<int>(rng.below(static_cast<std::uint64_t>(r + 1))) - r / 2;
    const int oy = k == 0 ? 0 : static_cast<int>(rng.below(static_cast<std::uint64_t>(r + 1))) - r / 2;
    for (int y = cy + oy - r; y <= cy + oy + r; ++y) {
      for (int x = cx + ox - r; x <= cx + ox + r; ++x) {
        if (x < 0 || y < 0 || x >= w || y >= h) {
          continue;
        }
        const int dx = x - cx - ox;
        const int dy = y - cy - oy;
        if (dx * dx + dy * dy > r * r || cover(x, y) == value || !allowed(x, y)) {
          continue;
        }
        cover(x, y) = value;
        ++painted;
      }
    }
  }
  return painted;
}

template <typename Allowed>
void fill_cover(Raster<std::uint8_t>& cover, Rng& rng, double fraction, int min_r, int max_r,
                Cover value, Allowed allowed) {
  const auto target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(cover.size())));
  std::size_t painted = 0;
  for (int attempt = 0; painted < target && attempt < 200000; ++attempt) {
    painted += paint_blob(cover, rng, min_r, max_r, static_cast<std::uint8_t>(value), allowed);
  }
}

/// Cells within `gap` (Chebyshev) of a settlement cell.
Mask settlement_halo(const Raster<std::uint8_t>& cover, int gap) {
  Mask halo(cover.geometry(), 0);
  for (int y = 0; y < cover.height(); ++y) {
    for (int x = 0; x < cover.width(); ++x) {
      if (cover(x, y) != static_cast<std::uint8_t>(Cover::kSettlement)) {
        continue;
      }
      for (int yy = std::max(0, y - gap); yy <= std::min(cover.height() - 1, y + gap); ++yy) {
        for (int xx = std::max(0, x - gap); xx <= std::min(cover.width() - 1, x + gap); ++xx) {
          halo(xx, yy) = 1;
        }
      }
    }
  }
  return halo;
}

const Spectrum& spectrum_of(const SyntheticScenario& s, std::uint8_t cover) {
  switch (static_cast<Cover>(cover)) {
    case Cover::kSettlement:
      return s.settlement_spectrum;
    case Cover::kWater:
      return s.water_spectrum;
    case Cover::kBareSoil:
      return s.soil_spectrum;
    case Cover::kVegetation:
      break;
  }
  return s.vegetation_spectrum;
}

Mask cloud_mask(int w, int h, const GeoTransform& t, double fraction, Rng& rng) {
  Mask valid(w, h, t, 1);
  const auto target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(valid.size())));
  std::size_t covered = 0;
  const int max_r = std::max(2, std::min(w, h) / 8);
  while (covered < target) {
    const int cx = static_cast<int>(rng.below(static_cast<std::uint64_t>(w)));
    const int cy = static_cast<int>(rng.below(static_cast<std::uint64_t>(h)));
    const int r = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_r - 1)));
    for (int y = std::max(0, cy - r); y <= std::min(h - 1, cy + r); ++y) {
      for (int x = std::max(0, cx - r); x <= std::min(w - 1, cx + r); ++x) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r && valid(x, y) != 0) {
          valid(x, y) = 0;
          ++covered;
        }
      }
    }
  }
  return valid;
}

}  // namespace

SyntheticUnit generate_synthetic(const SyntheticScenario& s) {
  s.validate();
  const GridGeometry product{s.width, s.height, s.transform};
  SyntheticUnit unit;
  unit.inputs.id = s.id;

  // Land cover.
  Rng truth_rng(derive_seed(s.seed, "truth"));
  Raster<std::uint8_t> cover(product, static_cast<std::uint8_t>(Cover::kVegetation));
  fill_cover(cover, truth_rng, s.water_fraction, s.min_radius, s.max_radius, Cover::kWater,
             [](int, int) { return true; });
  fill_cover(cover, truth_rng, s.settlement_fraction, s.min_radius, s.max_radius, Cover::kSettlement,
             [&](int x, int y) { return cover(x, y) == static_cast<std::uint8_t>(Cover::kVegetation); });
  if (s.bare_soil_fraction > 0.0) {
    const Mask halo = settlement_halo(cover, s.soil_gap);
    fill_cover(cover, truth_rng, s.bare_soil_fraction, s.min_radius, s.max_radius, Cover::kBareSoil,
               [&](int x, int y) {
                 return halo(x, y) == 0 && cover(x, y) == static_cast<std::uint8_t>(Cover::kVegetation);
               });
  }
  unit.truth = Mask(product, 0);
  for (std::size_t i = 0; i < cover.size(); ++i) {
    unit.truth[i] = cover[i] == static_cast<std::uint8_t>(Cover::kSettlement) ? 1 : 0;
  }
  const ObjectSet truth_objects = connected_components(unit.truth);
  std::vector<bool> suppressed(truth_objects.objects.size() + 1, false);
  for (std::size_t k = 1; k < suppressed.size(); ++k) {
    suppressed[k] = truth_rng.bernoulli(s.suppressed_fraction);
  }

  // Optical scenes on the coarser grid, as linear mixtures of the covers.
  const int f = s.optical_factor;
  const int ow = (s.width + f - 1) / f;
  const int oh = (s.height + f - 1) / f;
  GeoTransform ot = s.transform;
  ot.pixel_width *= f;
  ot.pixel_height *= f;
  std::vector<Spectrum> mixture(static_cast<std::size_t>(ow) * static_cast<std::size_t>(oh));
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      Spectrum acc{};
      int n = 0;
      for (int y = oy * f; y < std::min(s.height, (oy + 1) * f); ++y) {
        for (int x = ox * f; x < std::min(s.width, (ox + 1) * f); ++x) {
          const Spectrum& sp = spectrum_of(s, cover(x, y));
          for (std::size_t b = 0; b < kBandCount; ++b) {
            acc[b] += sp[b];
          }
          ++n;
        }
      }
      for (double& v : acc) {
        v /= n;
      }
      mixture[static_cast<std::size_t>(oy) * static_cast<std::size_t>(ow) + static_cast<std::size_t>(ox)] = acc;
    }
  }
  Rng optical_rng(derive_seed(s.seed, "optical"));
  for (Spectrum& sp : mixture) {
    for (double& v : sp) {
      v += optical_rng.normal(0.0, s.reflectance_texture);
    }
  }
  for (int k = 0; k < s.optical_scenes; ++k) {
    SpectralScene scene;
    scene.timestamp = kYearStart + (15 + 30 * k) * kDay;
    scene.validity = cloud_mask(ow, oh, ot, s.cloud_fraction, optical_rng);
    const std::size_t clear = count_positive(scene.validity);
    scene.cloud_cover = 100.0 * (1.0 - static_cast<double>(clear) / static_cast<double>(scene.validity.size()));
    for (std::size_t b = 0; b < kBandCount; ++b) {
      scene.bands[b] = Grid(ow, oh, ot, 0.0, kNodata);
    }
    for (std::size_t i = 0; i < mixture.size(); ++i) {
      for (std::size_t b = 0; b < kBandCount; ++b) {
        double v = mixture[i][b] + optical_rng.normal(0.0, s.reflectance_noise);
        if (scene.validity[i] == 0) {
          v = 0.6;  // cloud top
        }
        scene.bands[b][i] = std::clamp(v, 0.001, 1.0);
      }
    }
    unit.inputs.optical.push_back(std::move(scene));
  }

  // Radar scenes on the product grid.
  Rng radar_rng(derive_seed(s.seed, "radar"));
  Grid base_db(product, 0.0, kNodata);
  for (std::size_t i = 0; i < base_db.size(); ++i) {
    double db = s.background_db;
    switch (static_cast<Cover>(cover[i])) {
      case Cover::kSettlement:
        db = suppressed[static_cast<std::size_t>(truth_objects.labels[i])] ? s.suppressed_db : s.settlement_db;
        break;
      case Cover::kWater:
        db = s.water_db;
        break;
      case Cover::kBareSoil:
        db = s.soil_db;
        break;
      case Cover::kVegetation:
        break;
    }
    base_db[i] = db + radar_rng.normal(0.0, s.texture_db);
  }
  for (Pass pass : {Pass::kAscending, Pass::kDescending}) {
    for (int k = 0; k < s.radar_scenes_per_pass; ++k) {
      RadarScene scene;
      scene.pass = pass;
      scene.units = BackscatterUnits::kDecibel;
      scene.timestamp = kYearStart + ((pass == Pass::kAscending ? 6 : 3) + 36 * k) * kDay;
      scene.backscatter = Grid(product, 0.0, kNodata);
      for (std::size_t i = 0; i < base_db.size(); ++i) {
        scene.backscatter[i] = base_db[i] + radar_rng.normal(0.0, s.speckle_db);
      }
      unit.inputs.radar.push_back(std::move(scene));
    }
  }

  // Climate and terrain.
  unit.inputs.climate = Grid(product, static_cast<double>(s.climate_class), kNodata);
  unit.inputs.dem = Grid(product, 0.0, kNodata);
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      unit.inputs.dem(x, y) = s.dem_ramp_m * x / std::max(1, s.width - 1);
    }
  }

  // Reference layers: the truth with dropped objects and pixel noise.
  Rng ref_rng(derive_seed(s.seed, "references"));
  for (AgreementRole role : {AgreementRole::kOsmS, AgreementRole::kGl30S, AgreementRole::kCil}) {
    std::vector<bool> dropped(truth_objects.objects.size() + 1, false);
    for (std::size_t k = 1; k < dropped.size(); ++k) {
      dropped[k] = ref_rng.bernoulli(s.reference_dropout);
    }
    Mask layer(product, 0);
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const std::int32_t l = truth_objects.labels[i];
      bool v = l > 0 && !dropped[static_cast<std::size_t>(l)];
      if (ref_rng.bernoulli(s.reference_noise)) {
        v = !v;
      }
      layer[i] = v ? 1 : 0;
    }
    unit.inputs.references.add(role, std::move(layer));
  }
  Mask water(product, 0);
  for (std::size_t i = 0; i < water.size(); ++i) {
    water[i] = cover[i] == static_cast<std::uint8_t>(Cover::kWater) ? 1 : 0;
  }
  unit.inputs.references.add(ExclusionRole::kGlc30W, std::move(water));
  unit.cover = std::move(cover);
  return unit;
}

WorkingUnit write_synthetic_unit(const SyntheticUnit& unit, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "optical");
  fs::create_directories(dir / "radar");
  fs::create_directories(dir / "reference");
  const auto open = [](const fs::path& p) {
    std::ofstream out(p);
    if (!out) {
      throw IoError("cannot create " + p.string());
    }
    return out;
  };

  std::ofstream optical = open(dir / "optical.txt");
  optical << "# timestamp cloud_cover blue green red nir swir1 swir2 validity\n";
  char name[64];
  for (std::size_t k = 0; k < unit.inputs.optical.size(); ++k) {
    const SpectralScene& s = unit.inputs.optical[k];
    optical << format_timestamp(s.timestamp) << ' ' << s.cloud_cover;
    for (std::size_t b = 0; b < kBandCount; ++b) {
      std::snprintf(name, sizeof(name), "optical/scene%02zu_%s.tif", k,
                    std::string(band_name(static_cast<Band>(b))).c_str());
      write_grid(s.bands[b], dir / name, Encoding::kFloat);
      optical << ' ' << name;
    }
    std::snprintf(name, sizeof(name), "optical/scene%02zu_valid.tif", k);
    write_mask(s.validity, dir / name);
    optical << ' ' << name << '\n';
  }

  std::ofstream radar = open(dir / "radar.txt");
  radar << "# timestamp pass units path [validity]\n";
  for (std::size_t k = 0; k < unit.inputs.radar.size(); ++k) {
    const RadarScene& s = unit.inputs.radar[k];
    std::snprintf(name, sizeof(name), "radar/s1_%02zu_%s.tif", k, std::string(pass_name(s.pass)).c_str());
    write_grid(s.backscatter, dir / name, Encoding::kFloat);
    radar << format_timestamp(s.timestamp) << ' ' << pass_name(s.pass) << ' '
          << (s.units == BackscatterUnits::kDecibel ? "db" : "linear") << ' ' << name << '\n';
  }

  std::ofstream refs = open(dir / "references.txt");
  refs << "# role path\n";
  for (const auto& [role, layer] : unit.inputs.references.agreement_layers()) {
    const std::string file = "reference/" + std::string(role_name(role)) + ".tif";
    write_mask(layer, dir / file);
    refs << role_name(role) << ' ' << file << '\n';
  }
  for (const auto& [role, layer] : unit.inputs.references.exclusion_layers()) {
    const std::string file = "reference/" + std::string(role_name(role)) + ".tif";
    write_mask(layer, dir / file);
    refs << role_name(role) << ' ' << file << '\n';
  }

  write_grid(unit.inputs.climate, dir / "climate.tif", Encoding::kFloat);
  write_grid(unit.inputs.dem, dir / "dem.tif", Encoding::kFloat);
  write_mask(unit.truth, dir / "truth.tif");

  WorkingUnit wu;
  wu.id = unit.inputs.id;
  wu.bounds = Bounds::of(unit.truth.geometry());
  wu.optical_manifest = dir / "optical.txt";
  wu.radar_manifest = dir / "radar.txt";
  wu.climate = dir / "climate.tif";
  wu.dem = dir / "dem.tif";
  wu.references = dir / "references.txt";
  optical.close();
  radar.close();
  refs.close();
  save_working_unit(wu, dir / "unit.json");
  return wu;
}

namespace {

struct ValidationTile {
  Mask truth;
  double density = 0.0;
};

ValidationTile make_tile(int size, std::uint64_t seed) {
  Rng rng(seed);
  const GeoTransform t{0.0, 0.0, 1.0, 1.0};
  Raster<std::uint8_t> cover(size, size, t, 0);
  const double fraction = rng.uniform(0.12, 0.35);
  const int max_r = 2 + static_cast<int>(rng.below(10));
  fill_cover(cover, rng, fraction, 1, max_r, Cover::kSettlement, [](int, int) { return true; });
  ValidationTile tile;
  tile.truth = Mask(cover.geometry(), 0);
  for (std::size_t i = 0; i < cover.size(); ++i) {
    tile.truth[i] = cover[i] != 0 ? 1 : 0;
  }
  return tile;
}

}  // namespace

SyntheticValidationResult run_synthetic_validation(const SyntheticValidationOptions& o) {
  SyntheticValidationResult result;
  std::vector<TileSummary> summaries(static_cast<std::size_t>(o.candidate_tiles));
  parallel_for(summaries.size(), o.workers, [&](std::size_t i) {
    const ValidationTile tile = make_tile(o.tile_size, derive_seed(o.seed, i));
    const ObjectSet objects = connected_components(tile.truth);
    summaries[i] = {"tile" + std::to_string(i), objects.objects.size(),
                    static_cast<double>(objects.foreground_count())};
  });
  result.stratification = stratify_tiles(summaries, o.seed, o.tiles);

  const std::vector<std::string> selected = result.stratification.selected();
  std::vector<ValidationReport> reports(selected.size());
  parallel_for(selected.size(), o.workers, [&](std::size_t k) {
    const std::size_t index = std::stoul(selected[k].substr(4));
    const ValidationTile tile = make_tile(o.tile_size, derive_seed(o.seed, index));
    Rng rng(derive_seed(derive_seed(o.seed, "labels"), index));
    // Classification under test: truth with random pixel errors.
    Mask map = tile.truth;
    for (std::uint8_t& v : map.values()) {
      if (rng.bernoulli(o.classification_error)) {
        v = v != 0 ? 0 : 1;
      }
    }
    // Reference labels consistent with the truth.
    std::vector<ReferenceLabel> labels(tile.truth.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const double u = rng.uniform();
      if (tile.truth[i] != 0) {
        labels[i] = u < 0.75 ? ReferenceLabel::kBuildings : ReferenceLabel::kBuildingLots;
      } else {
        labels[i] = u < 0.08 ? ReferenceLabel::kRoadsPaved
                             : (u < 0.12 ? ReferenceLabel::kBuildingLots : ReferenceLabel::kNone);
      }
    }
    const std::vector<BlockCenter> centers =
        draw_samples(map, o.n_per_class, o.n_per_class, derive_seed(o.seed, index + 1000003));
    for (const BlockCenter& c : centers) {
      AssessmentBlock block;
      block.lon = map.transform().center_lon(c.col);
      block.lat = map.transform().center_lat(c.row);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          block.reference[static_cast<std::size_t>((dr + 1) * 3 + dc + 1)] =
              labels[map.index(c.col + dc, c.row + dr)];
        }
      }
      block.classified = block_classification(map, map.geometry(), c.col, c.row);
      reports[k].add_block(block);
    }
  });
  for (const ValidationReport& r : reports) {
    result.report.merge(r);
  }
  return result;
}

}  // namespace wsf
