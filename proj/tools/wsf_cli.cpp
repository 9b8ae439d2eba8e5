// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: one subcommand per processing stage.

#include <png.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "wsf/config.hpp"
#include "wsf/ensemble.hpp"
#include "wsf/log.hpp"
#include "wsf/parallel.hpp"
#include "wsf/pipeline.hpp"
#include "wsf/raster_io.hpp"
#include "wsf/resample.hpp"
#include "wsf/synthetic.hpp"
#include "wsf/validation.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config;
  std::vector<std::string> units;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out_dir = ".";
  bool verbose = false;
};

wsf::PipelineConfig effective_config(const CommonOptions& o) {
  wsf::PipelineConfig c = o.config.empty() ? wsf::PipelineConfig{} : wsf::load_config(o.config);
  if (o.seed) {
    c.seed = *o.seed;
  }
  if (o.workers) {
    c.workers = *o.workers;
  }
  c.validate();
  return c;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool units) {
  cmd->add_option("--config", o.config, "Pipeline configuration (JSON)")->check(CLI::ExistingFile);
  if (units) {
    cmd->add_option("--unit", o.units, "Working unit description (unit.json); repeatable")
        ->required()
        ->check(CLI::ExistingFile);
  }
  cmd->add_option("--seed", o.seed, "Random seed (overrides the configuration)");
  cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out-dir", o.out_dir, "Output directory");
  cmd->add_flag("-v,--verbose", o.verbose, "Log progress to stderr");
}

wsf::UnitFeatures unit_features(const std::string& unit_path, const wsf::PipelineConfig& config,
                                wsf::UnitInputs* inputs_out = nullptr) {
  const wsf::WorkingUnit unit = wsf::load_working_unit(unit_path);
  wsf::UnitInputs inputs = wsf::load_unit_inputs(unit);
  wsf::UnitFeatures f = wsf::compute_features(inputs, config);
  if (inputs_out != nullptr) {
    *inputs_out = std::move(inputs);
  }
  return f;
}

int cmd_features(const CommonOptions& o) {
  const wsf::PipelineConfig config = effective_config(o);
  for (const std::string& u : o.units) {
    const wsf::UnitFeatures f = unit_features(u, config);
    const fs::path dir = fs::path(o.out_dir) / wsf::load_working_unit(u).id;
    wsf::save_feature_stack(f.optical, dir / "optical");
    wsf::save_feature_stack(f.radar_ascending, dir / "radar_ascending");
    wsf::save_feature_stack(f.radar_descending, dir / "radar_descending");
    wsf::write_grid(f.slope, dir / "slope.tif", wsf::Encoding::kFloat);
    wsf::write_grid(f.climate, dir / "climate.tif", wsf::Encoding::kFloat);
    std::cout << dir.string() << ": " << f.optical.size() << " optical and "
              << 2 * f.radar_ascending.size() << " radar bands\n";
  }
  return 0;
}

int cmd_select(const CommonOptions& o) {
  const wsf::PipelineConfig config = effective_config(o);
  const wsf::ThresholdTable thresholds = wsf::resolve_thresholds(config);
  for (const std::string& u : o.units) {
    const wsf::UnitFeatures f = unit_features(u, config);
    const wsf::CandidateMasks c = wsf::select_candidates(f, thresholds, config);
    const fs::path dir = fs::path(o.out_dir) / wsf::load_working_unit(u).id;
    fs::create_directories(dir);
    wsf::write_mask(c.settlement, dir / "settlement_candidates.tif");
    wsf::write_mask(c.non_settlement, dir / "non_settlement_candidates.tif");
    std::cout << dir.string() << ": " << wsf::count_positive(c.settlement) << " settlement and "
              << wsf::count_positive(c.non_settlement) << " non-settlement candidates\n";
  }
  return 0;
}

int cmd_classify(const CommonOptions& o) {
  const wsf::PipelineConfig config = effective_config(o);
  const wsf::ThresholdTable thresholds = wsf::resolve_thresholds(config);
  for (const std::string& u : o.units) {
    const wsf::UnitFeatures f = unit_features(u, config);
    const wsf::CandidateMasks c = wsf::select_candidates(f, thresholds, config);
    const wsf::Classification cls = wsf::classify_unit(f, c, config);
    const fs::path dir = fs::path(o.out_dir) / wsf::load_working_unit(u).id;
    fs::create_directories(dir);
    wsf::write_mask(cls.optical.map, dir / "optical_map.tif");
    wsf::write_mask(cls.radar.map, dir / "radar_map.tif");
    wsf::save_ensemble(cls.optical.model, dir / "optical_ensemble.txt");
    wsf::save_ensemble(cls.radar.model, dir / "radar_ensemble.txt");
    std::cout << dir.string() << ": optical " << wsf::count_positive(cls.optical.map) << " px, radar ("
              << wsf::pass_name(cls.radar_pass) << ") " << wsf::count_positive(cls.radar.map) << " px\n";
  }
  return 0;
}

int cmd_postclass(const CommonOptions& o, const std::string& optical_map, const std::string& radar_map) {
  const wsf::PipelineConfig config = effective_config(o);
  if (o.units.size() != 1) {
    throw wsf::ContractError("postclass takes exactly one --unit");
  }
  wsf::UnitInputs inputs;
  const wsf::UnitFeatures f = unit_features(o.units.front(), config, &inputs);
  const wsf::PostclassOutput post = wsf::postclass_unit(f, wsf::read_mask(optical_map),
                                                        wsf::read_mask(radar_map), inputs.references, config);
  const fs::path dir = fs::path(o.out_dir);
  fs::create_directories(dir);
  wsf::write_mask(post.fused, dir / "fused_map.tif");
  std::cout << "kept " << post.optical.objects_kept << "/" << post.optical.objects_in
            << " optical and " << post.radar.objects_kept << "/" << post.radar.objects_in
            << " radar objects; " << wsf::count_positive(post.fused) << " settlement px\n";
  return 0;
}

int cmd_run(const CommonOptions& o) {
  wsf::PipelineConfig config = effective_config(o);
  std::vector<wsf::WorkingUnit> units;
  for (const std::string& u : o.units) {
    units.push_back(wsf::load_working_unit(u));
  }
  // Several units: one worker per unit. One unit: workers inside the unit.
  const int unit_workers = units.size() > 1 ? config.workers : 1;
  if (units.size() > 1) {
    config.workers = 1;
  }
  std::vector<wsf::UnitResult> results(units.size());
  wsf::parallel_for(units.size(), unit_workers, [&](std::size_t i) {
    results[i] = wsf::run_unit_to_disk(units[i], config, o.out_dir);
  });
  int failures = 0;
  for (const wsf::UnitResult& r : results) {
    std::cout << r.id << ": " << wsf::status_name(r.status);
    if (r.status == wsf::UnitStatus::kFailed) {
      std::cout << " in " << r.stage << ": " << r.message;
      ++failures;
    } else if (!r.message.empty()) {
      std::cout << " (" << r.message << ")";
    }
    std::cout << '\n';
  }
  return failures == 0 ? 0 : 1;
}

int cmd_mosaic(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<wsf::Mask> masks;
  for (const std::string& p : inputs) {
    masks.push_back(wsf::read_mask(p));
  }
  const wsf::Mask m = wsf::mosaic(masks);
  wsf::write_mask(m, out);
  std::cout << out << ": " << m.width() << " x " << m.height() << ", " << wsf::count_positive(m)
            << " settlement px\n";
  return 0;
}

int cmd_downsample(const CommonOptions& o, const std::string& input, std::vector<int> factors) {
  const wsf::PipelineConfig config = effective_config(o);
  if (factors.empty()) {
    factors = config.downsample_factors;
  }
  const wsf::Mask mask = wsf::read_mask(input);
  fs::create_directories(o.out_dir);
  for (int f : factors) {
    const wsf::Grid pct = wsf::downsample_percent(mask, f);
    const fs::path out = fs::path(o.out_dir) / (fs::path(input).stem().string() + "_pct" + std::to_string(f) + ".tif");
    wsf::write_grid(pct, out, wsf::Encoding::kPercent);
    std::cout << out.string() << '\n';
  }
  return 0;
}

int cmd_validate(const CommonOptions& o, const std::string& map, const std::string& labels,
                 int synthetic_tiles) {
  const wsf::PipelineConfig config = effective_config(o);
  wsf::ValidationReport report;
  if (synthetic_tiles > 0) {
    wsf::SyntheticValidationOptions opts;
    opts.tiles = synthetic_tiles;
    opts.candidate_tiles = 2 * synthetic_tiles;
    opts.seed = config.seed;
    opts.workers = config.workers;
    report = wsf::run_synthetic_validation(opts).report;
  } else {
    if (map.empty() || labels.empty()) {
      throw wsf::ContractError("validate needs --map and --labels, or --synthetic-tiles");
    }
    const wsf::Mask m = wsf::read_mask(map);
    std::vector<wsf::AssessmentBlock> blocks = wsf::load_reference_blocks(labels);
    wsf::classify_blocks(blocks, m, m.geometry());
    for (const wsf::AssessmentBlock& b : blocks) {
      report.add_block(b);
    }
  }
  fs::create_directories(o.out_dir);
  const fs::path out = fs::path(o.out_dir) / "metrics.csv";
  report.write_csv(out);
  std::cout << report.blocks() << " blocks, " << report.assessed_cells() << " cells -> " << out.string() << '\n';
  return 0;
}

int cmd_synth(const CommonOptions& o, const std::string& scenario, int size) {
  const std::uint64_t seed = o.seed.value_or(1);
  wsf::SyntheticScenario s;
  if (scenario == "separated") {
    s = wsf::SyntheticScenario::separated(seed);
  } else if (scenario == "optical-only") {
    s = wsf::SyntheticScenario::optical_only(seed);
  } else if (scenario == "radar-only") {
    s = wsf::SyntheticScenario::radar_only(seed);
  } else {
    throw wsf::ContractError("unknown scenario '" + scenario + "'");
  }
  s.width = size;
  s.height = size;
  const wsf::SyntheticUnit unit = wsf::generate_synthetic(s);
  const fs::path dir = fs::path(o.out_dir) / s.id;
  wsf::write_synthetic_unit(unit, dir);
  std::cout << (dir / "unit.json").string() << '\n';
  return 0;
}

int cmd_preview(const std::string& input, const std::string& out, int factor) {
  const wsf::Mask mask = wsf::read_mask(input);
  const int w = (mask.width() + factor - 1) / factor;
  const int h = (mask.height() + factor - 1) / factor;
  std::vector<png_byte> rows(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (mask(c, r) != 0) {
        rows[static_cast<std::size_t>(r / factor) * static_cast<std::size_t>(w) +
             static_cast<std::size_t>(c / factor)] = 255;
      }
    }
  }
  FILE* fp = std::fopen(out.c_str(), "wb");
  if (fp == nullptr) {
    throw wsf::IoError("cannot create " + out);
  }
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw wsf::IoError("PNG encoding failed for " + out);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < h; ++r) {
    png_write_row(png, rows.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(w));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
  std::cout << out << ": " << w << " x " << h << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Settlement footprint mapping from optical and radar time series"};
  app.require_subcommand(1);
  CommonOptions common;

  auto* features = app.add_subcommand("features", "Compute temporal feature stacks of units");
  add_common(features, common, true);
  auto* select = app.add_subcommand("select", "Extract candidate training masks");
  add_common(select, common, true);
  auto* classify = app.add_subcommand("classify", "Train both ensembles and classify units");
  add_common(classify, common, true);

  auto* postclass = app.add_subcommand("postclass", "Fuse optical and radar maps by object rules");
  add_common(postclass, common, true);
  std::string optical_map;
  std::string radar_map;
  postclass->add_option("--optical-map", optical_map, "Optical classification mask")->required()->check(CLI::ExistingFile);
  postclass->add_option("--radar-map", radar_map, "Radar classification mask")->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "Run the whole pipeline on units");
  add_common(run, common, true);

  auto* mosaic = app.add_subcommand("mosaic", "Merge unit masks on a common grid");
  std::vector<std::string> mosaic_inputs;
  std::string mosaic_out;
  mosaic->add_option("inputs", mosaic_inputs, "Unit masks")->required()->check(CLI::ExistingFile);
  mosaic->add_option("-o,--out", mosaic_out, "Output mask")->required();

  auto* downsample = app.add_subcommand("downsample", "Percent-coverage products of a mask");
  add_common(downsample, common, false);
  std::string ds_input;
  std::vector<int> ds_factors;
  downsample->add_option("input", ds_input, "Settlement mask")->required()->check(CLI::ExistingFile);
  downsample->add_option("--factor", ds_factors, "Block factors (default: configuration)");

  auto* validate = app.add_subcommand("validate", "Accuracy assessment against reference blocks");
  add_common(validate, common, false);
  std::string val_map;
  std::string val_labels;
  int synthetic_tiles = 0;
  validate->add_option("--map", val_map, "Classification mask")->check(CLI::ExistingFile);
  validate->add_option("--labels", val_labels, "Reference block file")->check(CLI::ExistingFile);
  validate->add_option("--synthetic-tiles", synthetic_tiles, "Run on generated tiles instead");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic working unit");
  add_common(synth, common, false);
  std::string scenario = "separated";
  int size = 512;
  synth->add_option("--scenario", scenario, "separated | optical-only | radar-only")
      ->check(CLI::IsMember({"separated", "optical-only", "radar-only"}));
  synth->add_option("--size", size, "Unit width and height in product pixels")->check(CLI::Range(16, 8192));

  auto* preview = app.add_subcommand("preview", "Render a mask as a grayscale PNG");
  std::string preview_in;
  std::string preview_out;
  int preview_factor = 1;
  preview->add_option("input", preview_in, "Settlement mask")->required()->check(CLI::ExistingFile);
  preview->add_option("-o,--out", preview_out, "PNG file")->required();
  preview->add_option("--factor", preview_factor, "Block reduction factor")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  wsf::log::set_level(common.verbose ? wsf::log::Level::kInfo : wsf::log::Level::kWarning);

  try {
    if (*features) return cmd_features(common);
    if (*select) return cmd_select(common);
    if (*classify) return cmd_classify(common);
    if (*postclass) return cmd_postclass(common, optical_map, radar_map);
    if (*run) return cmd_run(common);
    if (*mosaic) return cmd_mosaic(mosaic_inputs, mosaic_out);
    if (*downsample) return cmd_downsample(common, ds_input, ds_factors);
    if (*validate) return cmd_validate(common, val_map, val_labels, synthetic_tiles);
    if (*synth) return cmd_synth(common, scenario, size);
    if (*preview) return cmd_preview(preview_in, preview_out, preview_factor);
  } catch (const wsf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
