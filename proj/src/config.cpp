// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace wsf {

using nlohmann::json;

HyperGrid HyperGridSpec::build() const {
  HyperGrid g;
  for (int i = c_exponent_min; i <= c_exponent_max; ++i) {
    g.c_values.push_back(std::ldexp(1.0, i));
  }
  for (int j = 1; j <= gamma_count; ++j) {
    g.gamma_values.push_back(gamma_step * j);
  }
  return g;
}

EnsembleOptions PipelineConfig::ensemble_options() const {
  EnsembleOptions o;
  o.members = members;
  o.vote_threshold = vote_threshold;
  o.samples_per_class = samples_per_class;
  o.folds = folds;
  o.grid = grid.build();
  o.smo = smo;
  o.workers = workers;
  return o;
}

void PipelineConfig::validate() const {
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) {
      throw ConfigError("invalid configuration: " + what);
    }
  };
  require(workers >= 1, "workers must be >= 1");
  require(unit_size_deg > 0.0, "unit_size_deg must be positive");
  require(optical.cov_window >= 3 && optical.cov_window % 2 == 1, "optical.cov_window must be odd and >= 3");
  require(radar.cov_window >= 3 && radar.cov_window % 2 == 1, "radar.cov_window must be odd and >= 3");
  require(optical.max_cloud_cover > 0.0 && optical.max_cloud_cover <= 100.0,
          "optical.max_cloud_cover must lie in (0, 100]");
  require(members >= 1, "ensemble.members must be >= 1");
  require(vote_threshold >= 1 && vote_threshold <= static_cast<int>(members),
          "ensemble.vote_threshold must lie in [1, members]");
  require(samples_per_class >= 1, "ensemble.samples_per_class must be >= 1");
  require(folds >= 2, "ensemble.folds must be >= 2");
  require(grid.c_exponent_min <= grid.c_exponent_max, "grid C exponents are reversed");
  require(grid.gamma_step > 0.0 && grid.gamma_count >= 1, "grid gamma lattice is empty");
  require(smo.tolerance > 0.0, "ensemble.smo_tolerance must be positive");
  require(removal.min_agreement_overlap >= 0.0 && removal.min_agreement_overlap <= 1.0 &&
              removal.max_exclusion_overlap >= 0.0 && removal.max_exclusion_overlap <= 1.0,
          "overlap fractions must lie in [0, 1]");
  for (int f : downsample_factors) {
    require(f >= 2, "downsample factors must be >= 2");
  }
  require(!product_prefix.empty(), "export.prefix must not be empty");
}

namespace {

/// Reads known keys of one JSON object and rejects the rest.
class Section {
 public:
  Section(const json& obj, std::string name) : obj_(obj), name_(std::move(name)) {
    if (!obj_.is_object()) {
      throw ConfigError("configuration section '" + name_ + "' must be an object");
    }
  }
  ~Section() = default;

  template <typename T>
  void get(const std::string& key, T& target) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) {
      return;
    }
    try {
      target = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("configuration key '" + path(key) + "': " + e.what());
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }
  const json& at(const std::string& key) const { return obj_.at(key); }
  std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) {
        throw ConfigError("unknown configuration key '" + path(key) + "'");
      }
    }
  }

 private:
  const json& obj_;
  std::string name_;
  std::set<std::string> seen_;
};

RuleSelection parse_rules(const json& value, const std::string& where) {
  if (!value.is_array()) {
    throw ConfigError(where + " must be a list of rule names");
  }
  RuleSelection r{false, false, false};
  for (const json& v : value) {
    const std::string s = v.is_string() ? v.get<std::string>() : "";
    if (s == "R1") {
      r.r1 = true;
    } else if (s == "R2") {
      r.r2 = true;
    } else if (s == "R3") {
      r.r3 = true;
    } else {
      throw ConfigError(where + ": unknown rule '" + v.dump() + "'");
    }
  }
  return r;
}

json rules_json(const RuleSelection& r) {
  json out = json::array();
  if (r.r1) {
    out.push_back("R1");
  }
  if (r.r2) {
    out.push_back("R2");
  }
  if (r.r3) {
    out.push_back("R3");
  }
  return out;
}

std::string pass_choice_name(RadarPassChoice c) {
  switch (c) {
    case RadarPassChoice::kAscending:
      return "ascending";
    case RadarPassChoice::kDescending:
      return "descending";
    case RadarPassChoice::kAuto:
      break;
  }
  return "auto";
}

}  // namespace

PipelineConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  PipelineConfig c;
  Section top(doc, "");
  top.get("seed", c.seed);
  top.get("workers", c.workers);
  top.get("unit_size_deg", c.unit_size_deg);
  if (top.has("threshold_table")) {
    const json& v = top.at("threshold_table");
    if (!v.is_null()) {
      if (!v.is_string()) {
        throw ConfigError("threshold_table must be a path string");
      }
      std::filesystem::path p = v.get<std::string>();
      c.threshold_table = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
  }
  if (top.has("optical")) {
    Section s(top.at("optical"), "optical");
    s.get("cov_window", c.optical.cov_window);
    s.get("max_cloud_cover", c.optical.max_cloud_cover);
    s.finish();
  }
  if (top.has("radar")) {
    Section s(top.at("radar"), "radar");
    s.get("cov_window", c.radar.cov_window);
    std::string pass = pass_choice_name(c.radar_pass);
    s.get("pass", pass);
    if (pass == "auto") {
      c.radar_pass = RadarPassChoice::kAuto;
    } else {
      try {
        c.radar_pass = parse_pass(pass) == Pass::kAscending ? RadarPassChoice::kAscending
                                                           : RadarPassChoice::kDescending;
      } catch (const Error&) {
        throw ConfigError("radar.pass must be auto, ascending or descending");
      }
    }
    s.finish();
  }
  if (top.has("candidates")) {
    Section s(top.at("candidates"), "candidates");
    s.get("min_optical_count_exclusive", c.candidates.min_optical_count_exclusive);
    s.get("radar_count_gate", c.candidates.radar_count_gate);
    s.get("settlement_db_min", c.candidates.settlement_db_min);
    s.get("non_settlement_db_max", c.candidates.non_settlement_db_max);
    s.get("max_slope_deg", c.candidates.max_slope_deg);
    s.finish();
  }
  if (top.has("ensemble")) {
    Section s(top.at("ensemble"), "ensemble");
    s.get("members", c.members);
    s.get("vote_threshold", c.vote_threshold);
    s.get("samples_per_class", c.samples_per_class);
    s.get("folds", c.folds);
    s.get("c_exponent_min", c.grid.c_exponent_min);
    s.get("c_exponent_max", c.grid.c_exponent_max);
    s.get("gamma_step", c.grid.gamma_step);
    s.get("gamma_count", c.grid.gamma_count);
    s.get("smo_tolerance", c.smo.tolerance);
    s.get("smo_max_iterations", c.smo.max_iterations);
    s.finish();
  }
  if (top.has("postclass")) {
    Section s(top.at("postclass"), "postclass");
    s.get("enabled", c.post_classification);
    int conn = static_cast<int>(c.connectivity);
    s.get("connectivity", conn);
    if (conn != 4 && conn != 8) {
      throw ConfigError("postclass.connectivity must be 4 or 8");
    }
    c.connectivity = static_cast<Connectivity>(conn);
    s.get("min_agreement_overlap", c.removal.min_agreement_overlap);
    s.get("max_exclusion_overlap", c.removal.max_exclusion_overlap);
    s.get("max_ndvi_mean", c.removal.max_ndvi_mean);
    s.get("min_backscatter_db", c.removal.min_backscatter_db);
    if (s.has("optical_rules")) {
      c.optical_rules = parse_rules(s.at("optical_rules"), "postclass.optical_rules");
    }
    if (s.has("radar_rules")) {
      c.radar_rules = parse_rules(s.at("radar_rules"), "postclass.radar_rules");
    }
    s.finish();
  }
  if (top.has("export")) {
    Section s(top.at("export"), "export");
    s.get("downsample_factors", c.downsample_factors);
    s.get("prefix", c.product_prefix);
    s.finish();
  }
  top.finish();
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open configuration " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(doc, path.parent_path());
}

json config_to_json(const PipelineConfig& c) {
  json doc;
  doc["seed"] = c.seed;
  doc["workers"] = c.workers;
  doc["unit_size_deg"] = c.unit_size_deg;
  doc["threshold_table"] = c.threshold_table ? json(c.threshold_table->string()) : json(nullptr);
  doc["optical"] = {{"cov_window", c.optical.cov_window}, {"max_cloud_cover", c.optical.max_cloud_cover}};
  doc["radar"] = {{"cov_window", c.radar.cov_window}, {"pass", pass_choice_name(c.radar_pass)}};
  doc["candidates"] = {{"min_optical_count_exclusive", c.candidates.min_optical_count_exclusive},
                       {"radar_count_gate", c.candidates.radar_count_gate},
                       {"settlement_db_min", c.candidates.settlement_db_min},
                       {"non_settlement_db_max", c.candidates.non_settlement_db_max},
                       {"max_slope_deg", c.candidates.max_slope_deg}};
  doc["ensemble"] = {{"members", c.members},
                     {"vote_threshold", c.vote_threshold},
                     {"samples_per_class", c.samples_per_class},
                     {"folds", c.folds},
                     {"c_exponent_min", c.grid.c_exponent_min},
                     {"c_exponent_max", c.grid.c_exponent_max},
                     {"gamma_step", c.grid.gamma_step},
                     {"gamma_count", c.grid.gamma_count},
                     {"smo_tolerance", c.smo.tolerance},
                     {"smo_max_iterations", c.smo.max_iterations}};
  doc["postclass"] = {{"enabled", c.post_classification},
                      {"connectivity", static_cast<int>(c.connectivity)},
                      {"min_agreement_overlap", c.removal.min_agreement_overlap},
                      {"max_exclusion_overlap", c.removal.max_exclusion_overlap},
                      {"max_ndvi_mean", c.removal.max_ndvi_mean},
                      {"min_backscatter_db", c.removal.min_backscatter_db},
                      {"optical_rules", rules_json(c.optical_rules)},
                      {"radar_rules", rules_json(c.radar_rules)}};
  doc["export"] = {{"downsample_factors", c.downsample_factors}, {"prefix", c.product_prefix}};
  return doc;
}

}  // namespace wsf
