// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/validation.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "wsf/log.hpp"
#include "wsf/random.hpp"
#include "wsf/resample.hpp"

namespace wsf {

std::vector<std::string> Stratification::selected() const {
  std::vector<std::string> out;
  for (const Stratum& s : strata) {
    if (s.tile) {
      out.push_back(*s.tile);
    }
  }
  return out;
}

double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) {
    throw ContractError("percentile of an empty sample");
  }
  if (p < 0.0 || p > 100.0) {
    throw ContractError("percentile rank must lie in [0, 100]");
  }
  const double h = static_cast<double>(sorted.size() - 1) * p / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Stratification stratify_tiles(std::span<const TileSummary> tiles, std::uint64_t seed, int strata) {
  if (strata < 1 || 100 % strata != 0) {
    throw ContractError("stratify_tiles: strata must divide 100");
  }
  Stratification result;
  std::vector<std::size_t> usable;
  std::vector<double> ratio(tiles.size(), 0.0);
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    if (tiles[i].area > 0.0 && std::isfinite(tiles[i].area)) {
      ratio[i] = static_cast<double>(tiles[i].object_count) / tiles[i].area;
      usable.push_back(i);
    } else {
      ++result.skipped_tiles;
    }
  }
  if (usable.size() < static_cast<std::size_t>(strata)) {
    throw DomainError("stratify_tiles: " + std::to_string(usable.size()) +
                      " tiles with settlement area, need at least " + std::to_string(strata));
  }
  std::vector<double> sorted;
  sorted.reserve(usable.size());
  for (std::size_t i : usable) {
    sorted.push_back(ratio[i]);
  }
  std::sort(sorted.begin(), sorted.end());
  for (int p = 0; p <= 100; ++p) {
    result.percentiles.push_back(percentile_sorted(sorted, p));
  }

  const int step = 100 / strata;
  Rng rng(derive_seed(seed, "stratify-tiles"));
  std::vector<bool> taken(tiles.size(), false);
  for (int s = 1; s <= strata; ++s) {
    Stratum st;
    st.index = s;
    st.lower = result.percentiles[static_cast<std::size_t>(step * (s - 1))];
    st.upper = result.percentiles[static_cast<std::size_t>(step * s)];
    const bool degenerate = st.lower == st.upper;
    std::vector<std::size_t> eligible;
    for (std::size_t i : usable) {
      const double r = ratio[i];
      const bool inside = degenerate ? r == st.lower
                                     : ((r > st.lower || (s == 1 && r == st.lower)) && r <= st.upper);
      if (inside && !taken[i]) {
        eligible.push_back(i);
      }
    }
    st.eligible = eligible.size();
    if (eligible.empty()) {
      ++result.empty_strata;
      log::warning("stratum " + std::to_string(s) + " has no eligible tile");
    } else {
      const std::size_t pick = eligible[rng.below(eligible.size())];
      taken[pick] = true;
      st.tile = tiles[pick].id;
    }
    result.strata.push_back(std::move(st));
  }
  return result;
}

std::vector<BlockCenter> draw_samples(const Mask& mask, std::size_t n_settlement,
                                      std::size_t n_non_settlement, std::uint64_t seed) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (int r = 1; r + 1 < mask.height(); ++r) {
    for (int c = 1; c + 1 < mask.width(); ++c) {
      (mask(c, r) != 0 ? pos : neg).push_back(mask.index(c, r));
    }
  }
  if (pos.size() < n_settlement || neg.size() < n_non_settlement) {
    throw DomainError("draw_samples: need " + std::to_string(n_settlement) + " settlement and " +
                      std::to_string(n_non_settlement) + " non-settlement centers, available " +
                      std::to_string(pos.size()) + " and " + std::to_string(neg.size()));
  }
  Rng rng(derive_seed(seed, "draw-samples"));
  std::vector<BlockCenter> out;
  out.reserve(n_settlement + n_non_settlement);
  const auto draw = [&](const std::vector<std::size_t>& pool, std::size_t n, Label label) {
    std::vector<std::size_t> picks;
    for (std::size_t k : rng.sample_indices(pool.size(), n)) {
      picks.push_back(pool[k]);
    }
    std::sort(picks.begin(), picks.end());
    for (std::size_t i : picks) {
      const int w = mask.width();
      out.push_back({static_cast<int>(i % static_cast<std::size_t>(w)),
                     static_cast<int>(i / static_cast<std::size_t>(w)), label});
    }
  };
  draw(pos, n_settlement, Label::kSettlement);
  draw(neg, n_non_settlement, Label::kNonSettlement);
  return out;
}

char label_code(ReferenceLabel label) {
  switch (label) {
    case ReferenceLabel::kBuildings:
      return 'B';
    case ReferenceLabel::kBuildingLots:
      return 'L';
    case ReferenceLabel::kRoadsPaved:
      return 'R';
    case ReferenceLabel::kNone:
      return 'N';
  }
  return 'N';
}

ReferenceLabel parse_reference_label(char code) {
  switch (std::toupper(static_cast<unsigned char>(code))) {
    case 'B':
      return ReferenceLabel::kBuildings;
    case 'L':
      return ReferenceLabel::kBuildingLots;
    case 'R':
      return ReferenceLabel::kRoadsPaved;
    case 'N':
      return ReferenceLabel::kNone;
    default:
      throw FormatError(std::string("unknown reference label '") + code + "'");
  }
}

std::string_view definition_name(SettlementDefinition definition) {
  switch (definition) {
    case SettlementDefinition::kBuildingsOnly:
      return "buildings";
    case SettlementDefinition::kBuildingsAndLots:
      return "buildings+lots";
    case SettlementDefinition::kBuildingsLotsRoads:
      return "buildings+lots+roads";
  }
  return "";
}

bool is_settlement(ReferenceLabel label, SettlementDefinition definition) {
  switch (label) {
    case ReferenceLabel::kBuildings:
      return true;
    case ReferenceLabel::kBuildingLots:
      return definition != SettlementDefinition::kBuildingsOnly;
    case ReferenceLabel::kRoadsPaved:
      return definition == SettlementDefinition::kBuildingsLotsRoads;
    case ReferenceLabel::kNone:
      return false;
  }
  return false;
}

void ConfusionMatrix::add(bool classified, bool reference) {
  if (classified) {
    ++(reference ? tp : fp);
  } else {
    ++(reference ? fn : tn);
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

ConfusionMatrix block_agreement(const AssessmentBlock& block, SettlementDefinition definition,
                                int criterion) {
  std::array<bool, 9> ref{};
  int ref_count = 0;
  int map_count = 0;
  for (std::size_t i = 0; i < 9; ++i) {
    ref[i] = is_settlement(block.reference[i], definition);
    ref_count += ref[i] ? 1 : 0;
    map_count += block.classified[i] ? 1 : 0;
  }
  ConfusionMatrix m;
  switch (criterion) {
    case 1:
      for (std::size_t i = 0; i < 9; ++i) {
        m.add(block.classified[i], ref[i]);
      }
      break;
    case 2:
      m.add(map_count >= 5, ref_count >= 5);
      break;
    case 3:
      m.add(map_count >= 5, ref_count >= 1);
      break;
    case 4:
      m.add(map_count >= 1, ref_count >= 1);
      break;
    default:
      throw ContractError("agreement criterion must be 1..4, got " + std::to_string(criterion));
  }
  return m;
}

std::array<bool, 9> block_classification(const Mask& map, const GridGeometry& cells, int col, int row) {
  std::array<bool, 9> out{};
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      int sc = 0;
      int sr = 0;
      const bool inside = detail::nearest_source(map.transform(), map.width(), map.height(),
                                                 cells.transform, col + dc, row + dr, sc, sr);
      out[static_cast<std::size_t>((dr + 1) * 3 + dc + 1)] = inside && map(sc, sr) != 0;
    }
  }
  return out;
}

std::string_view landis_koch(double kappa) {
  if (kappa < 0.0) {
    return "no agreement";
  }
  if (kappa <= 0.20) {
    return "slight";
  }
  if (kappa <= 0.40) {
    return "fair";
  }
  if (kappa <= 0.60) {
    return "moderate";
  }
  if (kappa <= 0.80) {
    return "substantial";
  }
  return "perfect";
}

AccuracyMetrics compute_metrics(const ConfusionMatrix& m) {
  const std::uint64_t total = m.total();
  if (total == 0) {
    throw ContractError("compute_metrics: empty confusion matrix");
  }
  const auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
    if (den == 0) {
      return std::nullopt;
    }
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  AccuracyMetrics out;
  out.pa_settlement = ratio(m.tp, m.tp + m.fn);
  out.pa_non_settlement = ratio(m.tn, m.tn + m.fp);
  out.ua_settlement = ratio(m.tp, m.tp + m.fp);
  out.ua_non_settlement = ratio(m.tn, m.tn + m.fn);
  if (out.pa_settlement && out.pa_non_settlement) {
    out.average_accuracy = (*out.pa_settlement + *out.pa_non_settlement) / 2.0;
  }
  const double n = static_cast<double>(total);
  const double po = static_cast<double>(m.tp + m.tn) / n;
  const double pe = (static_cast<double>(m.tp + m.fp) * static_cast<double>(m.tp + m.fn) +
                     static_cast<double>(m.fn + m.tn) * static_cast<double>(m.fp + m.tn)) /
                    (n * n);
  if (pe < 1.0) {
    out.kappa = (po - pe) / (1.0 - pe);
    out.category = std::string(landis_koch(*out.kappa));
  }
  return out;
}

void ValidationReport::add_block(const AssessmentBlock& block) {
  for (SettlementDefinition d : kAllDefinitions) {
    for (int c : kAllCriteria) {
      matrices_[{d, c}] += block_agreement(block, d, c);
    }
  }
  ++blocks_;
}

void ValidationReport::merge(const ValidationReport& other) {
  for (const auto& [key, m] : other.matrices_) {
    matrices_[key] += m;
  }
  blocks_ += other.blocks_;
}

const ConfusionMatrix& ValidationReport::matrix(SettlementDefinition definition, int criterion) const {
  static const ConfusionMatrix kEmpty;
  const auto it = matrices_.find({definition, criterion});
  return it == matrices_.end() ? kEmpty : it->second;
}

std::uint64_t ValidationReport::assessed_cells() const {
  return matrix(SettlementDefinition::kBuildingsOnly, 1).total();
}

namespace {

std::string field(const std::optional<double>& v) {
  if (!v) {
    return "";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

}  // namespace

std::string ValidationReport::to_csv() const {
  std::ostringstream out;
  out << "definition,criterion,tp,fp,fn,tn,kappa,pa_s,pa_ns,ua_s,ua_ns,aa,category\n";
  for (SettlementDefinition d : kAllDefinitions) {
    for (int c : kAllCriteria) {
      const ConfusionMatrix& m = matrix(d, c);
      out << definition_name(d) << ',' << c << ',' << m.tp << ',' << m.fp << ',' << m.fn << ','
          << m.tn;
      if (m.total() > 0) {
        const AccuracyMetrics a = compute_metrics(m);
        out << ',' << field(a.kappa) << ',' << field(a.pa_settlement) << ','
            << field(a.pa_non_settlement) << ',' << field(a.ua_settlement) << ','
            << field(a.ua_non_settlement) << ',' << field(a.average_accuracy) << ',' << a.category;
      } else {
        out << ",,,,,,,";
      }
      out << '\n';
    }
  }
  return out.str();
}

void ValidationReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot create " + path.string());
  }
  out << to_csv();
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

std::vector<AssessmentBlock> load_reference_blocks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<AssessmentBlock> blocks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream ss(line);
    AssessmentBlock b;
    if (!(ss >> b.lon)) {
      continue;
    }
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!(ss >> b.lat)) {
      throw FormatError(where + ": missing latitude");
    }
    for (std::size_t i = 0; i < 9; ++i) {
      std::string tok;
      if (!(ss >> tok) || tok.size() != 1) {
        throw FormatError(where + ": expected nine single-letter cell labels");
      }
      b.reference[i] = parse_reference_label(tok[0]);
    }
    std::string extra;
    if (ss >> extra) {
      throw FormatError(where + ": trailing field '" + extra + "'");
    }
    blocks.push_back(b);
  }
  return blocks;
}

void save_reference_blocks(std::span<const AssessmentBlock> blocks, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot create " + path.string());
  }
  out << "# lon lat c0 c1 c2 c3 c4 c5 c6 c7 c8 (row-major; B L R N)\n";
  char buf[64];
  for (const AssessmentBlock& b : blocks) {
    std::snprintf(buf, sizeof(buf), "%.10f %.10f", b.lon, b.lat);
    out << buf;
    for (ReferenceLabel l : b.reference) {
      out << ' ' << label_code(l);
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

void classify_blocks(std::vector<AssessmentBlock>& blocks, const Mask& map, const GridGeometry& cells) {
  const GeoTransform& t = cells.transform;
  for (AssessmentBlock& b : blocks) {
    const int col = static_cast<int>(std::floor((b.lon - t.origin_lon) / t.pixel_width));
    const int row = static_cast<int>(std::floor((t.origin_lat - b.lat) / t.pixel_height));
    if (col < 1 || row < 1 || col + 1 >= cells.width || row + 1 >= cells.height) {
      throw DomainError("assessment block at (" + std::to_string(b.lon) + ", " +
                        std::to_string(b.lat) + ") is not fully inside the map");
    }
    b.classified = block_classification(map, cells, col, row);
  }
}

}  // namespace wsf
