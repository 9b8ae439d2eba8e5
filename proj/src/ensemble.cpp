// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/ensemble.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wsf/log.hpp"
#include "wsf/parallel.hpp"
#include "wsf/random.hpp"

namespace wsf {

void EnsembleModel::validate() const {
  if (members.empty()) {
    throw ContractError("ensemble has no members");
  }
  if (vote_threshold < 1 || vote_threshold > static_cast<int>(members.size())) {
    throw ContractError("vote threshold must lie in [1, members]");
  }
  for (const SvmModel& m : members) {
    if (m.dimensions != feature_names.size()) {
      throw ContractError("ensemble member dimensionality does not match its feature names");
    }
  }
}

EnsembleModel train_ensemble(const CandidateMasks& candidates, const FeatureStack& features,
                             const EnsembleOptions& options, std::uint64_t seed,
                             std::vector<MemberReport>* report) {
  if (options.members == 0) {
    throw ContractError("ensemble needs at least one member");
  }
  EnsembleModel ensemble;
  ensemble.vote_threshold = options.vote_threshold;
  ensemble.feature_names = features.names();
  ensemble.members.resize(options.members);
  std::vector<MemberReport> reports(options.members);
  const std::uint64_t cv_seed = derive_seed(seed, "cv-folds");

  parallel_for(options.members, options.workers, [&](std::size_t k) {
    MemberReport& rep = reports[k];
    rep.seed = derive_seed(seed, static_cast<std::uint64_t>(k));
    const TrainingSet raw =
        sample_training(candidates, features, options.samples_per_class, rep.seed, &rep.sampling);
    const Standardizer scaler = Standardizer::fit(raw);
    const TrainingSet scaled = scaler.apply(raw);
    const GridSearchResult search = grid_search_cv(scaled, options.grid, options.folds, cv_seed, options.smo);
    SvmModel model = train_svm(scaled, search.C, search.gamma, options.smo);
    model.scaler = scaler;
    rep.C = search.C;
    rep.gamma = search.gamma;
    rep.cv_accuracy = search.accuracy;
    rep.support_vectors = model.support_count();
    rep.training_samples = scaled.size();
    ensemble.members[k] = std::move(model);
    log::debug("member " + std::to_string(k) + ": C=" + std::to_string(rep.C) +
               " gamma=" + std::to_string(rep.gamma) + " cv=" + std::to_string(rep.cv_accuracy));
  });
  ensemble.validate();
  if (report != nullptr) {
    *report = std::move(reports);
  }
  return ensemble;
}

Mask classify_map(const EnsembleModel& ensemble, const FeatureStack& features, int workers) {
  ensemble.validate();
  if (features.names() != ensemble.feature_names) {
    throw ContractError("classify_map: feature stack has " + std::to_string(features.size()) +
                        " bands that do not match the ensemble's " +
                        std::to_string(ensemble.feature_names.size()));
  }
  const GridGeometry g = features.geometry();
  Mask out(g, 0);
  const int n_members = static_cast<int>(ensemble.members.size());
  const int threshold = ensemble.vote_threshold;
  parallel_for(static_cast<std::size_t>(g.height), workers, [&](std::size_t row) {
    std::vector<double> raw(features.size());
    std::vector<double> scaled(features.size());
    for (int col = 0; col < g.width; ++col) {
      const std::size_t i = row * static_cast<std::size_t>(g.width) + static_cast<std::size_t>(col);
      if (!features.pixel_vector(i, raw)) {
        continue;
      }
      int votes = 0;
      for (int m = 0; m < n_members; ++m) {
        // Stop once the outcome can no longer change.
        if (votes >= threshold || votes + (n_members - m) < threshold) {
          break;
        }
        const SvmModel& model = ensemble.members[static_cast<std::size_t>(m)];
        model.scaler.apply(raw, scaled);
        votes += model.decision_scaled(scaled) > 0.0 ? 1 : 0;
      }
      out[i] = vote_decision(votes, threshold) ? 1 : 0;
    }
  });
  return out;
}

Mask majority_vote(std::span<const Mask> member_maps, int threshold) {
  if (member_maps.empty()) {
    throw ContractError("majority_vote: no member maps");
  }
  Mask out(member_maps.front().geometry(), 0);
  for (const Mask& m : member_maps) {
    require_same_grid(m, out, "majority_vote");
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    int votes = 0;
    for (const Mask& m : member_maps) {
      votes += m[i] != 0 ? 1 : 0;
    }
    out[i] = vote_decision(votes, threshold) ? 1 : 0;
  }
  return out;
}

namespace {

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_real(const std::string& token, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    throw FormatError(where + ": bad number '" + token + "'");
  }
  return v;
}

class Reader {
 public:
  Reader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) {
      throw FormatError(name_ + ": unexpected end of file");
    }
    return w;
  }
  void expect(const std::string& key) {
    const std::string w = word();
    if (w != key) {
      throw FormatError(name_ + ": expected '" + key + "', found '" + w + "'");
    }
  }
  double real() { return parse_real(word(), name_); }
  std::size_t count() {
    const std::string w = word();
    try {
      return static_cast<std::size_t>(std::stoull(w));
    } catch (const std::exception&) {
      throw FormatError(name_ + ": bad count '" + w + "'");
    }
  }

 private:
  std::istream& in_;
  std::string name_;
};

}  // namespace

void save_ensemble(const EnsembleModel& ensemble, const std::filesystem::path& path) {
  ensemble.validate();
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot create " + path.string());
  }
  out << "wsf-ensemble 1\n";
  out << "members " << ensemble.members.size() << "\n";
  out << "vote_threshold " << ensemble.vote_threshold << "\n";
  out << "features " << ensemble.feature_names.size();
  for (const std::string& n : ensemble.feature_names) {
    out << ' ' << n;
  }
  out << "\n";
  for (std::size_t k = 0; k < ensemble.members.size(); ++k) {
    const SvmModel& m = ensemble.members[k];
    out << "member " << k << "\n";
    out << "C " << hex(m.C) << "\ngamma " << hex(m.gamma) << "\nbias " << hex(m.bias) << "\n";
    out << "scaler " << (m.scaler.identity() ? 0 : m.dimensions) << "\n";
    if (!m.scaler.identity()) {
      for (std::size_t d = 0; d < m.dimensions; ++d) {
        out << hex(m.scaler.shift[d]) << ' ' << hex(m.scaler.scale[d]) << "\n";
      }
    }
    out << "support_vectors " << m.support_count() << "\n";
    for (std::size_t i = 0; i < m.support_count(); ++i) {
      out << hex(m.coefficients[i]);
      for (double v : m.support_vector(i)) {
        out << ' ' << hex(v);
      }
      out << "\n";
    }
  }
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

EnsembleModel load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  Reader r(in, path.string());
  r.expect("wsf-ensemble");
  if (r.count() != 1) {
    throw FormatError(path.string() + ": unsupported ensemble version");
  }
  EnsembleModel e;
  r.expect("members");
  const std::size_t members = r.count();
  r.expect("vote_threshold");
  e.vote_threshold = static_cast<int>(r.count());
  r.expect("features");
  const std::size_t dims = r.count();
  for (std::size_t d = 0; d < dims; ++d) {
    e.feature_names.push_back(r.word());
  }
  for (std::size_t k = 0; k < members; ++k) {
    r.expect("member");
    if (r.count() != k) {
      throw FormatError(path.string() + ": members out of order");
    }
    SvmModel m;
    m.dimensions = dims;
    r.expect("C");
    m.C = r.real();
    r.expect("gamma");
    m.gamma = r.real();
    r.expect("bias");
    m.bias = r.real();
    r.expect("scaler");
    const std::size_t scaler_dims = r.count();
    if (scaler_dims != 0 && scaler_dims != dims) {
      throw FormatError(path.string() + ": scaler dimensionality mismatch");
    }
    for (std::size_t d = 0; d < scaler_dims; ++d) {
      m.scaler.shift.push_back(r.real());
      m.scaler.scale.push_back(r.real());
    }
    r.expect("support_vectors");
    const std::size_t n_sv = r.count();
    m.coefficients.reserve(n_sv);
    m.support_vectors.reserve(n_sv * dims);
    for (std::size_t i = 0; i < n_sv; ++i) {
      m.coefficients.push_back(r.real());
      for (std::size_t d = 0; d < dims; ++d) {
        m.support_vectors.push_back(r.real());
      }
    }
    e.members.push_back(std::move(m));
  }
  e.validate();
  return e;
}

}  // namespace wsf
