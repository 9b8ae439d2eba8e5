// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wsf/svm.hpp"

namespace wsf {

struct EnsembleOptions {
  std::size_t members = 20;
  int vote_threshold = 11;
  std::size_t samples_per_class = 500;
  int folds = 5;
  HyperGrid grid = HyperGrid::standard();
  SmoOptions smo;
  int workers = 1;
};

/// Majority-vote ensemble of independently trained SVMs.
struct EnsembleModel {
  std::vector<SvmModel> members;
  int vote_threshold = 11;
  std::vector<std::string> feature_names;

  void validate() const;
};

/// What one member saw and chose; part of the provenance report.
struct MemberReport {
  std::uint64_t seed = 0;
  double C = 0.0;
  double gamma = 0.0;
  double cv_accuracy = 0.0;
  std::size_t support_vectors = 0;
  std::size_t training_samples = 0;
  SamplingReport sampling;
};

/// Settlement when at least `threshold` members vote settlement.
inline bool vote_decision(int settlement_votes, int threshold) {
  return settlement_votes >= threshold;
}

/// Draws `members` training sets from the candidates (per-member derived
/// seeds), grid-searches each by stratified CV and trains the final model on
/// the standardized set. CV folds share one seed so identical training sets
/// give identical members.
EnsembleModel train_ensemble(const CandidateMasks& candidates, const FeatureStack& features,
                             const EnsembleOptions& options, std::uint64_t seed,
                             std::vector<MemberReport>* report = nullptr);

/// Per-pixel majority vote. Pixels with an incomplete feature vector are
/// non-settlement. Feature bands must match the ensemble's by name and order.
Mask classify_map(const EnsembleModel& ensemble, const FeatureStack& features, int workers = 1);

/// Majority vote over already computed member maps.
Mask majority_vote(std::span<const Mask> member_maps, int threshold);

/// Text persistence with hexadecimal floats, so reloads are bit-identical.
void save_ensemble(const EnsembleModel& ensemble, const std::filesystem::path& path);
EnsembleModel load_ensemble(const std::filesystem::path& path);

}  // namespace wsf
