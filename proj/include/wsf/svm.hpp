// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wsf/training.hpp"

namespace wsf {

/// exp(-gamma * |u - v|^2).
double rbf_kernel(std::span<const double> u, std::span<const double> v, double gamma);

/// Per-dimension affine map x' = (x - shift) / scale. Empty = identity.
struct Standardizer {
  std::vector<double> shift;
  std::vector<double> scale;

  /// Zero mean, unit variance over `data`; constant dimensions keep scale 1.
  static Standardizer fit(const TrainingSet& data);
  bool identity() const { return shift.empty(); }
  void apply(std::span<const double> in, std::span<double> out) const;
  TrainingSet apply(const TrainingSet& data) const;
};

struct SmoOptions {
  double tolerance = 1e-3;         // maximal KKT violation at exit
  std::size_t max_iterations = 0;  // 0: max(10^6, 100 n)
};

/// Soft-margin binary SVM with RBF kernel. Settlement is the positive class.
class SvmModel {
 public:
  double gamma = 1.0;
  double C = 1.0;
  double bias = 0.0;
  std::size_t dimensions = 0;
  std::vector<double> support_vectors;  // row-major, scaled feature space
  std::vector<double> coefficients;     // alpha_i * y_i
  Standardizer scaler;
  std::size_t iterations = 0;

  std::size_t support_count() const { return coefficients.size(); }
  std::span<const double> support_vector(std::size_t i) const {
    return {support_vectors.data() + i * dimensions, dimensions};
  }

  /// Decision value of a raw (unscaled) feature vector.
  double decision(std::span<const double> features) const;
  /// Decision value of an already scaled vector.
  double decision_scaled(std::span<const double> scaled) const;
  /// True for settlement (decision > 0).
  bool predict(std::span<const double> features) const { return decision(features) > 0.0; }

  /// Throws ContractError unless 0 <= alpha <= C and sum(alpha*y) ~ 0.
  void check_invariants(double equality_tol = 1e-6) const;
};

/// Trains on `data` as given (features are assumed already scaled). The
/// returned model has an identity scaler. DomainError for single-class data,
/// TrainingError when the iteration cap is hit.
SvmModel train_svm(const TrainingSet& data, double C, double gamma, const SmoOptions& options = {});

/// Hyper-parameter lattice searched by cross validation.
struct HyperGrid {
  std::vector<double> c_values;
  std::vector<double> gamma_values;

  /// C = 2^i for i = 0..13 and gamma = 0.1 * j for j = 1..20.
  static HyperGrid standard();
  std::size_t size() const { return c_values.size() * gamma_values.size(); }
};

struct GridCell {
  double C = 0.0;
  double gamma = 0.0;
  std::size_t correct = 0;  // summed over folds
  bool converged = true;
};

struct GridSearchResult {
  double C = 0.0;
  double gamma = 0.0;
  double accuracy = 0.0;
  std::size_t evaluations = 0;
  std::vector<GridCell> cells;
};

/// Stratified k-fold grid search. Maximises pooled CV accuracy; ties go to
/// the smaller C, then the smaller gamma. Pairs whose solver hit the
/// iteration cap are never selected. DomainError when a class has fewer than
/// `folds` samples.
GridSearchResult grid_search_cv(const TrainingSet& data, const HyperGrid& grid, int folds,
                                std::uint64_t seed, const SmoOptions& options = {});

/// Stratified fold index per sample.
std::vector<int> stratified_folds(const TrainingSet& data, int folds, std::uint64_t seed);

}  // namespace wsf
