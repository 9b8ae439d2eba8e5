// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include "wsf/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wsf/random.hpp"

namespace wsf {

namespace {

constexpr double kTau = 1e-12;

/// Kernel values of a subset of samples, read from a full precomputed matrix.
struct KernelView {
  const double* values;
  std::size_t stride;
  std::span<const std::uint32_t> index;

  const double* row(std::size_t i) const { return values + index[i] * stride; }
  double operator()(std::size_t i, std::size_t j) const { return row(i)[index[j]]; }
};

struct SmoSolution {
  std::vector<double> alpha;
  double rho = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

double compute_rho(std::span<const std::int8_t> y, std::span<const double> alpha,
                   std::span<const double> grad, double C) {
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= C) {
      if (y[t] == -1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else if (alpha[t] <= 0.0) {
      if (y[t] == +1) {
        ub = std::min(ub, yg);
      } else {
        lb = std::max(lb, yg);
      }
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  return n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
}

// Dual soft-margin SVM by SMO with second-order working-set selection
// (Fan, Chen & Lin 2005), no shrinking. `alpha` is the (feasible) start.
SmoSolution solve_smo(const KernelView& kernel, std::span<const std::int8_t> y, double C,
                      const SmoOptions& options, std::vector<double> alpha) {
  const std::size_t n = y.size();
  std::vector<double> grad(n, -1.0);
  std::vector<double> diag(n);
  for (std::size_t t = 0; t < n; ++t) {
    diag[t] = kernel(t, t);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (alpha[j] == 0.0) {
      continue;
    }
    const double* kj = kernel.row(j);
    const double aj = alpha[j] * y[j];
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += aj * y[t] * kj[kernel.index[t]];
    }
  }

  const std::size_t max_iter =
      options.max_iterations > 0 ? options.max_iterations : std::max<std::size_t>(1'000'000, 100 * n);
  SmoSolution sol;
  const double inf = std::numeric_limits<double>::infinity();
  while (true) {
    // i: maximal violating index in I_up.
    double gmax = -inf;
    std::ptrdiff_t i = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == +1) {
        if (alpha[t] < C && -grad[t] >= gmax) {
          gmax = -grad[t];
          i = static_cast<std::ptrdiff_t>(t);
        }
      } else if (alpha[t] > 0.0 && grad[t] >= gmax) {
        gmax = grad[t];
        i = static_cast<std::ptrdiff_t>(t);
      }
    }
    // j: largest second-order decrease among I_low.
    double gmax2 = -inf;
    std::ptrdiff_t j = -1;
    double obj_min = inf;
    if (i >= 0) {
      const auto ii = static_cast<std::size_t>(i);
      const double* ki = kernel.row(ii);
      for (std::size_t t = 0; t < n; ++t) {
        double grad_diff = 0.0;
        if (y[t] == +1) {
          if (!(alpha[t] > 0.0)) {
            continue;
          }
          grad_diff = gmax + grad[t];
          gmax2 = std::max(gmax2, grad[t]);
        } else {
          if (!(alpha[t] < C)) {
            continue;
          }
          grad_diff = gmax - grad[t];
          gmax2 = std::max(gmax2, -grad[t]);
        }
        if (grad_diff > 0.0) {
          double quad = diag[ii] + diag[t] - 2.0 * ki[kernel.index[t]];
          if (quad <= 0.0) {
            quad = kTau;
          }
          const double obj = -(grad_diff * grad_diff) / quad;
          if (obj <= obj_min) {
            obj_min = obj;
            j = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
    }
    if (gmax + gmax2 < options.tolerance || j < 0) {
      sol.converged = true;
      break;
    }
    if (sol.iterations >= max_iter) {
      break;
    }
    ++sol.iterations;

    const auto ii = static_cast<std::size_t>(i);
    const auto jj = static_cast<std::size_t>(j);
    const double* ki = kernel.row(ii);
    const double* kj = kernel.row(jj);
    const double kij = ki[kernel.index[jj]];
    const double old_ai = alpha[ii];
    const double old_aj = alpha[jj];
    double quad = diag[ii] + diag[jj] - 2.0 * kij;
    if (quad <= 0.0) {
      quad = kTau;
    }
    if (y[ii] != y[jj]) {
      const double delta = (-grad[ii] - grad[jj]) / quad;
      const double diff = alpha[ii] - alpha[jj];
      alpha[ii] += delta;
      alpha[jj] += delta;
      if (diff > 0.0) {
        if (alpha[jj] < 0.0) {
          alpha[jj] = 0.0;
          alpha[ii] = diff;
        }
      } else if (alpha[ii] < 0.0) {
        alpha[ii] = 0.0;
        alpha[jj] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[ii] > C) {
          alpha[ii] = C;
          alpha[jj] = C - diff;
        }
      } else if (alpha[jj] > C) {
        alpha[jj] = C;
        alpha[ii] = C + diff;
      }
    } else {
      const double delta = (grad[ii] - grad[jj]) / quad;
      const double sum = alpha[ii] + alpha[jj];
      alpha[ii] -= delta;
      alpha[jj] += delta;
      if (sum > C) {
        if (alpha[ii] > C) {
          alpha[ii] = C;
          alpha[jj] = sum - C;
        }
      } else if (alpha[jj] < 0.0) {
        alpha[jj] = 0.0;
        alpha[ii] = sum;
      }
      if (sum > C) {
        if (alpha[jj] > C) {
          alpha[jj] = C;
          alpha[ii] = sum - C;
        }
      } else if (alpha[ii] < 0.0) {
        alpha[ii] = 0.0;
        alpha[jj] = sum;
      }
    }
    const double dai = (alpha[ii] - old_ai) * y[ii];
    const double daj = (alpha[jj] - old_aj) * y[jj];
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (ki[kernel.index[t]] * dai + kj[kernel.index[t]] * daj);
    }
  }
  sol.rho = compute_rho(y, alpha, grad, C);
  sol.alpha = std::move(alpha);
  return sol;
}

std::vector<double> squared_distances(const TrainingSet& data) {
  const std::size_t n = data.size();
  const std::size_t d = data.dimensions();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    const double* xa = data[a].features.data();
    for (std::size_t b = a + 1; b < n; ++b) {
      const double* xb = data[b].features.data();
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = xa[k] - xb[k];
        s += diff * diff;
      }
      dist[a * n + b] = s;
      dist[b * n + a] = s;
    }
  }
  return dist;
}

std::vector<std::int8_t> signed_labels(const TrainingSet& data) {
  std::vector<std::int8_t> y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    y[i] = data[i].label == Label::kSettlement ? +1 : -1;
  }
  return y;
}

void require_both_classes(const TrainingSet& data) {
  if (data.count(Label::kSettlement) == 0 || data.count(Label::kNonSettlement) == 0) {
    throw DomainError("SVM training needs samples of both classes");
  }
}

}  // namespace

double rbf_kernel(std::span<const double> u, std::span<const double> v, double gamma) {
  if (u.size() != v.size()) {
    throw ContractError("rbf_kernel: dimension mismatch");
  }
  if (!(gamma > 0.0)) {
    throw ContractError("rbf_kernel: gamma must be positive");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = u[k] - v[k];
    s += d * d;
  }
  return std::exp(-gamma * s);
}

Standardizer Standardizer::fit(const TrainingSet& data) {
  Standardizer s;
  const std::size_t d = data.dimensions();
  s.shift.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  if (data.empty()) {
    return s;
  }
  const double n = static_cast<double>(data.size());
  for (const Sample& x : data.samples()) {
    for (std::size_t k = 0; k < d; ++k) {
      s.shift[k] += x.features[k];
    }
  }
  for (double& m : s.shift) {
    m /= n;
  }
  std::vector<double> var(d, 0.0);
  for (const Sample& x : data.samples()) {
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = x.features[k] - s.shift[k];
      var[k] += diff * diff;
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    const double sd = std::sqrt(var[k] / n);
    s.scale[k] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
  if (identity()) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  if (in.size() != shift.size() || out.size() != shift.size()) {
    throw ContractError("standardizer dimension mismatch");
  }
  for (std::size_t k = 0; k < in.size(); ++k) {
    out[k] = (in[k] - shift[k]) / scale[k];
  }
}

TrainingSet Standardizer::apply(const TrainingSet& data) const {
  std::vector<Sample> out;
  out.reserve(data.size());
  for (const Sample& s : data.samples()) {
    Sample t = s;
    apply(s.features, t.features);
    out.push_back(std::move(t));
  }
  return TrainingSet(std::move(out));
}

double SvmModel::decision_scaled(std::span<const double> x) const {
  if (x.size() != dimensions) {
    throw ContractError("SVM decision: expected " + std::to_string(dimensions) +
                        " features, got " + std::to_string(x.size()));
  }
  double f = bias;
  const double* sv = support_vectors.data();
  for (std::size_t i = 0; i < coefficients.size(); ++i, sv += dimensions) {
    double s = 0.0;
    for (std::size_t k = 0; k < dimensions; ++k) {
      const double d = sv[k] - x[k];
      s += d * d;
    }
    f += coefficients[i] * std::exp(-gamma * s);
  }
  return f;
}

double SvmModel::decision(std::span<const double> features) const {
  if (scaler.identity()) {
    return decision_scaled(features);
  }
  std::vector<double> scaled(features.size());
  scaler.apply(features, scaled);
  return decision_scaled(scaled);
}

void SvmModel::check_invariants(double equality_tol) const {
  double sum = 0.0;
  for (double c : coefficients) {
    const double alpha = std::abs(c);
    if (alpha < 0.0 || alpha > C * (1.0 + 1e-12)) {
      throw ContractError("SVM dual coefficient outside [0, C]");
    }
    sum += c;
  }
  if (std::abs(sum) > equality_tol) {
    throw ContractError("SVM dual coefficients violate sum(alpha*y) = 0");
  }
}

SvmModel train_svm(const TrainingSet& data, double C, double gamma, const SmoOptions& options) {
  if (!(C > 0.0) || !(gamma > 0.0)) {
    throw ContractError("train_svm: C and gamma must be positive");
  }
  require_both_classes(data);
  const std::size_t n = data.size();
  std::vector<double> kernel = squared_distances(data);
  for (double& v : kernel) {
    v = std::exp(-gamma * v);
  }
  std::vector<std::uint32_t> index(n);
  std::iota(index.begin(), index.end(), 0u);
  const std::vector<std::int8_t> y = signed_labels(data);
  SmoSolution sol = solve_smo({kernel.data(), n, index}, y, C, options, std::vector<double>(n, 0.0));
  if (!sol.converged) {
    throw TrainingError("SMO did not reach tolerance " + std::to_string(options.tolerance) +
                        " within " + std::to_string(sol.iterations) + " iterations (C=" +
                        std::to_string(C) + ", gamma=" + std::to_string(gamma) + ", n=" +
                        std::to_string(n) + ")");
  }
  SvmModel model;
  model.C = C;
  model.gamma = gamma;
  model.bias = -sol.rho;
  model.dimensions = data.dimensions();
  model.iterations = sol.iterations;
  for (std::size_t t = 0; t < n; ++t) {
    if (sol.alpha[t] > 0.0) {
      model.coefficients.push_back(sol.alpha[t] * y[t]);
      const auto& f = data[t].features;
      model.support_vectors.insert(model.support_vectors.end(), f.begin(), f.end());
    }
  }
  return model;
}

HyperGrid HyperGrid::standard() {
  HyperGrid g;
  for (int i = 0; i <= 13; ++i) {
    g.c_values.push_back(std::ldexp(1.0, i));
  }
  for (int j = 1; j <= 20; ++j) {
    g.gamma_values.push_back(0.1 * j);
  }
  return g;
}

std::vector<int> stratified_folds(const TrainingSet& data, int folds, std::uint64_t seed) {
  if (folds < 2) {
    throw ContractError("cross validation needs at least 2 folds");
  }
  std::vector<int> fold(data.size(), 0);
  Rng rng(seed);
  for (Label label : {Label::kSettlement, Label::kNonSettlement}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data[i].label == label) {
        members.push_back(i);
      }
    }
    if (members.size() < static_cast<std::size_t>(folds)) {
      throw DomainError("stratified " + std::to_string(folds) + "-fold CV needs at least " +
                        std::to_string(folds) + " samples per class, got " +
                        std::to_string(members.size()));
    }
    rng.shuffle(members);
    for (std::size_t k = 0; k < members.size(); ++k) {
      fold[members[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
    }
  }
  return fold;
}

GridSearchResult grid_search_cv(const TrainingSet& data, const HyperGrid& grid, int folds,
                                std::uint64_t seed, const SmoOptions& options) {
  if (grid.size() == 0) {
    throw ContractError("grid_search_cv: empty hyper-parameter grid");
  }
  require_both_classes(data);
  const std::vector<int> fold = stratified_folds(data, folds, seed);
  const std::size_t n = data.size();
  const std::vector<double> dist = squared_distances(data);
  const std::vector<std::int8_t> y = signed_labels(data);

  // Warm starts run through C in ascending order.
  std::vector<std::size_t> c_order(grid.c_values.size());
  std::iota(c_order.begin(), c_order.end(), 0u);
  std::stable_sort(c_order.begin(), c_order.end(),
                   [&](std::size_t a, std::size_t b) { return grid.c_values[a] < grid.c_values[b]; });

  const std::size_t n_gamma = grid.gamma_values.size();
  std::vector<GridCell> cells(grid.size());
  for (std::size_t ci = 0; ci < grid.c_values.size(); ++ci) {
    for (std::size_t gi = 0; gi < n_gamma; ++gi) {
      cells[ci * n_gamma + gi] = {grid.c_values[ci], grid.gamma_values[gi], 0, true};
    }
  }

  std::vector<double> kernel(n * n);
  for (std::size_t gi = 0; gi < n_gamma; ++gi) {
    const double gamma = grid.gamma_values[gi];
    for (std::size_t k = 0; k < kernel.size(); ++k) {
      kernel[k] = std::exp(-gamma * dist[k]);
    }
    for (int f = 0; f < folds; ++f) {
      std::vector<std::uint32_t> train;
      std::vector<std::uint32_t> test;
      for (std::size_t i = 0; i < n; ++i) {
        (fold[i] == f ? test : train).push_back(static_cast<std::uint32_t>(i));
      }
      std::vector<std::int8_t> y_train(train.size());
      for (std::size_t a = 0; a < train.size(); ++a) {
        y_train[a] = y[train[a]];
      }
      const KernelView view{kernel.data(), n, train};
      std::vector<double> warm(train.size(), 0.0);
      for (std::size_t ci : c_order) {
        GridCell& cell = cells[ci * n_gamma + gi];
        SmoSolution sol = solve_smo(view, y_train, cell.C, options, warm);
        if (!sol.converged) {
          cell.converged = false;
          std::fill(warm.begin(), warm.end(), 0.0);
          continue;
        }
        for (std::uint32_t t : test) {
          const double* kt = kernel.data() + static_cast<std::size_t>(t) * n;
          double dec = -sol.rho;
          for (std::size_t a = 0; a < train.size(); ++a) {
            if (sol.alpha[a] > 0.0) {
              dec += sol.alpha[a] * y_train[a] * kt[train[a]];
            }
          }
          const int predicted = dec > 0.0 ? +1 : -1;
          cell.correct += predicted == y[t] ? 1 : 0;
        }
        warm = std::move(sol.alpha);
      }
    }
  }

  GridSearchResult result;
  result.evaluations = cells.size();
  const GridCell* best = nullptr;
  for (const GridCell& cell : cells) {
    if (!cell.converged) {
      continue;
    }
    if (best == nullptr || cell.correct > best->correct ||
        (cell.correct == best->correct &&
         (cell.C < best->C || (cell.C == best->C && cell.gamma < best->gamma)))) {
      best = &cell;
    }
  }
  if (best == nullptr) {
    throw TrainingError("grid search: no hyper-parameter pair converged");
  }
  result.C = best->C;
  result.gamma = best->gamma;
  result.accuracy = static_cast<double>(best->correct) / static_cast<double>(n);
  result.cells = std::move(cells);
  return result;
}

}  // namespace wsf
