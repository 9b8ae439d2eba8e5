// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "wsf/svm.hpp"

using namespace wsf;

namespace {

TrainingSet blobs(std::size_t n_per_class, double separation, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 0.5);
  TrainingSet t;
  for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
    const bool pos = i % 2 == 0;
    const double cx = pos ? separation : -separation;
    t.add({static_cast<int>(i), 0, {cx + noise(gen), noise(gen)},
           pos ? Label::kSettlement : Label::kNonSettlement});
  }
  return t;
}

TrainingSet xor_set(std::size_t n, std::uint64_t seed, int row) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TrainingSet t;
  std::size_t made = 0;
  while (made < n) {
    const double x = u(gen);
    const double y = u(gen);
    if (std::abs(x) < 0.1 || std::abs(y) < 0.1) {
      continue;  // keep a margin around the axes
    }
    t.add({static_cast<int>(made), row, {x, y},
           (x > 0) == (y > 0) ? Label::kSettlement : Label::kNonSettlement});
    ++made;
  }
  return t;
}

double accuracy(const SvmModel& m, const TrainingSet& t) {
  std::size_t ok = 0;
  for (const Sample& s : t.samples()) {
    ok += m.predict(s.features) == (s.label == Label::kSettlement);
  }
  return static_cast<double>(ok) / static_cast<double>(t.size());
}

}  // namespace

TEST_CASE("rbf kernel") {
  const std::vector<double> u{1.0, 2.0};
  const std::vector<double> v{2.0, 0.0};
  CHECK(rbf_kernel(u, v, 0.5) == doctest::Approx(std::exp(-0.5 * 5.0)));
  CHECK(rbf_kernel(u, u, 3.0) == 1.0);
  CHECK_THROWS_AS(rbf_kernel(u, std::vector<double>{1.0}, 1.0), ContractError);
  CHECK_THROWS_AS(rbf_kernel(u, v, 0.0), ContractError);
}

TEST_CASE("standardizer centres and scales") {
  TrainingSet t;
  t.add({0, 0, {1.0, 5.0}, Label::kSettlement});
  t.add({1, 0, {3.0, 5.0}, Label::kNonSettlement});
  t.add({2, 0, {5.0, 5.0}, Label::kNonSettlement});
  const Standardizer s = Standardizer::fit(t);
  const TrainingSet z = s.apply(t);
  CHECK(z[1].features[0] == doctest::Approx(0.0));
  CHECK(z[0].features[0] == doctest::Approx(-z[2].features[0]));
  CHECK(z[0].features[1] == doctest::Approx(0.0));  // constant dimension
  double ss = 0.0;
  for (const Sample& x : z.samples()) {
    ss += x.features[0] * x.features[0];
  }
  CHECK(ss / 3.0 == doctest::Approx(1.0));  // unit population variance
}

TEST_CASE("separable blobs satisfy the dual constraints and KKT conditions") {
  const TrainingSet t = blobs(60, 3.0, 1);
  const SvmModel m = train_svm(t, 10.0, 0.5);
  m.check_invariants();
  CHECK(accuracy(m, t) == 1.0);
  CHECK(m.support_count() > 0);
  CHECK(m.support_count() < t.size());

  // Recover alpha per training sample and check complementary slackness.
  for (const Sample& s : t.samples()) {
    double alpha = 0.0;
    for (std::size_t k = 0; k < m.support_count(); ++k) {
      const auto sv = m.support_vector(k);
      if (sv[0] == s.features[0] && sv[1] == s.features[1]) {
        alpha = std::abs(m.coefficients[k]);
      }
    }
    const double yf = (s.label == Label::kSettlement ? 1.0 : -1.0) * m.decision(s.features);
    if (alpha == 0.0) {
      CHECK(yf >= 1.0 - 1e-2);
    } else if (alpha < m.C) {
      CHECK(yf == doctest::Approx(1.0).epsilon(1e-2));
    } else {
      CHECK(yf <= 1.0 + 1e-2);
    }
  }
}

TEST_CASE("xor is learned by the cross-validated model") {
  const TrainingSet train = xor_set(200, 2, 0);
  const TrainingSet test = xor_set(400, 3, 1);
  HyperGrid grid = HyperGrid::standard();
  const GridSearchResult g = grid_search_cv(train, grid, 5, 7);
  CHECK(g.evaluations == 280);
  CHECK(g.cells.size() == 280);
  const SvmModel m = train_svm(train, g.C, g.gamma);
  m.check_invariants();
  CHECK(accuracy(m, test) >= 0.95);
}

TEST_CASE("grid search is deterministic under a seed and prefers small C and gamma on ties") {
  const TrainingSet t = blobs(30, 4.0, 3);
  HyperGrid grid;
  grid.c_values = {4.0, 1.0, 2.0};
  grid.gamma_values = {0.2, 0.1};
  const GridSearchResult a = grid_search_cv(t, grid, 5, 11);
  const GridSearchResult b = grid_search_cv(t, grid, 5, 11);
  CHECK(a.C == b.C);
  CHECK(a.gamma == b.gamma);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].correct == b.cells[i].correct);
  }
  // Well separated blobs: every pair is perfect, so the smallest pair wins.
  CHECK(a.accuracy == 1.0);
  CHECK(a.C == 1.0);
  CHECK(a.gamma == 0.1);
}

TEST_CASE("stratified folds balance classes") {
  const TrainingSet t = blobs(25, 2.0, 4);
  const std::vector<int> f = stratified_folds(t, 5, 1);
  for (int k = 0; k < 5; ++k) {
    int pos = 0;
    int neg = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (f[i] == k) {
        (t[i].label == Label::kSettlement ? pos : neg) += 1;
      }
    }
    CHECK(pos == 5);
    CHECK(neg == 5);
  }
  CHECK(f == stratified_folds(t, 5, 1));
  CHECK_THROWS_AS(stratified_folds(blobs(3, 2.0, 4), 5, 1), DomainError);
}

TEST_CASE("training rejects one-class data and bad parameters") {
  TrainingSet t;
  t.add({0, 0, {1.0}, Label::kSettlement});
  t.add({1, 0, {2.0}, Label::kSettlement});
  CHECK_THROWS_AS(train_svm(t, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(train_svm(blobs(5, 2.0, 1), 0.0, 1.0), ContractError);
}

TEST_CASE("an iteration cap that is too small is reported") {
  SmoOptions o;
  o.max_iterations = 1;
  CHECK_THROWS_AS(train_svm(xor_set(100, 5, 0), 100.0, 2.0, o), TrainingError);
}
