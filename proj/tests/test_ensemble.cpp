// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "wsf/ensemble.hpp"

using namespace wsf;

namespace {

struct Scene {
  CandidateMasks candidates;
  FeatureStack features;
};

// Left half bright, right half dark, with noise; candidates in the outer columns.
Scene two_class_scene(int w, int h, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  Grid a(w, h, fixture::unit_transform(), 0.0, kNodata);
  Grid b(w, h, fixture::unit_transform(), 0.0, kNodata);
  Mask s(w, h, fixture::unit_transform(), 0);
  Mask ns(w, h, fixture::unit_transform(), 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const bool left = c < w / 2;
      a(c, r) = (left ? 2.0 : -2.0) + noise(gen);
      b(c, r) = noise(gen);
      if (c < w / 4) s(c, r) = 1;
      if (c >= 3 * w / 4) ns(c, r) = 1;
    }
  }
  Scene sc{{s, ns}, {}};
  sc.features.add("a", a);
  sc.features.add("b", b);
  return sc;
}

EnsembleOptions small_options() {
  EnsembleOptions o;
  o.members = 3;
  o.vote_threshold = 2;
  o.samples_per_class = 25;
  o.grid.c_values = {1.0, 4.0};
  o.grid.gamma_values = {0.1, 0.5};
  return o;
}

}  // namespace

TEST_CASE("vote decision at every count of a 20-member ensemble") {
  std::vector<Mask> members(20, Mask(21, 1, fixture::unit_transform(), 0));
  // Pixel v receives exactly v settlement votes.
  for (int v = 0; v <= 20; ++v) {
    for (int m = 0; m < v; ++m) {
      members[static_cast<std::size_t>(m)](v, 0) = 1;
    }
  }
  const Mask out = majority_vote(members, 11);
  for (int v = 0; v <= 20; ++v) {
    CHECK(out(v, 0) == (v >= 11 ? 1 : 0));
    CHECK(vote_decision(v, 11) == (v >= 11));
  }
  CHECK_THROWS_AS(majority_vote(std::vector<Mask>{}, 1), ContractError);
}

TEST_CASE("ensemble training, classification and persistence") {
  const Scene sc = two_class_scene(24, 12, 1);
  std::vector<MemberReport> rep;
  const EnsembleModel e = train_ensemble(sc.candidates, sc.features, small_options(), 42, &rep);
  REQUIRE(e.members.size() == 3);
  CHECK(rep.size() == 3);
  CHECK(rep[0].seed != rep[1].seed);
  CHECK(rep[0].training_samples == 50);
  CHECK(e.feature_names == std::vector<std::string>{"a", "b"});

  const Mask map = classify_map(e, sc.features);
  std::size_t correct = 0;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      correct += (map(c, r) == 1) == (c < map.width() / 2);
    }
  }
  CHECK(correct >= map.size() * 95 / 100);

  // The map is the vote over the individual member predictions.
  std::vector<Mask> member_maps;
  std::vector<double> v(2);
  for (const SvmModel& m : e.members) {
    Mask mm(map.geometry(), 0);
    for (std::size_t i = 0; i < mm.size(); ++i) {
      sc.features.pixel_vector(i, v);
      mm[i] = m.predict(v) ? 1 : 0;
    }
    member_maps.push_back(mm);
  }
  const Mask voted = majority_vote(member_maps, 2);
  CHECK(std::equal(voted.values().begin(), voted.values().end(), map.values().begin()));

  const auto dir = fixture::scratch("ensemble");
  save_ensemble(e, dir / "model.txt");
  const EnsembleModel back = load_ensemble(dir / "model.txt");
  const Mask map2 = classify_map(back, sc.features, 2);
  CHECK(std::equal(map2.values().begin(), map2.values().end(), map.values().begin()));
}

TEST_CASE("ensembles are reproducible and independent of worker count") {
  const Scene sc = two_class_scene(16, 8, 2);
  EnsembleOptions o = small_options();
  const EnsembleModel a = train_ensemble(sc.candidates, sc.features, o, 5);
  o.workers = 3;
  const EnsembleModel b = train_ensemble(sc.candidates, sc.features, o, 5);
  for (std::size_t k = 0; k < a.members.size(); ++k) {
    CHECK(a.members[k].coefficients == b.members[k].coefficients);
    CHECK(a.members[k].bias == b.members[k].bias);
  }
}

TEST_CASE("ensemble contracts") {
  const Scene sc = two_class_scene(16, 8, 3);
  EnsembleOptions o = small_options();
  o.vote_threshold = 4;
  CHECK_THROWS_AS(train_ensemble(sc.candidates, sc.features, o, 1), ContractError);
  o = small_options();
  o.members = 0;
  CHECK_THROWS_AS(train_ensemble(sc.candidates, sc.features, o, 1), ContractError);

  const EnsembleModel e = train_ensemble(sc.candidates, sc.features, small_options(), 1);
  FeatureStack other;
  other.add("a", sc.features.band("a"));
  CHECK_THROWS_AS(classify_map(e, other), ContractError);

  const auto dir = fixture::scratch("ensemble_bad");
  std::ofstream(dir / "bad.txt") << "not a model\n";
  CHECK_THROWS_AS(load_ensemble(dir / "bad.txt"), FormatError);
}
