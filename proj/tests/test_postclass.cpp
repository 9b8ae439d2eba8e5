// Copyright 2026 The WSF Desk Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "fixtures.hpp"
#include "wsf/postclass.hpp"

using namespace wsf;

TEST_CASE("reference layer roles") {
  ReferenceLayerSet refs;
  refs.add("osm-s", fixture::mask(3, 1, {1, 0, 0}));
  refs.add(AgreementRole::kCil, fixture::mask(3, 1, {1, 1, 0}));
  refs.add("GLC30-S", fixture::mask(3, 1, {0, 1, 1}));
  refs.add(ExclusionRole::kGlc30W, fixture::mask(3, 1, {0, 0, 1}));
  CHECK(refs.agreement_count() == 3);
  CHECK(refs.exclusion_count() == 1);
  CHECK(refs.agreement_layers().count(AgreementRole::kGl30S) == 1);
  CHECK_THROWS_AS(refs.add("OSM-S", fixture::mask(3, 1, {0, 0, 0})), ConfigError);
  CHECK_THROWS_AS(refs.add("GUF", fixture::mask(3, 1, {0, 0, 0})), ConfigError);
  CHECK_THROWS_AS(refs.add("NLCD", fixture::mask(2, 1, {0, 0})), ContractError);
  CHECK(role_name(ExclusionRole::kDlrRm) == "DLR-RM");

  const Mask a = agreement_mask(refs);
  CHECK(a[0] == 1);  // OSM-S and CIL
  CHECK(a[1] == 1);  // CIL and GL30-S
  CHECK(a[2] == 0);  // GL30-S only
  const Mask x = exclusion_mask(refs);
  CHECK(x[2] == 1);
  CHECK(x[0] == 0);
}

TEST_CASE("agreement needs two layers, exclusion needs one") {
  ReferenceLayerSet refs;
  refs.add("OSM-S", fixture::mask(2, 1, {1, 1}));
  CHECK_THROWS_AS(agreement_mask(refs), ConfigError);
  CHECK_THROWS_AS(exclusion_mask(refs), ConfigError);
  refs.add("DLR-RM", fixture::mask(2, 1, {1, 0}));
  refs.add("GLC30-WL", fixture::mask(2, 1, {0, 1}));
  const Mask x = exclusion_mask(refs);
  CHECK(x[0] == 1);
  CHECK(x[1] == 1);
}

TEST_CASE("objects straddling each removal threshold") {
  const fixture::RuleFixture f = fixture::rule_fixture();
  const ObjectSet objects = connected_components(f.map);
  REQUIRE(objects.objects.size() == 12);
  const FilterEvidence ev{&f.agreement, &f.exclusion, &f.ndvi, &f.s1_a, &f.s1_d};
  FilterReport rep;
  const ObjectSet kept = filter_objects(objects, ev, {}, {}, &rep);
  CHECK(rep.objects_in == 12);
  CHECK(rep.objects_kept == 8);
  CHECK(rep.removed_r1 == 1);
  CHECK(rep.removed_r2 == 1);
  CHECK(rep.removed_r3 == 2);
  CHECK(rep.pixels_removed == 400);
  for (int k = 0; k < 12; ++k) {
    const bool removed = std::find(f.expected_removed.begin(), f.expected_removed.end(), k) !=
                         f.expected_removed.end();
    CHECK((kept.find(k + 1) == nullptr) == removed);
    CHECK((kept.labels(k * 12, 0) == 0) == removed);
  }
}

TEST_CASE("rule selection restricts what is tested") {
  const fixture::RuleFixture f = fixture::rule_fixture();
  const ObjectSet objects = connected_components(f.map);
  const FilterEvidence ev{&f.agreement, &f.exclusion, &f.ndvi, &f.s1_a, &f.s1_d};
  FilterReport rep;
  filter_objects(objects, ev, {true, true, false}, {}, &rep);
  CHECK(rep.objects_kept == 10);
  CHECK(rep.removed_r3 == 0);
  filter_objects(objects, ev, {true, false, true}, {}, &rep);
  CHECK(rep.objects_kept == 9);

  // Missing evidence for an enabled rule is a contract violation.
  CHECK_THROWS_AS(filter_objects(objects, FilterEvidence{}, {true, false, false}), ContractError);
  CHECK_THROWS_AS(filter_objects(objects, FilterEvidence{}, {false, true, false}), ContractError);
  CHECK_THROWS_AS(filter_objects(objects, FilterEvidence{}, {false, false, true}), ContractError);
}

TEST_CASE("thresholds are strict") {
  // Single-pixel objects carry their value exactly as zonal mean.
  const Mask map = fixture::mask(5, 1, {1, 0, 1, 0, 1});
  const ObjectSet objects = connected_components(map);
  const Grid ndvi = fixture::grid(5, 1, {0.6, 0, 0.6000001, 0, 0.2});
  const Grid db = fixture::grid(5, 1, {-5.0, 0, -5.0, 0, -11.0});
  const FilterEvidence ev{nullptr, nullptr, &ndvi, &db, nullptr};
  FilterReport rep;
  const ObjectSet kept = filter_objects(objects, ev, {false, true, true}, {}, &rep);
  CHECK(rep.removed_r2 == 1);
  CHECK(rep.removed_r3 == 0);
  CHECK(kept.find(2) == nullptr);
  CHECK(kept.find(1) != nullptr);
  CHECK(kept.find(3) != nullptr);
}

TEST_CASE("objects without evidence are kept") {
  const Mask map = fixture::mask(3, 1, {1, 0, 1});
  const ObjectSet objects = connected_components(map);
  const Grid db = fixture::grid(3, 1, {kNodata, 0, -20.0});
  const FilterEvidence ev{nullptr, nullptr, nullptr, nullptr, &db};
  const ObjectSet kept = filter_objects(objects, ev, {false, false, true});
  CHECK(kept.objects.size() == 1);
  CHECK(kept.objects[0].label == 1);
}

TEST_CASE("merging filtered maps is a union") {
  const ObjectSet a = connected_components(fixture::mask(4, 1, {1, 0, 0, 0}));
  const ObjectSet b = connected_components(fixture::mask(4, 1, {1, 0, 1, 0}));
  const Mask m = merge_maps(a, b);
  CHECK(std::vector<std::uint8_t>(m.values().begin(), m.values().end()) ==
        std::vector<std::uint8_t>{1, 0, 1, 0});
  CHECK_THROWS_AS(mask_union(fixture::mask(1, 1, {1}), fixture::mask(2, 1, {1, 1})), ContractError);
}
