#include <random>

#include "doctest.h"

#include "dcg/ball.hpp"
#include "dcg/decompose.hpp"
#include "dcg/errors.hpp"
#include "dcg/property_a.hpp"

#include "oracles.hpp"

using namespace dcg;

namespace {

SubsetRef interval(const SpacePtr& sp, PointId a, PointId b) {
  std::vector<PointId> m;
  for (PointId i = a; i <= b; ++i) m.push_back(i);
  return SubsetRef(sp, m);
}

Cover path_cover(std::size_t n, std::vector<std::pair<PointId, PointId>> ranges) {
  const auto sp = FiniteMetricSpace::path(n);
  Cover c{SubsetRef::whole(sp), {}};
  for (auto [a, b] : ranges) c.members.push_back(interval(sp, a, b));
  return c;
}

// Thickened random partition: Lebesgue number at least t.
Cover random_cover(std::mt19937_64& rng, const SpacePtr& sp) {
  const auto whole = SubsetRef::whole(sp);
  const Dist d = 1 + static_cast<Dist>(rng() % 6);
  const auto parts = greedy_decompose(whole, 1, d);
  const Dist t = 2 + static_cast<Dist>(rng() % 6);
  Cover c{whole, {}};
  for (const auto& f : parts.subfamilies)
    for (const auto& p : f.pieces) c.members.push_back(thicken(p, t, whole));
  return c;
}

}  // namespace

TEST_CASE("Lebesgue number and multiplicity") {
  CHECK(lebesgue_number(path_cover(10, {{0, 9}})) == 9);
  const auto three = path_cover(10, {{0, 5}, {3, 8}, {6, 9}});
  CHECK(lebesgue_number(three) == 1);
  CHECK(test_oracle::lebesgue(three.region, three.members, 9) == 1);
  std::vector<std::pair<PointId, PointId>> singles;
  for (PointId i = 0; i < 10; ++i) singles.emplace_back(i, i);
  CHECK(lebesgue_number(path_cover(10, singles)) == 0);
  CHECK(multiplicity(path_cover(10, singles)) == 1);
  CHECK_THROWS_AS(lebesgue_number(path_cover(10, {{0, 3}, {5, 9}})), StructuralError);

  CHECK(multiplicity(path_cover(9, {{0, 5}, {3, 8}})) == 2);
  CHECK(multiplicity(path_cover(9, {{0, 8}, {0, 8}, {0, 8}})) == 3);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_cover(rng, test_oracle::random_graph_metric(rng, 5 + rng() % 20));
    const Dist diam = c.region.diameter();
    CHECK(lebesgue_number(c) == test_oracle::lebesgue(c.region, c.members, diam));
  }
}

TEST_CASE("xi and l1 distances") {
  const auto a = xi({1, 2});
  CHECK(a.at(1) == make_rational(1, 2));
  CHECK(a.norm() == 1);
  CHECK(xi({7}).entries().size() == 1);
  CHECK(l1_distance(xi({0, 1}), xi({1, 2})) == 1);
  CHECK_THROWS_AS(xi({}), DomainError);
  const auto v = SparseL1Vector::from_entries({{3, make_rational(1, 3)}, {1, make_rational(2, 3)}, {3, 0}});
  CHECK(SparseL1Vector::from_json(v.to_json()).entries() == v.entries());
  CHECK(v.to_json().dump() == R"([[1,"2","3"],[3,"1","3"]])");
}

TEST_CASE("Ozawa map matches the direct formula") {
  std::mt19937_64 rng(8);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto sp = trial % 2 ? FiniteMetricSpace::path(20 + rng() % 40)
                              : test_oracle::random_graph_metric(rng, 6 + rng() % 25);
    const auto c = random_cover(rng, sp);
    const auto l = lambda_eff(c);
    if (l < 1 || l > 100) continue;
    const auto f = ozawa_map(c);
    for (std::size_t i = 0; i < c.region.size(); ++i) {
      CHECK(f[i].norm() == 1);
      const auto ref = test_oracle::ozawa(c.region, c.members, c.region.members()[i], l);
      REQUIRE(ref.size() == f[i].entries().size());
      for (const auto& [k, q] : ref) CHECK(f[i].at(k) == q);
    }
    const auto check = check_ozawa_bound(c, f, l);
    CHECK(check.failures == 0);
    ++checked;
  }
  CHECK(checked > 10);

  const auto single = path_cover(12, {{0, 11}});
  const auto fs = ozawa_map(single);
  for (const auto& v : fs) CHECK(l1_distance(v, fs[0]) == 0);

  const auto gap = path_cover(16, {{0, 7}, {4, 11}, {8, 15}});
  const auto fg = ozawa_map(gap);
  for (const auto& v : fg) CHECK(v.norm() == 1);
  CHECK_THROWS_AS(ozawa_map(gap, 5), DomainError);

  // Wide overlaps give a parameter large enough for adjacent pairs.
  const auto wide = path_cover(40, {{0, 30}, {10, 39}});
  const auto lw = lambda_eff(wide);
  REQUIRE(lw >= 3);
  const auto check = check_ozawa_bound(wide, ozawa_map(wide), lw);
  CHECK(check.pairs > 0);
  CHECK(check.failures == 0);
}

TEST_CASE("thickened chains") {
  const auto z = ball(free_abelian(1), 60);
  const auto one = build_chain(z, {100});
  const auto t1 = thicken_chain(one, {3});
  REQUIRE(t1.levels[0].members.size() == 1);
  CHECK(t1.levels[0].max_multiplicity() == 1);
  CHECK(t1.levels[0].lebesgue[0] == 120);

  const auto grid = build_chain(z, {9}, ChainOptions{StrategyKind::grid, [](Dist) { return Dist{9}; }});
  const auto t = thicken_chain(grid, {3});
  CHECK(t.levels[0].max_multiplicity() <= 2);
  CHECK(t.levels[0].min_lebesgue() >= 3);

  // Only R-disjoint: thickening by R makes same-family pieces overlap.
  const auto path = FiniteMetricSpace::path(20);
  Decomposition d{SubsetRef::whole(path), 4,
                  {MetricFamily{{interval(path, 0, 4), interval(path, 9, 13)}, ""},
                   MetricFamily{{interval(path, 5, 8), interval(path, 14, 19)}, ""}}};
  REQUIRE(verify_decomposition(d).pass);
  DecompositionChain tight{path, {ChainStage{4, 2, {d}}}};
  CHECK_THROWS_AS(thicken_chain(tight, {4}), IntegrityError);

  const auto two = build_chain(z, {9, 18});
  const auto t2 = thicken_chain(two, {3, 6});
  CHECK(t2.levels.size() == 2);
  CHECK(t2.levels[1].covers.size() == t2.levels[0].members.size());
  CHECK_THROWS_AS(thicken_chain(two, {3}), StructuralError);
}

TEST_CASE("witness on a Z-ball") {
  const auto z = ball(free_abelian(1), 80);
  const ChainFactory factory = [&](const std::vector<Dist>& radii) { return build_chain(z, radii); };
  for (std::int64_t n = 1; n <= 2; ++n) {
    WitnessDiagnostics diag;
    const auto w = witness_from_chain(z, n, factory, {}, &diag);
    const auto rep = verify_witness(w, n, Rational(1, static_cast<unsigned long>(n)));
    CHECK(rep.pass);
    CHECK(rep.max_norm_deviation == 0);
    CHECK(rep.max_support_radius <= w.support_radius);
    for (const auto& t : w.terms) CHECK(static_cast<double>(t.term) <= t.budget);
  }
  const auto w1 = witness_from_chain(z, 1, factory);
  CHECK(w1.to_json().dump() == witness_from_chain(z, 1, factory).to_json().dump());
  WitnessOptions tight;
  tight.max_radius = 2;
  CHECK_THROWS_AS(witness_from_chain(z, 1, factory, tight), ResourceError);
}

TEST_CASE("witness edge cases and verification failures") {
  const auto point = FiniteMetricSpace::path(1);
  const auto w = witness_from_chain(point, 3, [&](const std::vector<Dist>& r) { return build_chain(point, r); });
  CHECK(w.maps[0].entries() == SparseL1Vector::point_mass(0).entries());
  CHECK(verify_witness(w, 3, make_rational(1, 3)).pass);

  const auto path = FiniteMetricSpace::path(12);
  WitnessFamily bad{path, 1, {}, 5, {}, {}};
  for (PointId x = 0; x < 12; ++x) bad.maps.push_back(SparseL1Vector::point_mass(x));
  CHECK(verify_witness(bad, 0, 0).pass);
  bad.maps[3] = SparseL1Vector::from_entries({{3, make_rational(1, 2)}});
  CHECK_FALSE(verify_witness(bad, 0, 0).pass);
  bad.maps[3] = SparseL1Vector::point_mass(3);
  bad.maps[0] = SparseL1Vector::point_mass(10);
  const auto rep = verify_witness(bad, 0, 0);
  CHECK_FALSE(rep.support_ok);
  CHECK(rep.max_support_radius == 10);
}
