#include <random>

#include "doctest.h"

#include "dcg/errors.hpp"
#include "dcg/family.hpp"
#include "dcg/metric_json.hpp"
#include "dcg/rational.hpp"

using namespace dcg;

namespace {

SubsetRef range(const SpacePtr& s, PointId lo, PointId hi) {
  std::vector<PointId> m;
  for (PointId p = lo; p <= hi; ++p) m.push_back(p);
  return SubsetRef(s, m);
}

// Brute force over all pairs, written independently of set_distance.
Dist pair_min(const SubsetRef& a, const SubsetRef& b) {
  Dist best = -1;
  for (PointId p : a.members())
    for (PointId q : b.members()) {
      const Dist d = a.space()->dist(p, q);
      if (best < 0 || d < best) best = d;
    }
  return best;
}

SpacePtr random_graph_metric(std::mt19937_64& rng, std::size_t n) {
  // Shortest paths on a random connected graph.
  const Dist inf = 1 << 20;
  std::vector<std::vector<Dist>> d(n, std::vector<Dist>(n, inf));
  for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t j = rng() % i;
    d[i][j] = d[j][i] = 1;
  }
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t a = rng() % n, b = rng() % n;
    if (a != b) d[a][b] = d[b][a] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i));
  return FiniteMetricSpace::from_matrix("graph", labels, d);
}

}  // namespace

TEST_CASE("set distance") {
  const auto path = FiniteMetricSpace::path(10);
  const SubsetRef a(path, {0, 1}), b(path, {5, 7});
  CHECK(set_distance(a, b) == 4);
  CHECK(set_distance(a, b) == pair_min(a, b));
  CHECK(set_distance(SubsetRef(path, {3}), SubsetRef(path, {3})) == 0);
  CHECK(set_distance(SubsetRef(path, {0}), SubsetRef(path, {1})) == 1);
  const auto other = FiniteMetricSpace::path(10);
  CHECK_THROWS_AS(set_distance(a, SubsetRef(other, {1})), StructuralError);
}

TEST_CASE("subset invariants") {
  const auto path = FiniteMetricSpace::path(4);
  CHECK_THROWS_AS(SubsetRef(path, {}), DomainError);
  CHECK_THROWS_AS(SubsetRef(path, {4}), StructuralError);
  CHECK(SubsetRef(path, {2, 1, 2}).members() == std::vector<PointId>{1, 2});
}

TEST_CASE("mesh") {
  const auto path = FiniteMetricSpace::path(10);
  CHECK(mesh(MetricFamily{{range(path, 0, 3), range(path, 8, 9)}, ""}) == 3);
  CHECK(mesh(MetricFamily{{SubsetRef(path, {5})}, ""}) == 0);
  CHECK(mesh(MetricFamily{{SubsetRef::whole(path)}, ""}) == 9);
  CHECK_THROWS_AS(mesh(MetricFamily{}), DomainError);
}

TEST_CASE("R-disjointness is strict") {
  const auto path = FiniteMetricSpace::path(10);
  const MetricFamily f{{SubsetRef(path, {0}), SubsetRef(path, {3})}, ""};
  CHECK(is_r_disjoint(f, 2));
  CHECK_FALSE(is_r_disjoint(f, 3));
  CHECK(is_r_disjoint(MetricFamily{{SubsetRef(path, {4})}, ""}, 1000));
}

TEST_CASE("verify decomposition") {
  const auto path = FiniteMetricSpace::path(10);
  const auto whole = SubsetRef::whole(path);
  Decomposition good{whole, 2,
                     {MetricFamily{{range(path, 0, 3), range(path, 8, 9)}, ""},
                      MetricFamily{{range(path, 4, 7)}, ""}}};
  const auto ok = verify_decomposition(good);
  CHECK(ok.pass);
  REQUIRE(ok.subfamilies.size() == 2);
  CHECK(*ok.subfamilies[0].min_distance == 5);

  Decomposition missing = good;
  missing.subfamilies[0].pieces.pop_back();
  const auto bad = verify_decomposition(missing);
  CHECK_FALSE(bad.pass);
  CHECK(bad.uncovered == std::vector<PointId>{8, 9});

  Decomposition touching{whole, 2,
                         {MetricFamily{{range(path, 0, 3), range(path, 5, 7)}, ""},
                          MetricFamily{{SubsetRef(path, {4}), range(path, 8, 9)}, ""}}};
  const auto strict = verify_decomposition(touching);
  CHECK_FALSE(strict.pass);
  CHECK_FALSE(strict.subfamilies[0].disjoint);
  CHECK(*strict.subfamilies[0].min_distance == 2);
}

TEST_CASE("verify chain") {
  const auto path = FiniteMetricSpace::path(21);
  const auto whole = SubsetRef::whole(path);
  // Intervals of length 4 alternating between two colours.
  std::vector<SubsetRef> even, odd;
  for (PointId lo = 0, k = 0; lo <= 20; lo += 4, ++k)
    (k % 2 ? odd : even).push_back(range(path, lo, std::min<PointId>(lo + 3, 20)));
  DecompositionChain chain{path, {ChainStage{2, 2, {Decomposition{whole, 2, {MetricFamily{even, ""},
                                                                           MetricFamily{odd, ""}}}}}}};
  const auto pass = verify_chain(chain, [](Dist) { return std::int64_t{2}; });
  CHECK(pass.pass);
  CHECK(pass.terminal_mesh == 3);
  const auto fail = verify_chain(chain, [](Dist) { return std::int64_t{1}; });
  CHECK_FALSE(fail.pass);
  CHECK_FALSE(fail.stages[0].within_bound);

  // Out-of-order radii: a second trivial stage at a smaller radius.
  DecompositionChain twisted = chain;
  twisted.stages[0].radius = 3;
  for (auto& step : twisted.stages[0].steps) step.radius = 3;
  ChainStage second{2, 1, {}};
  for (const auto& piece : twisted.stages[0].family().pieces)
    second.steps.push_back(trivial_decomposition(piece, 2));
  twisted.stages.push_back(second);
  const auto order = verify_chain(twisted);
  CHECK_FALSE(order.pass);
  CHECK_FALSE(order.radii_nondecreasing);

  // Steps must line up with the parent pieces.
  DecompositionChain wrong = chain;
  ChainStage stray{2, 1, {trivial_decomposition(whole, 2)}};
  wrong.stages.push_back(stray);
  CHECK_FALSE(verify_chain(wrong).pass);
}

TEST_CASE("properties on random graph metrics") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const auto space = random_graph_metric(rng, 6 + rng() % 20);
    CHECK_FALSE(check_metric_axioms(*space, 2000, trial).has_value());
    const auto n = static_cast<PointId>(space->size());
    std::vector<PointId> a, b;
    for (PointId p = 0; p < n; ++p) (rng() % 2 ? a : b).push_back(p);
    if (a.empty() || b.empty()) continue;
    const SubsetRef A(space, a), B(space, b);
    const Dist sd = set_distance(A, B);
    CHECK(sd == pair_min(A, B));
    for (PointId p : a)
      for (PointId q : b) CHECK(sd <= space->dist(p, q));
    // Antitone in R, and a subfamily never has larger mesh.
    const MetricFamily f{{A, B}, ""};
    for (Dist r = 0; r < 6; ++r)
      if (is_r_disjoint(f, r + 1)) CHECK(is_r_disjoint(f, r));
    CHECK(mesh(MetricFamily{{A}, ""}) <= mesh(f));
  }
}

TEST_CASE("from_matrix validation") {
  CHECK_THROWS(FiniteMetricSpace::from_matrix("x", {"a", "b"}, {{0, 1}, {2, 0}}));
  CHECK_THROWS(FiniteMetricSpace::from_matrix("x", {"a", "b"}, {{0, 0}, {0, 0}}));
  CHECK_THROWS(FiniteMetricSpace::from_matrix("x", {"a", "b"}, {{1, 1}, {1, 0}}));
}

TEST_CASE("json round trip is byte-identical") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto space = random_graph_metric(rng, 5 + rng() % 10);
    const auto j1 = space_to_json(*space);
    const auto back = space_from_json(j1);
    CHECK(space_to_json(*back).dump() == j1.dump());

    std::vector<PointId> a{0}, b;
    for (PointId p = 1; p < back->size(); ++p) (rng() % 2 ? a : b).push_back(p);
    Decomposition d{SubsetRef::whole(back), 1, {MetricFamily{{SubsetRef(back, a)}, "a"}}};
    if (!b.empty()) d.subfamilies.push_back(MetricFamily{{SubsetRef(back, b)}, "b"});
    const auto dj = decomposition_to_json(d);
    const auto d2 = decomposition_from_json(dj);
    CHECK(decomposition_to_json(d2).dump() == dj.dump());
    CHECK(d2.subfamilies.size() == d.subfamilies.size());
  }
  const auto path = FiniteMetricSpace::path(12);
  DecompositionChain chain{path, {ChainStage{3, 1, {trivial_decomposition(SubsetRef::whole(path), 3)}}}};
  const auto cj = chain_to_json(chain);
  CHECK(chain_to_json(chain_from_json(cj)).dump() == cj.dump());
  CHECK(radius_from_json(Json(2.7)) == 2);
  CHECK(radius_from_json(Json(5)) == 5);
}

TEST_CASE("rational helpers") {
  CHECK(floor_int(make_rational(-5, 3)) == -2);
  CHECK(ceil_int(make_rational(5, 3)) == 2);
  CHECK(parse_rational("6/4") == make_rational(3, 2));
  CHECK_THROWS_AS(parse_rational("abc"), ConfigError);
  CHECK(floor_radius(2.9) == 2);
}
