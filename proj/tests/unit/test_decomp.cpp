#include <random>

#include "doctest.h"

#include "dcg/ball.hpp"
#include "dcg/decompose.hpp"
#include "dcg/errors.hpp"
#include "dcg/metric_json.hpp"

#include "oracles.hpp"

using namespace dcg;

TEST_CASE("greedy on a Z-ball alternates intervals") {
  const auto z = ball(free_abelian(1), 20);
  const auto d = greedy_decompose(SubsetRef::whole(z), 3, 7);
  CHECK(d.width() == 2);
  CHECK(verify_decomposition(d).pass);
  for (const auto& f : d.subfamilies) CHECK(mesh(f) <= 7);
}

TEST_CASE("greedy edge cases") {
  const auto path = FiniteMetricSpace::path(10);
  const auto whole = SubsetRef::whole(path);
  CHECK(greedy_decompose(whole, 5, 9).width() == 1);
  const auto singletons = greedy_decompose(whole, 2, 0);
  CHECK(singletons.width() == 3);
  CHECK(verify_decomposition(singletons).pass);
  // R = 0: singletons are 0-disjoint, so one family suffices.
  CHECK(greedy_decompose(whole, 0, 0).width() == 1);
}

TEST_CASE("exact search on hand-checkable instances") {
  const auto path = FiniteMetricSpace::path(10);
  CHECK(exact_min_families(SubsetRef::whole(path), 2, 3) == 2);
  const auto two = FiniteMetricSpace::from_matrix("pair", {"a", "b"}, {{0, 5}, {5, 0}});
  CHECK(exact_min_families(SubsetRef::whole(two), 1, 0) == 1);
  const auto p5 = FiniteMetricSpace::path(5);
  const auto w = SubsetRef::whole(p5);
  CHECK(exact_min_families(w, 10, 1) == test_oracle::min_families(w, 10, 1));
  CHECK(exact_min_families(w, 10, 1) <= greedy_decompose(w, 10, 1).width());
  CHECK(verify_decomposition(exact_decompose(SubsetRef::whole(path), 2, 3)).pass);
  CHECK_THROWS_AS(exact_min_families(SubsetRef::whole(FiniteMetricSpace::path(13)), 1, 1),
                  ResourceError);
}

TEST_CASE("exact search agrees with the partition oracle") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const auto space = test_oracle::random_graph_metric(rng, 3 + rng() % 6);
    const auto w = SubsetRef::whole(space);
    for (Dist r = 1; r <= 3; ++r)
      for (Dist d : {r, 2 * r, 3 * r}) {
        const auto exact = exact_min_families(w, r, d);
        REQUIRE(exact == test_oracle::min_families(w, r, d));
        CHECK(exact <= greedy_decompose(w, r, d).width());
      }
  }
}

TEST_CASE("exact minimum is monotone in D and R") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto space = test_oracle::random_graph_metric(rng, 4 + rng() % 7);
    const auto w = SubsetRef::whole(space);
    for (Dist r = 1; r <= 3; ++r)
      for (Dist d = 0; d <= 5; ++d) {
        const auto here = exact_min_families(w, r, d);
        CHECK(exact_min_families(w, r, d + 1) <= here);
        CHECK(exact_min_families(w, r + 1, d) >= here);
      }
  }
}

TEST_CASE("grid strategy") {
  const auto z = ball(free_abelian(1), 100);
  const auto d = grid_decompose(SubsetRef::whole(z), 2, 5);
  CHECK(d.width() == 2);
  CHECK(mesh(MetricFamily{d.subfamilies[0].pieces, ""}) == 5);
  const auto z2 = ball(free_abelian(2), 20);
  for (Dist r = 1; r <= 6; ++r) {
    const auto g = grid_decompose(SubsetRef::whole(z2), r, 3 * r);
    CHECK(g.width() <= 4);
    CHECK(verify_decomposition(g).pass);
  }
  CHECK_THROWS_AS(grid_decompose(SubsetRef::whole(FiniteMetricSpace::from_matrix("m", {"a", "b"}, {{0, 1}, {1, 0}})), 1, 1), DomainError);
}

TEST_CASE("build chain") {
  const auto z = ball(free_abelian(1), 100);
  ChainOptions grid{StrategyKind::grid, [](Dist) { return Dist{5}; }};
  const auto one = build_chain(z, {2}, grid);
  REQUIRE(one.stages.size() == 1);
  CHECK(one.stages[0].width == 2);
  CHECK(one.terminal_mesh() == 5);

  grid.stop_mesh = 5;
  CHECK(build_chain(z, {2, 4}, grid).stages.size() == 1);

  const auto f2 = ball(free_group(2), 4);
  const auto chain = build_chain(f2, {1, 2, 4});
  const auto report = verify_chain(chain);
  CHECK(report.pass);
  CHECK(report.terminal_mesh == chain.terminal_mesh());

  CHECK_THROWS_AS(build_chain(z, {}), DomainError);
  CHECK_THROWS_AS(build_chain(z, {3, 2}), DomainError);
}

TEST_CASE("width-2 chains") {
  const auto z = ball(free_abelian(1), 30);
  const auto found = sfdc_chain(z, {2});
  REQUIRE(found.found());
  CHECK(found.chain->stages[0].width <= 2);

  const auto z2 = ball(free_abelian(2), 20);
  const auto attempt = sfdc_chain(z2, {3}, ChainOptions{StrategyKind::greedy, [](Dist) { return Dist{7}; }});
  if (attempt.found()) {
    CHECK(verify_chain(*attempt.chain, [](Dist) { return std::int64_t{2}; }).pass);
  } else {
    CHECK(attempt.failed_stage == 1);
    CHECK(attempt.best_width > 2);
    CHECK(attempt.message.find("not a proof") != std::string::npos);
  }

  const auto point = FiniteMetricSpace::path(1);
  const auto trivial = sfdc_chain(point, {1});
  REQUIRE(trivial.found());
  CHECK(trivial.chain->stages.empty());
}

TEST_CASE("dimension profile") {
  const auto z_factory = [](std::int64_t n) { return ball(free_abelian(1), n); };
  const auto table = dimension_profile("z^1", z_factory, {100}, {1, 2, 3, 4, 5});
  REQUIRE(table.rows.size() == 5);
  for (const auto& row : table.rows) {
    CHECK(row.n_greedy == std::optional<std::size_t>(2));
    CHECK(row.mesh == 3 * row.radius);
  }
  ProfileOptions wide;
  wide.exact_limit = 21;
  const auto small = dimension_profile("z^1", z_factory, {10}, {1, 2, 3, 4, 5}, wide);
  for (const auto& row : small.rows) {
    CHECK(row.n_exact == std::optional<std::size_t>(2));
    CHECK(*row.n_exact <= *row.n_greedy);
  }

  const auto z2 = dimension_profile("z^2", [](std::int64_t n) { return ball(free_abelian(2), n); },
                                    {20}, {2});
  CHECK(*z2.rows[0].n_greedy <= 4);

  const auto zero = dimension_profile("z^1", z_factory, {5}, {0});
  CHECK(zero.rows[0].mesh == 0);
  CHECK(zero.rows[0].n_greedy == std::optional<std::size_t>(1));

  const auto failing = dimension_profile(
      "huge", [](std::int64_t) -> SpacePtr { throw ResourceError("too big"); }, {3}, {1});
  CHECK_FALSE(failing.rows[0].n_greedy.has_value());
  CHECK(failing.rows[0].note == "too big");

  CHECK(table.to_csv() == dimension_profile("z^1", z_factory, {100}, {1, 2, 3, 4, 5}).to_csv());
  CHECK(table.to_csv().rfind("space,N,R,D,n_greedy,n_exact,wall_ms,note\r\n", 0) == 0);
  CHECK_THROWS_AS(dimension_profile("z^1", z_factory, {5}, {}), ConfigError);
}

TEST_CASE("greedy output is deterministic") {
  const auto space = ball(wreath(cyclic(2), free_abelian(1)), 4);
  const auto a = decomposition_to_json(greedy_decompose(SubsetRef::whole(space), 2, 4)).dump();
  const auto b = decomposition_to_json(greedy_decompose(SubsetRef::whole(space), 2, 4)).dump();
  CHECK(a == b);
}

TEST_CASE("mesh rules and strategy names") {
  CHECK(parse_mesh_rule("3R")(4) == 12);
  CHECK(parse_mesh_rule("R")(4) == 4);
  CHECK(parse_mesh_rule("7")(4) == 7);
  CHECK_THROWS_AS(parse_mesh_rule("R3"), ConfigError);
  CHECK(parse_strategy("grid") == StrategyKind::grid);
  CHECK_THROWS_AS(parse_strategy("ilp"), ConfigError);
}
