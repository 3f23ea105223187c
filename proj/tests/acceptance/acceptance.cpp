// Acceptance run: one PASS/FAIL line per criterion. Oracles live in the test
// support header or below; library results are compared against them.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "dcg/ball.hpp"
#include "dcg/decompose.hpp"
#include "dcg/errors.hpp"
#include "dcg/fiber.hpp"
#include "dcg/growth.hpp"
#include "dcg/product.hpp"
#include "dcg/property_a.hpp"
#include "dcg/qi.hpp"
#include "dcg/runner.hpp"

#include "oracles.hpp"

using namespace dcg;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Map from lattice coordinates to points of a space.
std::map<std::vector<std::int64_t>, PointId> by_coordinates(const FiniteMetricSpace& s) {
  std::map<std::vector<std::int64_t>, PointId> out;
  for (PointId p = 0; p < s.size(); ++p) out.emplace((*s.coordinates())[p], p);
  return out;
}

struct RandomEmbedding {
  SpacePtr x, y;
  std::vector<PointId> map;
  Rational l, c;
  std::string what;
};

// x -> kx plus a jitter of at most j per coordinate; C = dim*j + 1/2 (0 when j = 0).
RandomEmbedding lattice_embedding(std::mt19937_64& rng, int dim) {
  const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 3), j = static_cast<std::int64_t>(rng() % 2);
  const std::int64_t n = dim == 1 ? 20 + static_cast<std::int64_t>(rng() % 230) : 4 + static_cast<std::int64_t>(rng() % 11);
  RandomEmbedding e;
  e.x = dim == 1 ? FiniteMetricSpace::path(static_cast<std::size_t>(2 * n + 1)) : ball(free_abelian(2), n);
  e.y = dim == 1 ? FiniteMetricSpace::path(static_cast<std::size_t>(k * 2 * n + j + 1)) : ball(free_abelian(2), k * n + 2 * j);
  const auto where = by_coordinates(*e.y);
  for (PointId p = 0; p < e.x->size(); ++p) {
    auto v = (*e.x->coordinates())[p];
    for (auto& t : v) t = k * t + (j ? static_cast<std::int64_t>(rng() % 2) : 0);
    e.map.push_back(where.at(v));
  }
  e.l = make_rational(k);
  e.c = j ? make_rational(2 * dim * j + 1, 2) : Rational(0);
  e.what = (dim == 1 ? "path" : "grid") + std::string(" k=") + std::to_string(k) + " j=" + std::to_string(j);
  return e;
}

// Free group ball into a bigger one: inclusion, or the doubling a -> a^2, b -> b^2 (L = 2, C = 0).
RandomEmbedding free_embedding(std::mt19937_64& rng) {
  const std::int64_t n = 2 + static_cast<std::int64_t>(rng() % 2);
  const bool doubling = rng() % 2;
  RandomEmbedding e;
  static std::map<std::int64_t, BallSpec> balls;
  auto get = [](std::int64_t radius) -> const BallSpec& {
    auto it = balls.find(radius);
    if (it == balls.end()) it = balls.emplace(radius, make_ball(free_group(2), radius)).first;
    return it->second;
  };
  const auto& bx = get(n);
  const auto& by = get(doubling ? 2 * n : n + 1);
  e.x = bx.space;
  e.y = by.space;
  for (PointId p = 0; p < e.x->size(); ++p) {
    Key k;
    for (auto v : bx.element(p)) {
      k.push_back(v);
      if (doubling) k.push_back(v);
    }
    e.map.push_back(by.table.index.at(k));
  }
  e.l = make_rational(doubling ? 2 : 1);
  e.c = 0;
  e.what = doubling ? "free doubling" : "free inclusion";
  return e;
}

Outcome pullback_certification() {
  std::mt19937_64 rng(1001);
  std::size_t embeddings = 0, families = 0, failures = 0, max_points = 0;
  std::string first;
  for (int trial = 0; trial < 120; ++trial) {
    auto e = trial % 3 == 2 ? free_embedding(rng) : lattice_embedding(rng, 1 + trial % 3 % 2);
    max_points = std::max(max_points, e.x->size());
    const auto f = make_qi_embedding(e.x, e.y, e.map, e.l, e.c);
    ++embeddings;
    for (int rep = 0; rep < 4; ++rep) {
      const Dist r = 1 + static_cast<Dist>(rng() % 6);
      const Dist d = r + static_cast<Dist>(rng() % (2 * r + 1));
      const auto dec = greedy_decompose(SubsetRef::whole(e.y), r, d);
      const auto& sub = dec.subfamilies[rng() % dec.subfamilies.size()];
      MetricFamily v;
      for (const auto& piece : sub.pieces)
        if (v.pieces.empty() || rng() % 4) v.pieces.push_back(piece);
      const auto pulled = pullback_family(f, v, r, d);
      ++families;

      // Independent preimages and measurements.
      std::vector<std::vector<PointId>> pre;
      for (const auto& piece : v.pieces) {
        std::vector<PointId> p;
        for (PointId x = 0; x < e.x->size(); ++x)
          if (piece.contains(e.map[x])) p.push_back(x);
        if (!p.empty()) pre.push_back(std::move(p));
      }
      std::optional<Dist> sep;
      Dist diam = 0;
      for (std::size_t a = 0; a < pre.size(); ++a)
        for (PointId p : pre[a]) {
          for (PointId q : pre[a]) diam = std::max(diam, e.x->dist(p, q));
          for (std::size_t b = a + 1; b < pre.size(); ++b)
            for (PointId q : pre[b]) {
              const Dist dd = e.x->dist(p, q);
              if (!sep || dd < *sep) sep = dd;
            }
        }
      const Rational sep_bound = (make_rational(r) - e.c) / e.l;
      const Rational mesh_bound = (make_rational(d) + e.c) / e.l;
      bool ok = Rational(static_cast<long>(diam)) <= mesh_bound && pulled.actual_mesh == diam &&
                pulled.actual_separation == sep && pulled.family.pieces.size() == pre.size();
      if (sep) ok = ok && Rational(static_cast<long>(*sep)) >= sep_bound;
      if (!ok && failures++ == 0)
        first = e.what + " R=" + std::to_string(r) + " D=" + std::to_string(d);
    }
  }
  std::ostringstream os;
  os << embeddings << " embeddings (|X| <= " << max_points << "), " << families << " families, " << failures
     << " failures";
  if (!first.empty()) os << "; first: " << first;
  return {embeddings >= 100 && max_points <= 500 && failures == 0, os.str()};
}

Cover thickened_partition(std::mt19937_64& rng, const SpacePtr& sp, Dist t_min, Dist t_span) {
  const auto whole = SubsetRef::whole(sp);
  const Dist d = 1 + static_cast<Dist>(rng() % 6);
  const auto parts = greedy_decompose(whole, 1, d);
  const Dist t = t_min + static_cast<Dist>(rng() % t_span);
  Cover c{whole, {}};
  for (const auto& f : parts.subfamilies)
    for (const auto& p : f.pieces) c.members.push_back(thicken(p, t, whole));
  return c;
}

Outcome ozawa_bound_check() {
  std::mt19937_64 rng(2002);
  std::size_t covers = 0, nonvacuous = 0, pairs = 0, failures = 0, oracle_mismatch = 0, max_points = 0;
  double worst = -2;
  std::string first;
  for (int trial = 0; trial < 60; ++trial) {
    const auto kind = trial % 3;
    const SpacePtr sp = kind == 0   ? FiniteMetricSpace::path(100 + rng() % 901)
                        : kind == 1 ? ball(free_abelian(2), 6 + static_cast<std::int64_t>(rng() % 17))
                                    : ball(free_group(2), 3 + static_cast<std::int64_t>(rng() % 3));
    const auto c = kind == 2 ? thickened_partition(rng, sp, 1, 4) : thickened_partition(rng, sp, 7, kind ? 8 : 12);
    max_points = std::max(max_points, sp->size());
    const auto l = lambda_eff(c);
    if (l < 1) continue;  // Lebesgue number below 2: no parameter exists
    ++covers;
    const auto f = ozawa_map(c, l);
    for (int s = 0; s < 8; ++s) {
      const auto i = rng() % c.region.size();
      if (l > 2 * c.region.diameter()) {  // a member holds the region: f is constant
        if (l1_distance(f[i], f[0]) != 0) ++oracle_mismatch;
        continue;
      }
      const auto ref = test_oracle::ozawa(c.region, c.members, c.region.members()[i], l);
      bool same = ref.size() == f[i].entries().size();
      for (const auto& [k, q] : ref) same = same && f[i].at(k) == q;
      if (!same) ++oracle_mismatch;
    }
    const auto check = check_ozawa_bound(c, f, l);
    pairs += check.pairs;
    if (check.pairs > 0) ++nonvacuous;
    worst = std::max(worst, check.worst_margin);
    if (check.failures && failures == 0) first = check.first_failure;
    failures += check.failures;
  }
  std::ostringstream os;
  os << covers << " covers (" << nonvacuous << " with pairs, |X| <= " << max_points << "), " << pairs
     << " pairs, " << failures << " failures, worst margin " << worst << ", tolerance " << kGuard
     << ", oracle mismatches " << oracle_mismatch;
  if (!first.empty()) os << "; first: " << first;
  return {covers >= 50 && failures == 0 && oracle_mismatch == 0, os.str()};
}

Outcome witness_check() {
  std::size_t runs = 0, bad = 0;
  std::ostringstream os;
  for (const auto& [g, n_ball] : {std::pair{free_abelian(1), 200}, std::pair{free_abelian(2), 40}}) {
    const auto sp = ball(g, n_ball);
    const ChainFactory factory = [&](const std::vector<Dist>& radii) { return build_chain(sp, radii); };
    for (std::int64_t n = 1; n <= 4; ++n) {
      const auto w = witness_from_chain(sp, n, factory);
      ++runs;
      // Independent check: exact norms, supports and variation.
      bool ok = true;
      Rational sup = 0;
      for (PointId x = 0; x < sp->size(); ++x) {
        Rational norm = 0;
        for (const auto& [y, q] : w.maps[x].entries()) {
          norm += q;
          ok = ok && q > 0 && sp->dist(x, static_cast<PointId>(y)) <= w.support_radius;
        }
        ok = ok && norm == 1;
        for (PointId y = x + 1; y < sp->size(); ++y)
          if (sp->dist(x, y) <= n) sup = std::max(sup, l1_distance(w.maps[x], w.maps[y]));
      }
      ok = ok && sup <= make_rational(1, n);
      if (!ok) ++bad;
      os << (runs == 1 ? "" : ", ") << g->name() << "@" << n_ball << " n=" << n << " sup " << sup.get_str();
    }
  }
  return {bad == 0, std::to_string(runs) + " runs, " + std::to_string(bad) + " failures (exact): " + os.str()};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(4004);
  std::vector<SubsetRef> regions;
  for (int i = 0; i < 200; ++i) regions.push_back(SubsetRef::whole(test_oracle::random_graph_metric(rng, 4 + rng() % 9)));
  const auto z1 = ball(free_abelian(1), 10), z2 = ball(free_abelian(2), 3);
  for (int i = 0; i < 20; ++i) {
    const auto& sp = i % 2 ? z1 : z2;
    std::vector<PointId> pts;
    for (PointId p = 0; p < sp->size(); ++p)
      if (rng() % 2 && pts.size() < 12) pts.push_back(p);
    if (pts.empty()) pts.push_back(0);
    regions.emplace_back(sp, pts);
  }
  std::size_t checks = 0, failures = 0, oracle_checks = 0, oracle_mismatch = 0;
  for (const auto& region : regions)
    for (Dist r = 1; r <= 3; ++r)
      for (Dist k = 1; k <= 3; ++k) {
        const Dist d = k * r;
        const auto exact = exact_min_families(region, r, d, 12);
        ++checks;
        if (exact > greedy_decompose(region, r, d).width()) ++failures;
        if (region.size() <= 8) {  // partition enumeration is Bell(n)
          ++oracle_checks;
          if (exact != test_oracle::min_families(region, r, d)) ++oracle_mismatch;
        }
      }
  const auto path = SubsetRef::whole(FiniteMetricSpace::path(10));
  const auto p = exact_min_families(path, 2, 3, 12);
  std::ostringstream os;
  os << regions.size() << " spaces, " << checks << " (R,D) checks, " << failures << " exact > greedy, "
     << oracle_mismatch << " mismatches in " << oracle_checks << " partition-oracle checks; path 0..9 (2,3) -> " << p;
  return {failures == 0 && oracle_mismatch == 0 && p == 2, os.str()};
}

Outcome product_width() {
  const auto z = ball(free_abelian(1), 20);
  bool ok = true;
  std::ostringstream os;
  for (Dist r : {1, 2, 3}) {
    const ChainOptions opts{StrategyKind::grid, mesh_rule_multiple(1)};
    const auto cx = build_chain(z, {r}, opts), cy = build_chain(z, {r}, opts);
    ok = ok && cx.widths() == std::vector<std::size_t>{2} && cy.widths() == std::vector<std::size_t>{2};
    const auto p = product_chain(cx, cy, GrowthFunction::parse("const:2"), GrowthFunction::parse("const:2"));
    const auto& sp = *p.space;
    ok = ok && p.report.pass && p.chain.stages[0].width == 4;
    // Exhaustive sum-metric check of every subfamily.
    const auto& cz = *z->coordinates();
    const std::size_t m = z->size();
    auto sum_metric = [&](PointId a, PointId b) {
      return std::abs(cz[a / m][0] - cz[b / m][0]) + std::abs(cz[a % m][0] - cz[b % m][0]);
    };
    std::size_t pairs = 0;
    for (const auto& sub : p.chain.stages[0].steps[0].subfamilies) {
      std::vector<int> owner(sp.size(), -1);
      for (std::size_t q = 0; q < sub.pieces.size(); ++q)
        for (PointId x : sub.pieces[q].members()) owner[x] = static_cast<int>(q);
      for (PointId a = 0; a < sp.size(); ++a)
        for (PointId b = a + 1; b < sp.size(); ++b)
          if (owner[a] >= 0 && owner[b] >= 0 && owner[a] != owner[b]) {
            ++pairs;
            ok = ok && sum_metric(a, b) > r && sp.dist(a, b) == sum_metric(a, b);
          }
    }
    ok = ok && p.chain.terminal_mesh() <= cx.terminal_mesh() + cy.terminal_mesh();
    os << (r == 1 ? "" : ", ") << "R=" << r << ": width " << p.chain.stages[0].width << ", mesh "
       << p.chain.terminal_mesh() << " <= " << cx.terminal_mesh() + cy.terminal_mesh() << ", " << pairs
       << " cross pairs";
  }
  return {ok, os.str()};
}

Outcome lamplighter_fiber() {
  const auto lamp = std::make_shared<const BallSpec>(make_ball(wreath(cyclic(2), free_abelian(1)), 6));
  const auto base = std::make_shared<const BallSpec>(make_ball(free_abelian(1), 6));
  const auto action = walker_action(lamp, base);
  validate_action(action);
  const auto target = build_chain(base->space, {2}, ChainOptions{StrategyKind::grid, mesh_rule_multiple(1)});
  const auto r = fiber_chain(action, target, GrowthFunction::parse("const:2"),
                             sfdc_stab_factory({2, 4}, ChainOptions{StrategyKind::greedy, mesh_rule_multiple(8)}));
  bool ok = r.report.pass;
  std::vector<char> covered(lamp->space->size(), 0);
  for (const auto& piece : r.chain.terminal_family().pieces)
    for (PointId p : piece.members()) covered[p] = 1;
  const bool covers = std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
  std::size_t steps = 0;
  for (const auto& st : r.chain.stages)
    for (const auto& d : st.steps) {
      ++steps;
      ok = ok && verify_decomposition(d).pass;
    }
  ok = ok && covers && r.chain.terminal_mesh() <= r.stab_terminal_mesh;
  std::ostringstream os;
  os << lamp->space->size() << " points, " << r.chain.stages.size() << " stages, " << steps
     << " verified steps, covers " << (covers ? "yes" : "no") << ", terminal mesh " << r.chain.terminal_mesh()
     << " <= stabilizer mesh " << r.stab_terminal_mesh;
  return {ok, os.str()};
}

Outcome group_models() {
  bool ok = true;
  std::ostringstream os;
  const auto g = grigorchuk();
  std::map<std::string, Key> gen;
  for (const auto& s : g->generators()) gen[s.label] = s.key;
  for (const char* s : {"a", "b", "c", "d"}) ok = ok && g->multiply(gen.at(s), gen.at(s)) == g->identity();
  ok = ok && g->multiply(gen.at("b"), gen.at("c")) == gen.at("d");
  const auto t = enumerate_ball(g, 6);
  const auto deeper = enumerate_ball(grigorchuk(default_grigorchuk_depth(6) + 2), 6);
  ok = ok && t.ball_size(1) == 5 && t.ball_size(2) == 11 && t.sphere_sizes == deeper.sphere_sizes;
  const auto f2 = enumerate_ball(free_group(2), 2);
  ok = ok && f2.ball_size(2) == 17;
  os << "relations ok, |B(1)|=" << t.ball_size(1) << " |B(2)|=" << t.ball_size(2) << ", stable to N=6, |F2 B(2)|="
     << f2.ball_size(2);

  std::mt19937_64 rng(7007);
  std::size_t triples = 0, bad = 0;
  for (const auto& [h, n] : std::vector<std::pair<GroupPtr, std::int64_t>>{{free_abelian(2), 4},
                                                                           {free_group(2), 3},
                                                                           {grigorchuk(), 4},
                                                                           {wreath(cyclic(2), free_abelian(1)), 4},
                                                                           {wreath(free_abelian(1), free_group(2)), 2}}) {
    const auto b = make_ball(h, n);
    const auto sz = b.space->size();
    for (int i = 0; i < 10000; ++i) {
      const Key& x = b.element(rng() % sz);
      const Key& y = b.element(rng() % sz);
      const Key& s = b.element(rng() % sz);
      const Key gx = h->multiply(s, x), gy = h->multiply(s, y);
      const auto moved = b.table.length_of(h->multiply(h->invert(gx), gy));
      const auto base = b.table.length_of(h->multiply(h->invert(x), y));
      ++triples;
      if (!moved || !base || *moved != *base) ++bad;
    }
  }
  ok = ok && bad == 0;
  os << "; left invariance " << triples << " triples, " << bad << " failures";
  return {ok, os.str()};
}

Outcome growth_algebra() {
  const auto c1 = GrowthFunction::constant(3), c2 = GrowthFunction::constant(7);
  const auto x2 = GrowthFunction::polynomial(2), x3 = GrowthFunction::polynomial(3);
  const auto e2 = GrowthFunction::exponential(2), e3 = GrowthFunction::exponential(3);
  bool ok = growth_equivalent(c1, c2).value && !growth_equivalent(x2, x3).value && growth_equivalent(e2, e3).value;
  for (const auto& s : {c1, x2, x3, e2})
    ok = ok && growth_equivalent(compose_affine(s, make_rational(5, 2), 3), s).value &&
         compose_affine(s, 2, 1).growth_class().family == s.growth_class().family &&
         compose_affine(s, 2, 1).growth_class().degree == s.growth_class().degree;
  ok = ok && is_subexponential(c1).value && is_subexponential(x3).value && !is_subexponential(e2).value;
  for (const auto& d : {growth_equivalent(c1, c2), growth_equivalent(x2, x3), is_subexponential(e3)})
    ok = ok && !d.heuristic;
  return {ok, "equivalence, affine composition and subexponential decisions exact"};
}

std::string run_command(const std::string& cmd, int& status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    status = -1;
    return out;
  }
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  status = pclose(p);
  return out;
}

Outcome demo_determinism(const std::string& cli) {
  const auto c = demo_thm51_defaults();
  const auto a = run_demo_thm51(c).dump(2), b = run_demo_thm51(c).dump(2);
  bool ok = a == b;
  std::ostringstream os;
  os << "library " << a.size() << " bytes " << (a == b ? "identical" : "DIFFER");
  if (!cli.empty()) {
    int s1 = 0, s2 = 0;
    const auto o1 = run_command("'" + cli + "' demo-thm51", s1), o2 = run_command("'" + cli + "' demo-thm51", s2);
    ok = ok && s1 == 0 && s2 == 0 && o1 == o2 && o1 == a + "\n";
    os << "; cli " << o1.size() << " bytes " << (o1 == o2 ? "identical" : "DIFFER") << ", exit " << s1 << "/" << s2;
  }
  return {ok, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"pullback certification", 60, pullback_certification},
      {"Ozawa pair bound", 300, ozawa_bound_check},
      {"witness families at scales 1..4", 600, witness_check},
      {"exact search vs greedy width", 300, oracle_equivalence},
      {"product chain width", 60, product_width},
      {"lamplighter fiber chain", 120, lamplighter_fiber},
      {"group models", 120, group_models},
      {"growth algebra", 10, growth_algebra},
      {"demo determinism", 120, [&] { return demo_determinism(cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < criteria[i].limit_s;
    failed += !pass;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.2fs < %.0fs", secs, criteria[i].limit_s);
    std::cout << (pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].name << ": " << o.detail << " ("
              << timing << ")" << std::endl;
  }
  std::cout << (failed ? "ACCEPTANCE FAILED: " : "ACCEPTANCE PASSED: ") << criteria.size() - failed << "/"
            << criteria.size() << " criteria" << std::endl;
  return failed ? 1 : 0;
}
