#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dcg/errors.hpp"
#include "dcg/property_a.hpp"

namespace dcg {

std::size_t CoverLevel::max_multiplicity() const {
  return multiplicity.empty() ? 1 : *std::max_element(multiplicity.begin(), multiplicity.end());
}

std::int64_t CoverLevel::min_lambda() const {
  return lambda.empty() ? 0 : *std::min_element(lambda.begin(), lambda.end());
}

Dist CoverLevel::min_lebesgue() const {
  return lebesgue.empty() ? 0 : *std::min_element(lebesgue.begin(), lebesgue.end());
}

Dist CoverLevel::mesh() const {
  Dist best = 0;
  for (const auto& m : members) best = std::max(best, m.diameter());
  return best;
}

namespace {

std::string stage_name(std::size_t i) { return "stage " + std::to_string(i + 1); }

void check_separation(const std::vector<SubsetRef>& thick, Dist r, std::size_t stage) {
  if (thick.size() < 2) return;
  const auto sep = min_separation(MetricFamily{thick, ""});
  if (sep && *sep <= r)
    throw IntegrityError(stage_name(stage) + ": thickened pieces of one family are " + std::to_string(*sep) +
                         " apart, need more than " + std::to_string(r));
}

void measure(CoverLevel& level, std::size_t stage, std::size_t width, Dist lebesgue_floor) {
  for (const auto& c : level.covers) {
    const Dist leb = lebesgue_number(c);
    const auto m = multiplicity(c);
    if (m > width)
      throw IntegrityError(stage_name(stage) + ": multiplicity " + std::to_string(m) + " exceeds width " +
                           std::to_string(width));
    if (leb < lebesgue_floor)
      throw IntegrityError(stage_name(stage) + ": Lebesgue number " + std::to_string(leb) + " below " +
                           std::to_string(lebesgue_floor));
    level.lebesgue.push_back(leb);
    level.multiplicity.push_back(m);
    level.lambda.push_back(lambda_eff(c));
  }
}

}  // namespace

ThickenedChain thicken_chain(const DecompositionChain& chain, const std::vector<Dist>& radii) {
  if (radii.size() != chain.stages.size())
    throw StructuralError("one thickening radius per chain stage is required");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 0) throw DomainError("thickening radii must be nonnegative");
    if (i > 0 && radii[i] < radii[i - 1]) throw DomainError("thickening radii must be nondecreasing");
  }
  ThickenedChain out{chain.space, {}};
  const auto whole = SubsetRef::whole(chain.space);
  for (std::size_t i = 0; i < chain.stages.size(); ++i) {
    const auto& stage = chain.stages[i];
    const Dist r = radii[i];
    CoverLevel level;
    level.radius = r;
    if (i == 0) {
      if (stage.steps.size() != 1) throw StructuralError("first stage must decompose the whole space once");
      std::vector<std::size_t> ids;
      for (const auto& sub : stage.steps[0].subfamilies) {
        std::vector<SubsetRef> thick;
        for (const auto& v : sub.pieces) thick.push_back(thicken(v, r, whole));
        check_separation(thick, r, i);
        for (auto& t : thick) {
          ids.push_back(level.members.size());
          level.members.push_back(std::move(t));
          level.parent.push_back(0);
        }
      }
      level.covers.push_back(Cover{whole, level.members});
      level.cover_members.push_back(std::move(ids));
      measure(level, i, stage.width, r);
    } else {
      const auto& above = out.levels.back();
      if (stage.steps.size() != above.members.size())
        throw StructuralError(stage_name(i) + ": steps do not match the pieces above");
      for (std::size_t p = 0; p < stage.steps.size(); ++p) {
        const auto& u = above.members[p];
        std::vector<std::size_t> ids;
        std::vector<SubsetRef> local;
        for (const auto& sub : stage.steps[p].subfamilies) {
          std::vector<SubsetRef> thick;
          for (const auto& v : sub.pieces) thick.push_back(thicken(v, r, u));
          check_separation(thick, r, i);
          for (auto& t : thick) {
            ids.push_back(level.members.size());
            local.push_back(t);
            level.members.push_back(std::move(t));
            level.parent.push_back(p);
          }
        }
        level.covers.push_back(Cover{u, std::move(local)});
        level.cover_members.push_back(std::move(ids));
      }
      measure(level, i, stage.width, r - radii[i - 1]);
    }
    out.levels.push_back(std::move(level));
  }
  return out;
}

// -- witness ---------------------------------------------------------------------------

namespace {

using Vec = SparseL1Vector;

std::size_t pos_in(const SubsetRef& region, PointId p) {
  const auto& m = region.members();
  auto it = std::lower_bound(m.begin(), m.end(), p);
  if (it == m.end() || *it != p) return m.size();
  return static_cast<std::size_t>(it - m.begin());
}

Vec relabel(const Vec& v, const std::vector<std::size_t>& ids) {
  std::vector<Vec::Entry> e;
  for (const auto& [k, q] : v.entries()) e.emplace_back(ids[k], q);
  return Vec::from_entries(std::move(e));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw IntegrityError(what);
}

}  // namespace

WitnessFamily witness_from_chain(const SpacePtr& space, std::int64_t n, const ChainFactory& factory,
                                 const WitnessOptions& options, WitnessDiagnostics* diagnostics) {
  if (n < 1) throw DomainError("witness scale n must be positive");
  const std::size_t size = space->size();
  const Dist max_radius =
      options.max_radius > 0 ? options.max_radius : std::max<Dist>(space->diameter(), 2 * n + 1);

  WitnessFamily w;
  w.space = space;
  w.n = n;

  auto tripled = [](std::vector<Dist> r) {
    for (auto& x : r) x *= 3;
    return r;
  };

  // Radius search, one stage at a time.
  DecompositionChain chain{space, {}};
  ThickenedChain thick{space, {}};
  for (std::size_t i = 0; i < options.stages && size > 1; ++i) {
    const double budget = 1.0 / (std::ldexp(1.0, static_cast<int>(i) + 1) * static_cast<double>(n));
    Dist r = std::max<Dist>(2 * n + 1, w.radii.empty() ? 0 : w.radii.back());
    bool done = false, exhausted = false;
    for (;;) {
      if (r > max_radius)
        throw ResourceError("stage " + std::to_string(i + 1) + " needs a thickening radius above " +
                            std::to_string(max_radius) + " for n = " + std::to_string(n) +
                            "; use a larger ball");
      auto radii = w.radii;
      radii.push_back(r);
      auto candidate = factory(tripled(radii));
      if (candidate.stages.size() < radii.size()) {
        exhausted = true;  // the chain ended: nothing left to decompose
        break;
      }
      candidate.stages.resize(radii.size());
      auto t = thicken_chain(candidate, radii);
      const auto& level = t.levels.back();
      const auto m = level.max_multiplicity();
      const auto l = level.min_lambda();
      const long double term = l >= 1 ? ozawa_bound(m, n, l) : 2.0L;
      if (l >= 2 * n + 1 && term <= budget) {
        w.radii = std::move(radii);
        w.terms.push_back(StageTerm{r, m, l, level.min_lebesgue(), term, budget});
        chain = std::move(candidate);
        thick = std::move(t);
        done = true;
        break;
      }
      r = std::max(r + 1, (3 * r + 1) / 2);
    }
    if (exhausted || !done) break;
  }

  // Pairs at distance <= n.
  std::vector<std::pair<PointId, PointId>> pairs;
  for (PointId x = 0; x < size; ++x)
    for (PointId y = x + 1; y < size; ++y)
      if (space->dist(x, y) <= n) pairs.emplace_back(x, y);

  if (diagnostics) *diagnostics = WitnessDiagnostics{};
  std::vector<Vec> g;
  for (std::size_t lv = 0; lv < thick.levels.size(); ++lv) {
    const auto& level = thick.levels[lv];
    std::vector<std::vector<Vec>> local;
    for (std::size_t c = 0; c < level.covers.size(); ++c) local.push_back(ozawa_map(level.covers[c], level.lambda[c]));
    std::vector<Vec> next(size);
    for (PointId x = 0; x < size; ++x) {
      if (lv == 0) {
        next[x] = relabel(local[0][pos_in(level.covers[0].region, x)], level.cover_members[0]);
        continue;
      }
      std::vector<Vec::Entry> e;
      for (const auto& [p, a] : g[x].entries()) {
        const auto& region = level.covers[p].region;
        const auto pos = pos_in(region, x);
        require(pos < region.size(), "stage " + std::to_string(lv + 1) + ": g_x charges a piece not containing x");
        for (const auto& [k, b] : local[p][pos].entries()) e.emplace_back(level.cover_members[p][k], a * b);
      }
      next[x] = Vec::from_entries(std::move(e));
    }
    for (PointId x = 0; x < size; ++x)
      require(next[x].norm() == 1, "stage " + std::to_string(lv + 1) + ": g_x is not a unit vector");
    // Recursion contract with the measured stage term.
    const Rational allowance = from_double(static_cast<double>(w.terms[lv].term) + kGuard);
    for (const auto& [x, y] : pairs) {
      const Rational prev = lv == 0 ? Rational(0) : l1_distance(g[x], g[y]);
      require(l1_distance(next[x], next[y]) <= prev + allowance,
              "stage " + std::to_string(lv + 1) + ": recursion bound fails at (" + space->label(x) + ", " +
                  space->label(y) + ")");
    }
    if (diagnostics) {
      diagnostics->recursion_pairs.push_back(pairs.size());
      diagnostics->lebesgue_reached_radius.push_back(level.min_lebesgue() >= level.radius);
    }
    g = std::move(next);
  }

  // Projection to representatives.
  const auto terminal = thick.levels.empty() ? std::vector<SubsetRef>{SubsetRef::whole(space)}
                                             : thick.levels.back().members;
  w.support_radius = thick.levels.empty() ? space->diameter() : thick.levels.back().mesh();
  w.maps.resize(size);
  for (PointId x = 0; x < size; ++x) {
    if (g.empty()) {
      w.maps[x] = Vec::point_mass(terminal.front().members().front());
      continue;
    }
    std::vector<Vec::Entry> e;
    for (const auto& [q, a] : g[x].entries()) e.emplace_back(terminal[q].members().front(), a);
    w.maps[x] = Vec::from_entries(std::move(e));
  }

  std::mt19937_64 rng(11);
  std::size_t projected = 0;
  auto check_projection = [&](PointId x, PointId y) {
    if (g.empty()) return;
    ++projected;
    require(l1_distance(w.maps[x], w.maps[y]) <= l1_distance(g[x], g[y]), "projection is not nonexpansive");
  };
  for (const auto& [x, y] : pairs) check_projection(x, y);
  for (std::size_t s = 0; s < options.projection_samples && size > 1; ++s)
    check_projection(static_cast<PointId>(rng() % size), static_cast<PointId>(rng() % size));
  if (diagnostics) diagnostics->projection_pairs = projected;

  const Rational eps(1, static_cast<unsigned long>(n));
  for (PointId x = 0; x < size; ++x) {
    require(w.maps[x].norm() == 1, "f_x is not a unit vector at " + space->label(x));
    for (const auto& [y, q] : w.maps[x].entries())
      require(space->dist(x, static_cast<PointId>(y)) <= w.support_radius, "support leaves B(x, S_n) at " + space->label(x));
  }
  for (const auto& [x, y] : pairs)
    require(l1_distance(w.maps[x], w.maps[y]) <= eps,
            "||f_x - f_y|| > 1/n at (" + space->label(x) + ", " + space->label(y) + ")");
  return w;
}

Json WitnessFamily::to_json() const {
  Json j;
  j["schema"] = "dcg.witness/1";
  j["space"] = space->name();
  j["n"] = n;
  j["support_radius"] = support_radius;
  j["radii"] = radii;
  Json terms_j = Json::array();
  for (const auto& t : terms) {
    std::ostringstream term;
    term.precision(17);
    term << static_cast<double>(t.term);
    terms_j.push_back({{"radius", t.radius},
                       {"multiplicity", t.multiplicity},
                       {"lambda_eff", t.lambda},
                       {"lebesgue", t.lebesgue},
                       {"term", term.str()}});
  }
  j["stages"] = terms_j;
  Json maps_j = Json::array();
  for (PointId x = 0; x < maps.size(); ++x) maps_j.push_back({{"point", space->label(x)}, {"f", maps[x].to_json()}});
  j["maps"] = maps_j;
  return j;
}

WitnessReport verify_witness(const WitnessFamily& w, Dist r, const Rational& eps) {
  WitnessReport rep;
  rep.max_norm_deviation = 0;
  rep.sup_variation = 0;
  const auto& sp = *w.space;
  for (PointId x = 0; x < w.maps.size(); ++x) {
    const Rational dev = abs(w.maps[x].norm() - 1);
    if (dev > rep.max_norm_deviation) rep.max_norm_deviation = dev;
    for (const auto& [y, q] : w.maps[x].entries()) {
      if (q < 0) rep.nonnegative = false;
      rep.max_support_radius = std::max(rep.max_support_radius, sp.dist(x, static_cast<PointId>(y)));
    }
  }
  rep.support_ok = rep.max_support_radius <= w.support_radius;
  for (PointId x = 0; x < w.maps.size(); ++x)
    for (PointId y = x + 1; y < w.maps.size(); ++y) {
      if (sp.dist(x, y) > r) continue;
      ++rep.pairs;
      const Rational d = l1_distance(w.maps[x], w.maps[y]);
      if (d > rep.sup_variation) rep.sup_variation = d;
    }
  rep.variation_ok = rep.sup_variation <= eps;
  rep.pass = rep.max_norm_deviation == 0 && rep.nonnegative && rep.support_ok && rep.variation_ok;
  return rep;
}

}  // namespace dcg
