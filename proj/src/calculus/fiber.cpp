#include "dcg/fiber.hpp"

#include <algorithm>
#include <random>

#include "dcg/decompose.hpp"
#include "dcg/errors.hpp"
#include "dcg/product.hpp"

namespace dcg {

PointId GroupAction::project(PointId g) const {
  const auto y = act(group->element(g), basepoint);
  if (!y) throw StructuralError(description + ": g.x0 leaves the target for g = " +
                                group->group->format(group->element(g)));
  return *y;
}

Dist GroupAction::lipschitz() const {
  Dist best = 0;
  for (const auto& gen : group->group->generators()) {
    const auto y = act(gen.key, basepoint);
    if (!y) throw StructuralError(description + ": generator " + gen.label + " moves x0 out of the target");
    best = std::max(best, target->dist(basepoint, *y));
  }
  return best;
}

void validate_action(const GroupAction& action, std::size_t samples, std::uint64_t seed) {
  const auto& space = *action.group->space;
  std::vector<char> hit(action.target->size(), 0);
  for (PointId g = 0; g < space.size(); ++g) {
    const auto y = action.act(action.group->element(g), action.basepoint);
    if (y) hit[*y] = 1;
  }
  for (PointId x = 0; x < hit.size(); ++x)
    if (!hit[x]) throw StructuralError(action.description + ": not transitive on the target (" +
                                       action.target->label(x) + " unreached)");
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto& g = action.group->element(static_cast<PointId>(rng() % space.size()));
    const auto x = static_cast<PointId>(rng() % action.target->size());
    const auto y = static_cast<PointId>(rng() % action.target->size());
    const auto gx = action.act(g, x), gy = action.act(g, y);
    if (gx && gy && action.target->dist(*gx, *gy) != action.target->dist(x, y))
      throw StructuralError(action.description + ": action is not isometric");
  }
}

GroupAction walker_action(std::shared_ptr<const BallSpec> wreath_ball,
                          std::shared_ptr<const BallSpec> base_ball) {
  GroupAction a;
  a.group = wreath_ball;
  a.target = base_ball->space;
  const auto limit = base_ball->space->size();
  a.act = [base_ball, limit](const Key& g, PointId x) -> std::optional<PointId> {
    const Key moved = base_ball->group->multiply(wreath_parts(g).base, base_ball->element(x));
    const auto it = base_ball->table.index.find(moved);
    if (it == base_ball->table.index.end() || it->second >= limit) return std::nullopt;
    return it->second;
  };
  a.basepoint = 0;
  a.description = wreath_ball->group->name() + " on " + base_ball->space->name() + " via the walker";
  return a;
}

GroupAction trivial_action(std::shared_ptr<const BallSpec> ball) {
  GroupAction a;
  a.group = std::move(ball);
  a.target = FiniteMetricSpace::path(1);
  a.act = [](const Key&, PointId) -> std::optional<PointId> { return PointId{0}; };
  a.description = a.group->group->name() + " on a point";
  return a;
}

GroupAction left_action(std::shared_ptr<const BallSpec> ball) {
  GroupAction a;
  a.group = ball;
  a.target = ball->space;
  const auto limit = ball->space->size();
  a.act = [ball, limit](const Key& g, PointId x) -> std::optional<PointId> {
    const auto it = ball->table.index.find(ball->group->multiply(g, ball->element(x)));
    if (it == ball->table.index.end() || it->second >= limit) return std::nullopt;
    return it->second;
  };
  a.description = ball->group->name() + " on itself";
  return a;
}

StabChainFactory sfdc_stab_factory(std::vector<Dist> radii, ChainOptions options) {
  return [radii = std::move(radii), options](const SpacePtr& piece, Dist) -> std::optional<DecompositionChain> {
    auto found = sfdc_chain(piece, radii, options);
    if (!found.found()) return std::nullopt;
    return std::move(*found.chain);
  };
}

namespace {

// g_U^{-1} U as its own metric space, distances recomputed from translated keys.
SpacePtr translate_piece(const GroupAction& action, const SubsetRef& u, Dist stab_d) {
  const auto& ball = *action.group;
  const auto& grp = *ball.group;
  const PointId rep = u.members().front();
  const Key rep_inv = grp.invert(ball.element(rep));
  const PointId rep_x = action.project(rep);
  std::vector<Key> keys;
  std::vector<std::string> labels;
  for (PointId g : u.members()) {
    if (action.target->dist(action.project(g), rep_x) > stab_d)
      throw IntegrityError("translated fiber element leaves stab_D(x0)");
    keys.push_back(grp.multiply(rep_inv, ball.element(g)));
    labels.push_back(grp.format(keys.back()));
  }
  const std::size_t n = keys.size();
  std::vector<std::vector<Dist>> rows(n, std::vector<Dist>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const Dist d = ball.distance_of(keys[a], keys[b]);
      if (d != ball.space->dist(u.members()[a], u.members()[b]))
        throw IntegrityError("left translation changed a distance");
      rows[a][b] = rows[b][a] = d;
    }
  return FiniteMetricSpace::from_matrix("stab-piece@" + ball.space->label(rep), std::move(labels), rows);
}

SubsetRef back(const SpacePtr& space, const SubsetRef& u, const SubsetRef& translated) {
  std::vector<PointId> members;
  for (PointId k : translated.members()) members.push_back(u.members()[k]);
  return SubsetRef(space, std::move(members));
}

}  // namespace

FiberResult fiber_chain(const GroupAction& action, const DecompositionChain& target_chain,
                        const GrowthFunction& s, const StabChainFactory& stab) {
  if (target_chain.space != action.target) throw StructuralError("target chain lives on another space");
  const auto space = action.group->space;
  const std::size_t n = space->size();
  FiberResult out;
  out.lipschitz = action.lipschitz();
  out.stab_diameter = target_chain.terminal_mesh();
  out.chain.space = space;

  std::vector<PointId> pi(n);
  for (PointId g = 0; g < n; ++g) pi[g] = action.project(g);
  auto pull = [&](const SubsetRef& piece) {
    std::vector<PointId> members;
    for (PointId g = 0; g < n; ++g)
      if (piece.contains(pi[g])) members.push_back(g);
    if (members.empty()) throw StructuralError("action is not transitive: empty fiber");
    return SubsetRef(space, std::move(members));
  };

  // Pulled-back stages: a target family more than R apart pulls back more than
  // R/L apart, since d(g.x0, h.x0) <= L d(g,h).
  for (const auto& stage : target_chain.stages) {
    ChainStage pulled;
    pulled.radius = out.lipschitz == 0 ? stage.radius : stage.radius / out.lipschitz;
    pulled.width = stage.width;
    for (const auto& step : stage.steps) {
      Decomposition d{pull(step.source), pulled.radius, {}};
      for (const auto& sub : step.subfamilies) {
        MetricFamily fam{{}, sub.tag};
        for (const auto& p : sub.pieces) fam.pieces.push_back(pull(p));
        d.subfamilies.push_back(std::move(fam));
      }
      pulled.steps.push_back(std::move(d));
    }
    out.stage_bounds.push_back(s(stage.radius));
    out.chain.stages.push_back(std::move(pulled));
  }
  out.pullback_stages = out.chain.stages.size();

  // Stabilizer stages on every fiber piece.
  const auto fibers = out.chain.terminal_family().pieces;
  std::vector<DecompositionChain> local;
  std::vector<Dist> radii;
  for (const auto& u : fibers) {
    out.representatives.push_back(u.members().front());
    const auto translated = translate_piece(action, u, out.stab_diameter);
    auto c = stab(translated, out.stab_diameter);
    if (!c) throw StructuralError("no stabilizer chain for the fiber at " + space->label(u.members().front()));
    for (std::size_t i = 0; i < c->stages.size(); ++i)
      if (c->stages[i].width > 2) throw StructuralError("stabilizer chain wider than 2");
    const auto r = c->radii();
    const auto& shorter = r.size() <= radii.size() ? r : radii;
    const auto& longer = r.size() <= radii.size() ? radii : r;
    if (!std::equal(shorter.begin(), shorter.end(), longer.begin()))
      throw StructuralError("stabilizer chains disagree on radii");
    if (r.size() > radii.size()) radii = r;
    out.stab_terminal_mesh = std::max(out.stab_terminal_mesh, c->terminal_mesh());
    local.push_back(std::move(*c));
  }
  if (!radii.empty() && out.pullback_stages > 0 && radii.front() < out.chain.stages.back().radius)
    throw StructuralError("stabilizer radii start below the last pulled-back radius");
  for (auto& c : local) c = pad_chain(c, radii);

  for (std::size_t j = 0; j < radii.size(); ++j) {
    ChainStage stage;
    stage.radius = radii[j];
    for (std::size_t k = 0; k < fibers.size(); ++k) {
      const auto& st = local[k].stages[j];
      stage.width = std::max(stage.width, st.width);
      for (const auto& step : st.steps) {
        Decomposition d{back(space, fibers[k], step.source), step.radius, {}};
        for (const auto& sub : step.subfamilies) {
          MetricFamily fam{{}, sub.tag};
          for (const auto& p : sub.pieces) fam.pieces.push_back(back(space, fibers[k], p));
          d.subfamilies.push_back(std::move(fam));
        }
        stage.steps.push_back(std::move(d));
      }
    }
    out.stage_bounds.push_back(2);
    out.chain.stages.push_back(std::move(stage));
  }

  std::vector<char> covered(n, 0);
  for (const auto& p : out.chain.terminal_family().pieces)
    for (PointId g : p.members()) covered[g] = 1;
  if (std::count(covered.begin(), covered.end(), 0) != 0)
    throw IntegrityError("fiber chain does not cover the ball");
  out.report = verify_chain(out.chain, out.stage_bounds);
  if (!out.report.pass) throw IntegrityError("fiber chain fails verification: " + out.report.summary());
  return out;
}

}  // namespace dcg
