#include "dcg/family.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "dcg/errors.hpp"

namespace dcg {

SubsetRef::SubsetRef(SpacePtr space, std::vector<PointId> members)
    : space_(std::move(space)), members_(std::move(members)) {
  if (!space_) throw StructuralError("subset without a parent space");
  if (members_.empty()) throw DomainError("subsets must be nonempty");
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (members_.back() >= space_->size()) {
    throw StructuralError("subset index " + std::to_string(members_.back()) +
                          " out of range for space '" + space_->name() + "'");
  }
}

SubsetRef SubsetRef::whole(SpacePtr space) {
  std::vector<PointId> all(space->size());
  for (PointId i = 0; i < all.size(); ++i) all[i] = i;
  return SubsetRef(std::move(space), std::move(all));
}

bool SubsetRef::contains(PointId p) const {
  return std::binary_search(members_.begin(), members_.end(), p);
}

Dist SubsetRef::diameter() const {
  Dist best = 0;
  const auto& sp = *space_;
  for (std::size_t i = 0; i < members_.size(); ++i)
    for (std::size_t j = i + 1; j < members_.size(); ++j)
      best = std::max(best, sp.dist(members_[i], members_[j]));
  return best;
}

MetricFamily ChainStage::family() const {
  MetricFamily out;
  out.tag = "stage";
  for (const auto& step : steps)
    for (const auto& sub : step.subfamilies)
      for (const auto& piece : sub.pieces) out.pieces.push_back(piece);
  return out;
}

std::vector<Dist> DecompositionChain::radii() const {
  std::vector<Dist> out;
  for (const auto& s : stages) out.push_back(s.radius);
  return out;
}

std::vector<std::size_t> DecompositionChain::widths() const {
  std::vector<std::size_t> out;
  for (const auto& s : stages) out.push_back(s.width);
  return out;
}

MetricFamily DecompositionChain::terminal_family() const {
  if (stages.empty()) return MetricFamily{{SubsetRef::whole(space)}, "whole"};
  return stages.back().family();
}

Dist DecompositionChain::terminal_mesh() const { return mesh(terminal_family()); }

Dist set_distance(const SubsetRef& a, const SubsetRef& b) {
  if (a.space() != b.space()) {
    throw StructuralError("set distance between subsets of different spaces ('" +
                          a.space()->name() + "' vs '" + b.space()->name() + "')");
  }
  const auto& sp = *a.space();
  Dist best = std::numeric_limits<Dist>::max();
  for (PointId p : a.members())
    for (PointId q : b.members()) {
      best = std::min(best, sp.dist(p, q));
      if (best == 0) return 0;
    }
  return best;
}

Dist mesh(const MetricFamily& family) {
  if (family.pieces.empty()) throw DomainError("mesh of an empty family is undefined");
  Dist best = 0;
  for (const auto& piece : family.pieces) best = std::max(best, piece.diameter());
  return best;
}

std::optional<Dist> min_separation(const MetricFamily& family) {
  const auto& pieces = family.pieces;
  if (pieces.size() < 2) return std::nullopt;
  for (const auto& p : pieces)
    if (p.space() != pieces.front().space())
      throw StructuralError("family mixes pieces of different spaces");
  // Point-level scan: each point remembers its piece so the cost is quadratic
  // in the number of covered points rather than in the number of pieces.
  std::vector<std::pair<PointId, std::uint32_t>> owned;
  for (std::uint32_t k = 0; k < pieces.size(); ++k)
    for (PointId p : pieces[k].members()) owned.emplace_back(p, k);
  const auto& sp = *pieces.front().space();
  Dist best = std::numeric_limits<Dist>::max();
  for (std::size_t i = 0; i < owned.size(); ++i)
    for (std::size_t j = i + 1; j < owned.size(); ++j) {
      if (owned[i].second == owned[j].second) continue;
      best = std::min(best, sp.dist(owned[i].first, owned[j].first));
    }
  return best;
}

bool is_r_disjoint(const MetricFamily& family, Dist r) {
  const auto sep = min_separation(family);
  return !sep || *sep > r;
}

SubsetRef thicken(const SubsetRef& piece, Dist r, const SubsetRef& region) {
  if (piece.space() != region.space()) throw StructuralError("thicken across spaces");
  const auto& sp = *piece.space();
  std::vector<PointId> out;
  for (PointId x : region.members()) {
    for (PointId v : piece.members())
      if (sp.dist(x, v) <= r) {
        out.push_back(x);
        break;
      }
  }
  if (out.empty()) throw DomainError("thickening does not meet the region");
  return SubsetRef(piece.space(), std::move(out));
}

std::string DecompositionReport::summary() const {
  std::ostringstream os;
  os << (pass ? "pass" : "fail") << ":";
  for (std::size_t i = 0; i < subfamilies.size(); ++i) {
    os << " [" << i << ": ";
    if (subfamilies[i].min_distance)
      os << "min " << *subfamilies[i].min_distance;
    else
      os << "single piece";
    os << (subfamilies[i].disjoint ? " ok" : " NOT disjoint") << "]";
  }
  if (!pieces_inside_source) os << " pieces leave the source;";
  if (!covers) os << " " << uncovered.size() << " points uncovered";
  return os.str();
}

DecompositionReport verify_decomposition(const Decomposition& d) {
  DecompositionReport report;
  const auto& source = d.source;
  std::vector<char> covered(source.space()->size(), 0);
  for (const auto& sub : d.subfamilies) {
    for (const auto& piece : sub.pieces) {
      if (piece.space() != source.space()) {
        throw StructuralError("decomposition piece lives in a different space");
      }
      for (PointId p : piece.members()) {
        covered[p] = 1;
        if (!source.contains(p)) report.pieces_inside_source = false;
      }
    }
    SubfamilyCheck check;
    check.min_distance = min_separation(sub);
    check.disjoint = !check.min_distance || *check.min_distance > d.radius;
    report.subfamilies.push_back(check);
    if (!check.disjoint) report.pass = false;
  }
  for (PointId p : source.members())
    if (!covered[p]) report.uncovered.push_back(p);
  report.covers = report.uncovered.empty();
  report.pass = report.pass && report.covers && report.pieces_inside_source &&
                !d.subfamilies.empty();
  return report;
}

std::string ChainReport::summary() const {
  std::ostringstream os;
  os << (pass ? "pass" : "fail") << ": " << stages.size() << " stages, terminal mesh "
     << terminal_mesh;
  for (const auto& f : failures) os << "; " << f;
  return os.str();
}

namespace {

ChainReport verify_chain_impl(const DecompositionChain& chain,
                              const std::function<std::optional<std::int64_t>(
                                  std::size_t, Dist)>& bound_at) {
  ChainReport report;
  MetricFamily parents{{SubsetRef::whole(chain.space)}, "whole"};
  Dist previous = 0;
  for (std::size_t i = 0; i < chain.stages.size(); ++i) {
    const auto& stage = chain.stages[i];
    StageCheck check;
    check.stage = i + 1;
    check.radius = stage.radius;
    check.width = stage.width;
    if (i > 0 && stage.radius < previous) {
      report.radii_nondecreasing = false;
      report.failures.push_back("radii not nondecreasing at stage " + std::to_string(i + 1));
    }
    previous = stage.radius;
    check.width_bound = bound_at(i, stage.radius);
    if (check.width_bound && static_cast<std::int64_t>(stage.width) > *check.width_bound) {
      check.within_bound = false;
      report.failures.push_back("stage " + std::to_string(i + 1) + " width " +
                                std::to_string(stage.width) + " > bound " +
                                std::to_string(*check.width_bound));
    }
    if (stage.steps.size() != parents.pieces.size()) {
      check.parents_match = false;
      report.failures.push_back("stage " + std::to_string(i + 1) + " has " +
                                std::to_string(stage.steps.size()) + " steps for " +
                                std::to_string(parents.pieces.size()) + " parent pieces");
    }
    for (std::size_t k = 0; k < stage.steps.size(); ++k) {
      const auto& step = stage.steps[k];
      if (check.parents_match && !(step.source == parents.pieces[k])) {
        check.parents_match = false;
        report.failures.push_back("stage " + std::to_string(i + 1) + " step " +
                                  std::to_string(k) + " does not decompose its parent piece");
      }
      if (step.radius < stage.radius || step.width() > stage.width) {
        check.steps_pass = false;
        report.failures.push_back("stage " + std::to_string(i + 1) + " step " +
                                  std::to_string(k) + " radius/width out of contract");
      }
      const auto r = verify_decomposition(step);
      if (!r.pass) {
        check.steps_pass = false;
        report.failures.push_back("stage " + std::to_string(i + 1) + " step " +
                                  std::to_string(k) + ": " + r.summary());
      }
    }
    report.stages.push_back(check);
    parents = stage.family();
  }
  report.terminal_mesh = chain.terminal_mesh();
  report.pass = report.failures.empty();
  return report;
}

}  // namespace

ChainReport verify_chain(const DecompositionChain& chain, const WidthBound& bound) {
  return verify_chain_impl(chain, [&](std::size_t, Dist r) -> std::optional<std::int64_t> {
    return bound(r);
  });
}

ChainReport verify_chain(const DecompositionChain& chain,
                         const std::vector<std::int64_t>& bounds) {
  return verify_chain_impl(chain,
                           [&](std::size_t i, Dist) -> std::optional<std::int64_t> {
                             if (i >= bounds.size()) return std::int64_t{0};
                             return bounds[i];
                           });
}

ChainReport verify_chain(const DecompositionChain& chain) {
  return verify_chain_impl(chain, [](std::size_t, Dist) -> std::optional<std::int64_t> {
    return std::nullopt;
  });
}

Decomposition trivial_decomposition(const SubsetRef& piece, Dist radius) {
  return Decomposition{piece, radius, {MetricFamily{{piece}, "trivial"}}};
}

}  // namespace dcg
