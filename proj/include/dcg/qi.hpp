#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dcg/family.hpp"
#include "dcg/growth.hpp"
#include "dcg/rational.hpp"

namespace dcg {

/// f : X -> Y with L d(x,y) - C < d(f x, f y) < L d(x,y) + C for x != y.
/// With C = 0 the inequalities are read non-strictly (an isometry is a (1,0)
/// embedding).
struct QIEmbedding {
  SpacePtr source;
  SpacePtr target;
  std::vector<PointId> map;
  Rational l = 1;
  Rational c = 0;

  PointId operator()(PointId x) const { return map[x]; }
};

/// Validates L > 0, C >= 0 and the distortion inequalities: on all pairs when
/// |X|^2 <= 250000, otherwise on `samples` random pairs. IntegrityError on the
/// first violation.
QIEmbedding make_qi_embedding(SpacePtr source, SpacePtr target, std::vector<PointId> map,
                              Rational l, Rational c, std::size_t samples = 20000,
                              std::uint64_t seed = 1);

/// Preimage of a subset; empty when nothing maps into it.
std::vector<PointId> preimage(const std::vector<PointId>& map, const SubsetRef& piece);

struct PullbackFamily {
  MetricFamily family;
  /// Distinct pieces are strictly farther apart than this.
  Rational certified_separation;
  /// No piece has diameter above this.
  Rational certified_mesh;
  std::optional<Dist> actual_separation;
  Dist actual_mesh = 0;
  /// Pieces of V with empty preimage.
  std::size_t dropped = 0;
};

/// f^{-1}(V) for an R-disjoint family V of mesh <= D (checked; DomainError
/// otherwise). The result is certified (R-C)/L-disjoint with mesh <= (D+C)/L;
/// IntegrityError if the measured values contradict either bound.
PullbackFamily pullback_family(const QIEmbedding& f, const MetricFamily& v, Dist r, Dist d);

/// Largest integer radius implied by strict separation above q: floor(q), at
/// least 0 (distinct preimage pieces are always disjoint).
Dist integer_radius(const Rational& q);

struct PullbackDecomposition {
  Decomposition decomposition;
  Rational certified_radius;
  /// integer_radius(certified_radius).
  Dist formula_radius = 0;
};

/// Pulls back every subfamily. The stored radius is the larger of the formula
/// radius and the separation actually measured (minus one).
PullbackDecomposition pullback_decomposition(const QIEmbedding& f, const Decomposition& d);

struct PullbackChain {
  DecompositionChain chain;
  /// x -> s(Lx + C).
  GrowthFunction bound;
  /// (R_i - C)/L: the pulled-back stage i is strictly this far separated.
  std::vector<Rational> certified_radii;
  /// bound evaluated at the certified radii, i.e. s(R_i).
  std::vector<std::int64_t> stage_bounds;
  ChainReport report;
};

/// Pulls a chain on Y verified against s back to X. Stage radii are
/// integer_radius((R_i - C)/L). DomainError if the input chain does not verify
/// against s or lives on another space; IntegrityError if the result fails.
PullbackChain pullback_chain(const QIEmbedding& f, const DecompositionChain& chain,
                             const GrowthFunction& s);

}  // namespace dcg
