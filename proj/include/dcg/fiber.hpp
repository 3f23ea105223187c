#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dcg/ball.hpp"
#include "dcg/decompose.hpp"
#include "dcg/family.hpp"
#include "dcg/growth.hpp"

namespace dcg {

/// An isometric action of a group on a finite metric space, seen through a
/// ball B(e,N): act(g, x) is g.x when it lies in the target, nullopt otherwise.
struct GroupAction {
  std::shared_ptr<const BallSpec> group;
  SpacePtr target;
  std::function<std::optional<PointId>(const Key&, PointId)> act;
  PointId basepoint = 0;
  std::string description;

  /// g.x0 for the ball element g. StructuralError when undefined.
  PointId project(PointId g) const;
  /// max over generators s of d(x0, s.x0).
  Dist lipschitz() const;
};

/// Checks isometry on `samples` random (g, x, y) triples where both images
/// exist and that every target point is g.x0 for some g in the ball.
/// StructuralError on failure.
void validate_action(const GroupAction& action, std::size_t samples = 2000, std::uint64_t seed = 5);

/// `lamps wr base` acting on a ball of the base group through the walker
/// coordinate; lamps act trivially.
GroupAction walker_action(std::shared_ptr<const BallSpec> wreath_ball,
                          std::shared_ptr<const BallSpec> base_ball);
/// Action on a one-point space.
GroupAction trivial_action(std::shared_ptr<const BallSpec> ball);
/// Left multiplication on the ball itself with x0 = e.
GroupAction left_action(std::shared_ptr<const BallSpec> ball);

/// Decomposition chain for a finite subset of the stabilizer stab_D(x0),
/// handed over as a metric space (left-translated copy of a fiber piece).
/// Returning nullopt means no chain is available for that piece.
using StabChainFactory =
    std::function<std::optional<DecompositionChain>(const SpacePtr& piece, Dist d)>;

/// Width-2 chain search at fixed radii, as a stabilizer factory.
StabChainFactory sfdc_stab_factory(std::vector<Dist> radii, ChainOptions options = {});

struct FiberResult {
  DecompositionChain chain;
  Dist lipschitz = 0;
  /// Terminal mesh of the target chain: every translated piece lies in stab_D(x0).
  Dist stab_diameter = 0;
  /// Largest terminal mesh among the stabilizer chains.
  Dist stab_terminal_mesh = 0;
  std::size_t pullback_stages = 0;
  /// First ball element (shortest word, lowest key) of each fiber piece.
  std::vector<PointId> representatives;
  /// s(R_i) for pulled-back stages, 2 for stabilizer stages.
  std::vector<std::int64_t> stage_bounds;
  ChainReport report;
};

/// Chain on the ball from a chain on the target and chains on stabilizers.
/// The target chain is pulled back through g -> g.x0 (radius R becomes
/// floor(R/L)); each terminal piece U is translated by g_U^{-1} into
/// stab_D(x0), decomposed there and translated back. StructuralError if the
/// factory has no chain for a piece, if stabilizer radii disagree, or if a
/// stabilizer chain is wider than 2; IntegrityError if the result fails
/// verification or translation is not an isometry.
FiberResult fiber_chain(const GroupAction& action, const DecompositionChain& target_chain,
                        const GrowthFunction& s, const StabChainFactory& stab);

}  // namespace dcg
