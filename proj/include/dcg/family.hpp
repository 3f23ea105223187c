#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dcg/metric_space.hpp"

namespace dcg {

/// Nonempty set of point indices into a shared space. Members are kept sorted
/// and unique so equality of point sets is equality of vectors.
class SubsetRef {
 public:
  SubsetRef(SpacePtr space, std::vector<PointId> members);
  static SubsetRef whole(SpacePtr space);

  const SpacePtr& space() const { return space_; }
  const std::vector<PointId>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(PointId p) const;
  Dist diameter() const;

  friend bool operator==(const SubsetRef& a, const SubsetRef& b) {
    return a.space_ == b.space_ && a.members_ == b.members_;
  }

 private:
  SpacePtr space_;
  std::vector<PointId> members_;
};

/// A finite list of pieces over one space. Pieces may overlap; equal point
/// sets at different positions are distinct pieces.
struct MetricFamily {
  std::vector<SubsetRef> pieces;
  std::string tag;
};

struct Decomposition {
  SubsetRef source;
  Dist radius = 0;
  std::vector<MetricFamily> subfamilies;

  std::size_t width() const { return subfamilies.size(); }
};

/// One stage of a chain: every piece of the previous stage (the whole space
/// for the first stage) decomposed at the stage radius. steps[k] decomposes
/// parent piece k; the stage family is the concatenation of all step pieces.
struct ChainStage {
  Dist radius = 0;
  std::size_t width = 0;
  std::vector<Decomposition> steps;

  MetricFamily family() const;
};

struct DecompositionChain {
  SpacePtr space;
  std::vector<ChainStage> stages;

  std::vector<Dist> radii() const;
  std::vector<std::size_t> widths() const;
  /// Pieces of the last stage, or the whole space for an empty chain.
  MetricFamily terminal_family() const;
  Dist terminal_mesh() const;
};

// -- metric vocabulary -------------------------------------------------------

/// min over a in A, b in B of d(a,b). Throws StructuralError when the subsets
/// live in different spaces.
Dist set_distance(const SubsetRef& a, const SubsetRef& b);

/// Largest piece diameter. Throws DomainError on an empty family.
Dist mesh(const MetricFamily& family);

/// Every pair of distinct pieces is at distance strictly greater than r.
bool is_r_disjoint(const MetricFamily& family, Dist r);

/// Minimum distance between distinct pieces; nullopt for fewer than two pieces.
std::optional<Dist> min_separation(const MetricFamily& family);

/// {x : d(x, piece) <= r} restricted to `region`.
SubsetRef thicken(const SubsetRef& piece, Dist r, const SubsetRef& region);

// -- verification ------------------------------------------------------------

struct SubfamilyCheck {
  std::optional<Dist> min_distance;
  bool disjoint = true;
};

struct DecompositionReport {
  std::vector<SubfamilyCheck> subfamilies;
  std::vector<PointId> uncovered;
  bool pieces_inside_source = true;
  bool covers = true;
  bool pass = true;

  std::string summary() const;
};

DecompositionReport verify_decomposition(const Decomposition& d);

struct StageCheck {
  std::size_t stage = 0;
  Dist radius = 0;
  std::size_t width = 0;
  std::optional<std::int64_t> width_bound;
  bool steps_pass = true;
  bool parents_match = true;
  bool within_bound = true;
};

struct ChainReport {
  bool radii_nondecreasing = true;
  std::vector<StageCheck> stages;
  Dist terminal_mesh = 0;
  std::vector<std::string> failures;
  bool pass = true;

  std::string summary() const;
};

using WidthBound = std::function<std::int64_t(Dist radius)>;

/// Checks stage widths against bound(R_i), every step witness, radii order and
/// that every step decomposes exactly one piece of the previous stage.
ChainReport verify_chain(const DecompositionChain& chain, const WidthBound& bound);
/// Same with an explicit per-stage list of width bounds.
ChainReport verify_chain(const DecompositionChain& chain,
                         const std::vector<std::int64_t>& bounds);
/// Structural checks only (declared widths are their own bound).
ChainReport verify_chain(const DecompositionChain& chain);

/// The decomposition of `piece` into the single family {piece}.
Decomposition trivial_decomposition(const SubsetRef& piece, Dist radius);

}  // namespace dcg
