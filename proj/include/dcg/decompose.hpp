#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dcg/family.hpp"

namespace dcg {

enum class StrategyKind { greedy, grid, exact };

std::string to_string(StrategyKind kind);
/// Accepts "greedy", "grid" and "exact"; ConfigError otherwise.
StrategyKind parse_strategy(const std::string& text);

/// Piece diameter bound as a function of the radius.
using MeshRule = std::function<Dist(Dist radius)>;

/// D = k*R. The default rule is k = 3.
MeshRule mesh_rule_multiple(Dist k);
/// Parses "3R", "2R", "R" or a constant such as "7".
MeshRule parse_mesh_rule(const std::string& text);

struct DecompositionStrategy {
  StrategyKind kind = StrategyKind::greedy;
  /// Piece diameter bound D.
  Dist mesh = 0;
  /// Size limit for the exact search.
  std::size_t exact_limit = 12;
};

/// Ball carving then first-fit colouring. Pieces are claimed from the lowest
/// uncovered index (BFS order, so lowest canonical key) with radius floor(D/2)
/// among uncovered points; two pieces conflict when their distance is <= R.
Decomposition greedy_decompose(const SubsetRef& region, Dist r, Dist d);

/// Lattice cubes of side floor(D/dim)+1 coloured by cell index modulo k in every
/// coordinate, with k the least value making same-coloured cells R-disjoint.
/// Needs lattice coordinates on the space; DomainError otherwise.
Decomposition grid_decompose(const SubsetRef& region, Dist r, Dist d);

/// Minimum number of R-disjoint families of pieces of diameter <= D covering
/// the region. Exhaustive; ResourceError when the region exceeds `limit`.
std::size_t exact_min_families(const SubsetRef& region, Dist r, Dist d, std::size_t limit = 12);

/// An optimal decomposition found by the same search.
Decomposition exact_decompose(const SubsetRef& region, Dist r, Dist d, std::size_t limit = 12);

Decomposition decompose(const SubsetRef& region, Dist r, const DecompositionStrategy& strategy);

struct ChainOptions {
  StrategyKind kind = StrategyKind::greedy;
  MeshRule mesh_rule = mesh_rule_multiple(3);
  /// Stop before a stage once the current family has mesh <= this bound.
  Dist stop_mesh = 0;
  std::size_t exact_limit = 12;
};

/// Stage i decomposes every piece of stage i-1 (the whole space for i = 1) at
/// radii[i]. Throws IntegrityError if the finished chain does not verify.
DecompositionChain build_chain(const SpacePtr& space, const std::vector<Dist>& radii,
                               const ChainOptions& options = {});

struct SfdcResult {
  /// Set when every stage found a decomposition of width <= 2.
  std::optional<DecompositionChain> chain;
  /// Stage (1-based) where the search gave up, with the narrowest width seen.
  std::size_t failed_stage = 0;
  std::size_t best_width = 0;
  std::string message;

  bool found() const { return chain.has_value(); }
};

/// Width-2 chain search. Tries the grid strategy when coordinates exist, then
/// greedy, then the exact search on pieces within the exact limit. A failure
/// is a search result, not a proof that no width-2 chain exists.
SfdcResult sfdc_chain(const SpacePtr& space, const std::vector<Dist>& radii,
                      const ChainOptions& options = {});

// -- finite-scale dimension profile ----------------------------------------------

struct ProfileRow {
  std::string space;
  std::int64_t ball_radius = 0;
  Dist radius = 0;
  Dist mesh = 0;
  std::optional<std::size_t> n_greedy;
  std::optional<std::size_t> n_exact;
  std::optional<double> wall_ms;
  std::string note;
};

/// Rows of (space, N, R, D, n_greedy, n_exact). Each n is the width found at
/// that ball radius: an upper estimate of d_X(R) restricted to the ball, not
/// the asymptotic value.
struct ProfileTable {
  std::vector<ProfileRow> rows;

  /// RFC-4180 CSV. wall_ms is left empty unless timings were recorded.
  std::string to_csv() const;
};

struct ProfileOptions {
  MeshRule mesh_rule = mesh_rule_multiple(3);
  std::size_t exact_limit = 12;
  bool record_time = false;
};

using SpaceFactory = std::function<SpacePtr(std::int64_t ball_radius)>;

/// ResourceErrors raised while building a space or searching become row notes.
ProfileTable dimension_profile(const std::string& descriptor, const SpaceFactory& factory,
                               const std::vector<std::int64_t>& ball_radii,
                               const std::vector<Dist>& radii, const ProfileOptions& options = {});

}  // namespace dcg
