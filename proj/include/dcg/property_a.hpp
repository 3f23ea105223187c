#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcg/family.hpp"
#include "dcg/metric_json.hpp"
#include "dcg/rational.hpp"

namespace dcg {

/// Finitely supported nonnegative vector in l1, entries sorted by key and
/// strictly positive. All arithmetic is exact.
class SparseL1Vector {
 public:
  using Key = std::uint64_t;
  using Entry = std::pair<Key, Rational>;

  SparseL1Vector() = default;
  /// Merges duplicate keys and drops zeros. DomainError on a negative value.
  static SparseL1Vector from_entries(std::vector<Entry> entries);
  static SparseL1Vector point_mass(Key k);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  Rational norm() const;
  Rational at(Key k) const;

  /// ||a - b||_1.
  friend Rational l1_distance(const SparseL1Vector& a, const SparseL1Vector& b);

  /// Sorted (key, numerator, denominator) triples.
  Json to_json() const;
  static SparseL1Vector from_json(const Json& j);

 private:
  std::vector<Entry> entries_;
};

/// Uniform unit vector on a nonempty set of keys. DomainError when empty.
SparseL1Vector xi(std::vector<SparseL1Vector::Key> keys);

/// Members covering a region; balls are intrinsic to the region.
struct Cover {
  SubsetRef region;
  std::vector<SubsetRef> members;
};

/// Depth of x in M: the largest k with B_region(x,k) inside M, or kUnbounded
/// when M contains the whole region. Absent pairs mean x is not in M.
struct CoverDepths {
  static constexpr std::int64_t kUnbounded = std::int64_t{1} << 40;
  /// Indexed by position of x in region.members(): (member index, depth),
  /// sorted by member index.
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> per_point;
};

/// StructuralError listing uncovered points when the members do not cover.
CoverDepths cover_depths(const Cover& cover);

/// Largest k with S_x(k) nonempty for every x; the region diameter when some
/// member contains the whole region.
Dist lebesgue_number(const Cover& cover);
std::size_t multiplicity(const Cover& cover);

/// Largest l such that S_x(k) is nonempty for all x and all
/// k <= 2l + floor((l-1)/2), the range the pair bound needs for every D with
/// 2D+1 <= l. Covers with a member containing the whole region get 2^30,
/// beyond every finite depth, so every f_x is the same vector.
std::int64_t lambda_eff(const Cover& cover);

/// f_x = (1/l) sum_{k=l+1}^{2l} xi(S_x(k)) over member indices, for every x in
/// the region (indexed by position). `lambda` defaults to lambda_eff; a value
/// whose range leaves some S_x(k) empty raises DomainError naming (x, k).
std::vector<SparseL1Vector> ozawa_map(const Cover& cover, std::optional<std::int64_t> lambda = std::nullopt);

/// 2(1 - m^(-2D/l)) in long double; 0 when m = 1 or D = 0.
long double ozawa_bound(std::size_t m, Dist d, std::int64_t lambda);

/// Guard band for comparing an exact left side against a real right side.
inline constexpr double kGuard = 1e-12;

struct OzawaCheck {
  std::size_t pairs = 0;
  std::size_t failures = 0;
  /// Largest (left side - right side) seen; negative when every pair passes.
  double worst_margin = -2;
  std::string first_failure;
};

/// Checks the pair bound on every pair with 2D+1 <= lambda.
OzawaCheck check_ozawa_bound(const Cover& cover, const std::vector<SparseL1Vector>& f,
                             std::int64_t lambda);

// -- thickened chains ----------------------------------------------------------------

/// One level of the nested covers. members[q] is the thickening of piece q of
/// the matching chain stage; parent[q] indexes the level above (unused at the
/// first level). covers[p] is the subcover of parent member p (one cover of
/// the whole space at the first level); cover_members[p] lists its member
/// indices in order.
struct CoverLevel {
  Dist radius = 0;
  std::vector<SubsetRef> members;
  std::vector<std::size_t> parent;
  std::vector<Cover> covers;
  std::vector<std::vector<std::size_t>> cover_members;
  std::vector<Dist> lebesgue;
  std::vector<std::size_t> multiplicity;
  std::vector<std::int64_t> lambda;

  std::size_t max_multiplicity() const;
  std::int64_t min_lambda() const;
  Dist min_lebesgue() const;
  Dist mesh() const;
};

struct ThickenedChain {
  SpacePtr space;
  std::vector<CoverLevel> levels;
};

/// Thickens stage i of the chain by radii[i]: the first level is
/// {B(V,R_1)}, deeper levels {B(V',R_{i+1}) cap U}. Asserts that same-family
/// thickened pieces stay more than R_i apart, multiplicity <= stage width and
/// Lebesgue number >= R_1 (first level) or R_{i+1} - R_i (deeper levels: a
/// point in the collar of U can sit R_i away from its piece). IntegrityError
/// naming the stage otherwise.
ThickenedChain thicken_chain(const DecompositionChain& chain, const std::vector<Dist>& radii);

// -- witnesses -----------------------------------------------------------------------

struct StageTerm {
  Dist radius = 0;
  std::size_t multiplicity = 0;
  std::int64_t lambda = 0;
  Dist lebesgue = 0;
  long double term = 0;
  /// 1/(2^i n) as a double, the budget the search aimed for.
  double budget = 0;
};

struct WitnessFamily {
  SpacePtr space;
  std::int64_t n = 1;
  /// Indexed by point; keys are point indices.
  std::vector<SparseL1Vector> maps;
  Dist support_radius = 0;
  std::vector<Dist> radii;
  std::vector<StageTerm> terms;

  Json to_json() const;
};

/// Chain at the given radii (already multiplied by three).
using ChainFactory = std::function<DecompositionChain(const std::vector<Dist>& radii)>;

struct WitnessOptions {
  std::size_t stages = 2;
  /// Largest thickening radius tried; 0 means max(diam(X), 2n+1).
  Dist max_radius = 0;
  /// Pairs sampled for the projection check.
  std::size_t projection_samples = 2000;
};

struct WitnessDiagnostics {
  /// Per stage: pairs checked against the recursion contract.
  std::vector<std::size_t> recursion_pairs;
  std::size_t projection_pairs = 0;
  /// Stages where the Lebesgue number reached the radius itself.
  std::vector<bool> lebesgue_reached_radius;
};

/// Selects R_1 <= R_2 <= ... stage by stage, starting at max(2n+1, R_{i-1})
/// and growing by half, until the measured stage term 2(1 - m^(-2n/l)) is at
/// most 1/(2^i n) with l >= 2n+1; builds g^1 from the first level, multiplies
/// per-piece maps down the levels and projects to the first point of every
/// terminal member. Asserts unit norms, supports, the recursion contract, the
/// projection and the final 1/n bound exactly; IntegrityError on failure,
/// ResourceError when the radius would pass max_radius.
WitnessFamily witness_from_chain(const SpacePtr& space, std::int64_t n, const ChainFactory& factory,
                                 const WitnessOptions& options = {},
                                 WitnessDiagnostics* diagnostics = nullptr);

struct WitnessReport {
  /// max |norm - 1| over points; must be exactly zero.
  Rational max_norm_deviation;
  bool nonnegative = true;
  Dist max_support_radius = 0;
  bool support_ok = true;
  Rational sup_variation;
  std::size_t pairs = 0;
  bool variation_ok = true;
  bool pass = true;
};

/// Conditions (1)-(3) at finite scale: unit norms, support within
/// support_radius, and sup ||f_x - f_y|| over d(x,y) <= r compared to eps.
WitnessReport verify_witness(const WitnessFamily& w, Dist r, const Rational& eps);

}  // namespace dcg
