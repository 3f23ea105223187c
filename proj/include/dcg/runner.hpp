#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dcg/ball.hpp"
#include "dcg/decompose.hpp"
#include "dcg/metric_json.hpp"

namespace dcg {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr const char* kReportSchema = "dcg.report/1";
inline constexpr const char* kDisclaimer = "finite-scale demonstration; asymptotic claim out of scope";

/// A space built from a descriptor: `<group>@<N>` (the ball B(e,N) of a group
/// descriptor such as `z^2@20` or `wreath(cyclic:2,z^1)@6`), `path:<n>`, or
/// `file:<path>` (a dcg.space/1 document).
struct SpaceHandle {
  std::string descriptor;
  SpacePtr space;
  /// Set for group balls.
  std::shared_ptr<const BallSpec> ball;
};

/// ConfigError naming the descriptor when it does not parse.
SpaceHandle parse_space(const std::string& descriptor, bool use_cache = false);

/// Comma list of integers with `a..b` ranges: "1..5", "2,4,8", "1..3,10".
std::vector<std::int64_t> parse_int_list(const std::string& text);

/// Everything a run depends on. Output paths are kept out of the checksum so
/// that the same experiment written to two places reports the same identity.
struct ExperimentConfig {
  std::string experiment;
  std::vector<std::string> spaces;
  std::vector<std::int64_t> ball_radii;
  std::vector<Dist> radii;
  std::vector<Dist> stab_radii;
  std::string mesh_rule = "3R";
  std::string stab_mesh_rule = "8R";
  std::string strategy = "greedy";
  std::vector<std::int64_t> scales;
  std::size_t stages = 2;
  std::size_t exact_limit = 12;
  std::int64_t map_scale = 1;
  std::string bound;
  std::uint64_t seed = 1;
  bool use_cache = false;
  bool timing = false;
  std::string csv_path;
  std::string json_path;

  /// Canonical JSON without output paths (keys sorted).
  Json to_json() const;
  static ExperimentConfig from_json(const Json& j);
  /// FNV-1a 64 of the canonical JSON, as 16 hex digits.
  std::string checksum() const;
};

/// Report envelope: schema, experiment, config and checksum, library version,
/// generating sets (space provenance), disclaimer, then `body`.
Json make_report(const ExperimentConfig& config, const std::vector<std::string>& generating_sets,
                 Json body);

/// Sphere sizes and generating set of one ball.
Json run_ball(const ExperimentConfig& config);
/// One decomposition of spaces[0] at radii[0]; witness and verification.
Json run_decompose(const ExperimentConfig& config);

struct ProfileOutput {
  ProfileTable table;
  Json report;
  /// True when the CSV came from the cache.
  bool cached = false;
};
/// Dimension profile of spaces[0] (a group descriptor, evaluated at every
/// ball radius). Cached as CSV under the config checksum when use_cache is on.
ProfileOutput run_profile(const ExperimentConfig& config);

/// Pulls a chain on spaces[1] back along x -> map_scale * x (by lattice
/// coordinates) from spaces[0].
Json run_pullback(const ExperimentConfig& config);
/// Product of chains on spaces[0] and spaces[1] at the same radii.
Json run_product(const ExperimentConfig& config);
/// Fiber chain of `lamps wr base` (spaces[0]) over its walker action on the
/// base ball (spaces[1]).
Json run_fiber(const ExperimentConfig& config);
/// Witness families on spaces[0] at every scale n, with verification.
Json run_witness(const ExperimentConfig& config);

/// Defaults of the product demonstration: Z wr F_2 at N = 2, Grigorchuk at
/// N = 3, witness scales 1..3.
ExperimentConfig demo_thm51_defaults();
/// Chain on the first ball, one-stage chain on the second, their product,
/// product-width check, then witnesses at every scale. ResourceError with a
/// hint to shrink N when a ball or search is too large.
Json run_demo_thm51(const ExperimentConfig& config);

}  // namespace dcg
