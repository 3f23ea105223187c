#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dcg/group.hpp"
#include "dcg/metric_space.hpp"

namespace dcg {

/// Word-length table of B(e, depth) produced by breadth-first search. Element
/// order is BFS level, then canonical key within a level, so the table is
/// reproducible byte for byte.
struct BallTable {
  GroupPtr group;
  std::int64_t depth = 0;
  std::vector<Key> elements;
  std::vector<std::int64_t> lengths;
  /// Shortest word (generator labels) that first reached each element.
  std::vector<std::string> words;
  std::vector<std::size_t> sphere_sizes;
  std::unordered_map<Key, std::uint32_t, KeyHash> index;

  std::size_t ball_size(std::int64_t r) const;
  std::optional<std::int64_t> length_of(const Key& k) const;
};

struct BallOptions {
  std::size_t element_budget = 2'000'000;
  /// Run the faithfulness check against GroupModel::refined() when available.
  bool stabilization_check = true;
  /// Use the on-disk cache (directory from DCG_CACHE_DIR).
  bool use_cache = false;
};

/// BFS to `depth`. Throws ResourceError when the budget is exceeded and
/// IntegrityError when the generating set is not symmetric or inverses fail.
BallTable enumerate_ball(const GroupPtr& group, std::int64_t depth,
                         const BallOptions& options = {});

/// A ball B(e,N) with its depth-2N length table. Distances inside the ball are
/// d(g,h) = |g^{-1}h|, exact because g^{-1}h lies in B(e,2N).
struct BallSpec {
  GroupPtr group;
  std::int64_t radius = 0;
  BallTable table;
  SpacePtr space;

  /// Index of element i of the space inside `table` (identical prefixes, so
  /// this is the identity map; kept explicit for readability at call sites).
  const Key& element(PointId p) const { return table.elements[p]; }
  std::int64_t distance_of(const Key& a, const Key& b) const;
};

BallSpec make_ball(const GroupPtr& group, std::int64_t radius, const BallOptions& options = {});

/// Convenience: the metric space on B(e,N).
SpacePtr ball(const GroupPtr& group, std::int64_t radius, const BallOptions& options = {});

/// Cache directory: $DCG_CACHE_DIR, else $XDG_CACHE_HOME/dcgrowth, else
/// $HOME/.cache/dcgrowth, else ./.dcg-cache.
std::filesystem::path cache_directory();

/// Stores/loads length tables keyed by (group name, depth). Loading
/// re-verifies the sphere-size table against the stored lengths.
void store_ball_table(const BallTable& table);
std::optional<BallTable> load_ball_table(const GroupPtr& group, std::int64_t depth);
std::vector<std::filesystem::path> list_cache();
std::size_t clear_cache();

}  // namespace dcg
