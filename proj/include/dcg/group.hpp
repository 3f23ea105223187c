#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dcg {

/// Canonical form of a group element. Two elements are equal exactly when
/// their keys are equal, so keys double as hash-map keys and as the total
/// order used for every tie-break.
using Key = std::vector<std::int64_t>;

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : k) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

struct Generator {
  std::string label;
  Key key;
};

/// A finitely generated group given by element arithmetic on canonical keys
/// together with a finite symmetric generating set.
class GroupModel {
 public:
  virtual ~GroupModel() = default;

  /// Descriptor that reconstructs the model (`z^2`, `wreath(z^1,free:2)`, ...).
  virtual std::string name() const = 0;
  virtual Key identity() const = 0;
  virtual Key multiply(const Key& a, const Key& b) const = 0;
  virtual Key invert(const Key& a) const = 0;
  virtual const std::vector<Generator>& generators() const = 0;

  /// Human-readable element, used for point labels.
  virtual std::string format(const Key& k) const;
  /// Description of the generating set, recorded in every report.
  virtual std::string generating_set() const;
  /// Coordinates for Z^d-like groups with the standard generators.
  virtual std::optional<std::vector<std::int64_t>> lattice_coordinates(const Key&) const {
    return std::nullopt;
  }
  /// A finer model of the same group for faithfulness checks (Grigorchuk at a
  /// greater tree depth); nullptr when keys are already exact normal forms.
  virtual std::shared_ptr<const GroupModel> refined() const { return nullptr; }
};

using GroupPtr = std::shared_ptr<const GroupModel>;

GroupPtr free_abelian(int rank);
GroupPtr free_group(int rank);
GroupPtr cyclic(std::int64_t order);
GroupPtr direct_product(GroupPtr g, GroupPtr h);
GroupPtr wreath(GroupPtr lamps, GroupPtr base);

/// Grigorchuk's group acting on the binary tree truncated at `depth` levels.
GroupPtr grigorchuk(int depth = 12);
/// max(12, ceil(log2(4N)) + 6).
int default_grigorchuk_depth(std::int64_t radius);

/// Parses `z^d`, `free:k`, `cyclic:m`, `grigorchuk`, `grigorchuk:k`,
/// `product(A,B)` and `wreath(A,B)`. `radius` selects the default Grigorchuk
/// depth. Throws ConfigError naming the offending text.
GroupPtr parse_group(const std::string& descriptor, std::int64_t radius = 0);

/// Lamplighter-style access to wreath products: the base (walker) coordinate
/// of an element of `lamps wr base`, and the lamp configuration as
/// (position, value) pairs.
struct WreathParts {
  Key base;
  std::vector<std::pair<Key, Key>> lamps;
};
WreathParts wreath_parts(const Key& element);

}  // namespace dcg
