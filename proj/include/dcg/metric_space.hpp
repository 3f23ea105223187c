#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dcg {

using Dist = std::int64_t;
using PointId = std::uint32_t;

/// Real-valued radii are accepted at API boundaries and floored.
Dist floor_radius(double r);

/// Integer distance oracle over points 0..size()-1.
class DistanceOracle {
 public:
  virtual ~DistanceOracle() = default;
  virtual std::size_t size() const = 0;
  virtual Dist distance(PointId a, PointId b) const = 0;
  /// Row-major matrix when the oracle is backed by one; enables the inline
  /// fast path in FiniteMetricSpace::dist.
  virtual const std::int32_t* matrix() const { return nullptr; }
};

/// Dense symmetric matrix of distances.
class MatrixOracle final : public DistanceOracle {
 public:
  MatrixOracle(std::size_t n, std::vector<std::int32_t> flat);
  std::size_t size() const override { return n_; }
  Dist distance(PointId a, PointId b) const override {
    return data_[static_cast<std::size_t>(a) * n_ + b];
  }
  const std::int32_t* matrix() const override { return data_.data(); }

 private:
  std::size_t n_;
  std::vector<std::int32_t> data_;
};

/// A finite set of points with an integer metric. Immutable once built; shared
/// through SpacePtr by every subset, family and decomposition over it.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace(std::string name, std::vector<std::string> labels,
                    std::shared_ptr<const DistanceOracle> oracle);

  /// Validates the matrix: zero diagonal, symmetry, positivity off the diagonal.
  static std::shared_ptr<const FiniteMetricSpace> from_matrix(
      std::string name, std::vector<std::string> labels,
      const std::vector<std::vector<Dist>>& rows);

  /// Path graph on points 0..n-1 with d(i,j) = |i-j|.
  static std::shared_ptr<const FiniteMetricSpace> path(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  const std::string& name() const { return name_; }
  const std::string& label(PointId p) const { return labels_[p]; }
  const std::vector<std::string>& labels() const { return labels_; }

  Dist dist(PointId a, PointId b) const {
    return matrix_ != nullptr ? matrix_[static_cast<std::size_t>(a) * size() + b]
                              : oracle_->distance(a, b);
  }

  Dist diameter() const;

  /// Lattice coordinates for spaces that are balls in Z^d with the standard
  /// generators; the grid strategy relies on them.
  const std::optional<std::vector<std::vector<std::int64_t>>>& coordinates() const {
    return coordinates_;
  }
  void set_coordinates(std::vector<std::vector<std::int64_t>> coords);

  /// Free-form description of how the metric was produced (generating set...).
  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string text) { provenance_ = std::move(text); }

  const DistanceOracle& oracle() const { return *oracle_; }

 private:
  std::string name_;
  std::vector<std::string> labels_;
  std::shared_ptr<const DistanceOracle> oracle_;
  const std::int32_t* matrix_ = nullptr;
  std::optional<std::vector<std::vector<std::int64_t>>> coordinates_;
  std::string provenance_;
  mutable std::optional<Dist> diameter_;
};

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

/// Computes the full matrix of an arbitrary oracle (for serialization).
std::vector<std::int32_t> materialize(const FiniteMetricSpace& space);

/// Samples `samples` random triples (deterministic seed) and reports the first
/// violation of symmetry, identity or the triangle inequality, if any.
std::optional<std::string> check_metric_axioms(const FiniteMetricSpace& space,
                                               std::size_t samples,
                                               std::uint64_t seed);

}  // namespace dcg
