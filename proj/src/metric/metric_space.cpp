#include "dcg/metric_space.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "dcg/errors.hpp"

namespace dcg {

Dist floor_radius(double r) {
  if (!std::isfinite(r) || r < 0) {
    throw DomainError("radius must be a finite nonnegative number");
  }
  return static_cast<Dist>(std::floor(r));
}

MatrixOracle::MatrixOracle(std::size_t n, std::vector<std::int32_t> flat)
    : n_(n), data_(std::move(flat)) {
  if (data_.size() != n_ * n_) {
    throw StructuralError("distance matrix has " + std::to_string(data_.size()) +
                          " entries, expected " + std::to_string(n_ * n_));
  }
}

FiniteMetricSpace::FiniteMetricSpace(std::string name, std::vector<std::string> labels,
                                     std::shared_ptr<const DistanceOracle> oracle)
    : name_(std::move(name)), labels_(std::move(labels)), oracle_(std::move(oracle)) {
  if (!oracle_ || oracle_->size() != labels_.size()) {
    throw StructuralError("space '" + name_ + "': oracle size does not match labels");
  }
  matrix_ = oracle_->matrix();
}

std::shared_ptr<const FiniteMetricSpace> FiniteMetricSpace::from_matrix(
    std::string name, std::vector<std::string> labels,
    const std::vector<std::vector<Dist>>& rows) {
  const std::size_t n = rows.size();
  if (labels.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  if (labels.size() != n) throw StructuralError("label count does not match matrix size");
  std::vector<std::int32_t> flat(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw StructuralError("distance matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      const Dist d = rows[i][j];
      if (d < 0 || d > INT32_MAX) throw StructuralError("distance out of range");
      if ((i == j) != (d == 0)) {
        throw StructuralError("d(p,q) = 0 must hold exactly when p = q (row " +
                              std::to_string(i) + ")");
      }
      flat[i * n + j] = static_cast<std::int32_t>(d);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (flat[i * n + j] != flat[j * n + i]) {
        throw StructuralError("distance matrix is not symmetric at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
      }
  auto oracle = std::make_shared<MatrixOracle>(n, std::move(flat));
  return std::make_shared<FiniteMetricSpace>(std::move(name), std::move(labels),
                                             std::move(oracle));
}

std::shared_ptr<const FiniteMetricSpace> FiniteMetricSpace::path(std::size_t n) {
  std::vector<std::int32_t> flat(n * n);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = std::to_string(i);
    for (std::size_t j = 0; j < n; ++j)
      flat[i * n + j] = static_cast<std::int32_t>(i > j ? i - j : j - i);
  }
  auto space = std::make_shared<FiniteMetricSpace>(
      "path:" + std::to_string(n), std::move(labels),
      std::make_shared<MatrixOracle>(n, std::move(flat)));
  std::vector<std::vector<std::int64_t>> coords(n);
  for (std::size_t i = 0; i < n; ++i) coords[i] = {static_cast<std::int64_t>(i)};
  space->set_coordinates(std::move(coords));
  space->set_provenance("path graph metric");
  return space;
}

Dist FiniteMetricSpace::diameter() const {
  if (!diameter_) {
    Dist best = 0;
    for (PointId a = 0; a < size(); ++a)
      for (PointId b = a + 1; b < size(); ++b) best = std::max(best, dist(a, b));
    diameter_ = best;
  }
  return *diameter_;
}

void FiniteMetricSpace::set_coordinates(std::vector<std::vector<std::int64_t>> coords) {
  if (coords.size() != size()) throw StructuralError("coordinate count does not match space");
  coordinates_ = std::move(coords);
}

std::vector<std::int32_t> materialize(const FiniteMetricSpace& space) {
  const std::size_t n = space.size();
  std::vector<std::int32_t> flat(n * n);
  for (PointId a = 0; a < n; ++a)
    for (PointId b = 0; b < n; ++b) flat[a * n + b] = static_cast<std::int32_t>(space.dist(a, b));
  return flat;
}

std::optional<std::string> check_metric_axioms(const FiniteMetricSpace& space,
                                               std::size_t samples, std::uint64_t seed) {
  const std::size_t n = space.size();
  if (n == 0) return std::nullopt;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<PointId> pick(0, static_cast<PointId>(n - 1));
  for (std::size_t s = 0; s < samples; ++s) {
    const PointId p = pick(rng), q = pick(rng), r = pick(rng);
    std::ostringstream at;
    at << " at (" << space.label(p) << ", " << space.label(q) << ", " << space.label(r) << ")";
    if (space.dist(p, p) != 0) return "nonzero self-distance" + at.str();
    if (p != q && space.dist(p, q) == 0) return "zero distance between distinct points" + at.str();
    if (space.dist(p, q) != space.dist(q, p)) return "asymmetric distance" + at.str();
    if (space.dist(p, q) > space.dist(p, r) + space.dist(r, q))
      return "triangle inequality fails" + at.str();
  }
  return std::nullopt;
}

}  // namespace dcg
