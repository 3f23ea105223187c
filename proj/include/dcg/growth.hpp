#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "dcg/rational.hpp"

namespace dcg {

/// Coarse class of a growth function. Tabulated data has no closed form; any
/// decision that depends on its class is flagged heuristic.
struct GrowthClass {
  enum class Family { constant, polynomial, exponential, tabulated };
  Family family = Family::constant;
  int degree = 0;          // polynomial degree (0 for constants)
  double log_base = 0.0;   // natural log of the exponential base

  std::string describe() const;
};

/// A nondecreasing function s : [0, inf) -> [0, inf) evaluated with a ceiling.
/// Closed forms are const:c, poly:d (optionally with a coefficient) and exp:b;
/// tabulated samples, affine substitution s(Lx + C) and pointwise products
/// close the algebra.
class GrowthFunction {
 public:
  enum class Kind { constant, polynomial, exponential, tabulated, affine, product };

  static GrowthFunction constant(const Rational& c);
  static GrowthFunction polynomial(int degree, const Rational& coefficient = 1);
  static GrowthFunction exponential(const Rational& base);
  /// Samples must be nondecreasing in both coordinates. Between samples the
  /// value at the next sample point is used; beyond the last one is an error.
  static GrowthFunction tabulated(std::map<std::int64_t, std::int64_t> samples);

  /// `const:c`, `poly:d`, `poly:d*c`, `exp:b`, `table:x=v,x=v,...`.
  static GrowthFunction parse(const std::string& text);

  Kind kind() const;
  GrowthClass growth_class() const;
  std::string describe() const;

  /// ceil(s(x)), saturating at INT64_MAX.
  std::int64_t operator()(std::int64_t x) const { return at(Rational(static_cast<long>(x))); }
  std::int64_t at(const Rational& x) const;
  /// Exact value when the closed form allows it.
  std::optional<Rational> exact(const Rational& x) const;
  long double approx(long double x) const;

  struct Node;

 private:
  explicit GrowthFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend GrowthFunction compose_affine(const GrowthFunction&, const Rational&, const Rational&);
  friend GrowthFunction product_growth(const GrowthFunction&, const GrowthFunction&);
};

/// x -> s(Lx + C).
GrowthFunction compose_affine(const GrowthFunction& s, const Rational& l, const Rational& c);
/// x -> s(x) * t(x).
GrowthFunction product_growth(const GrowthFunction& s, const GrowthFunction& t);

/// A decision that is exact on closed forms and heuristic on tabulated data.
struct Decision {
  bool value = false;
  bool heuristic = false;
  std::string reason;
};

/// s ~ t iff s(ax) >= t(x) - c and t(ax) >= s(x) - c for some a, c. Decided by
/// class: constants with constants, polynomials of equal degree, any two
/// exponentials; polynomial and exponential never.
Decision growth_equivalent(const GrowthFunction& s, const GrowthFunction& t);
/// x-th root of s(x) tends to 1: constants and polynomials yes, exponentials no.
Decision is_subexponential(const GrowthFunction& s);

}  // namespace dcg
