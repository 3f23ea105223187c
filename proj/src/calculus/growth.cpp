#include "dcg/growth.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "dcg/errors.hpp"

namespace dcg {

struct GrowthFunction::Node {
  Kind kind = Kind::constant;
  Rational value;        // constant value or polynomial coefficient
  int degree = 0;
  Rational base;         // exponential base
  std::map<std::int64_t, std::int64_t> samples;
  Rational l, c;         // affine substitution
  std::shared_ptr<const Node> left, right;
};

namespace {

using Node = GrowthFunction::Node;
constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

std::shared_ptr<Node> fresh(GrowthFunction::Kind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}

long double to_ld(const Rational& q) { return static_cast<long double>(q.get_d()); }

std::optional<Rational> exact_of(const Node& n, const Rational& x);

// exponent must be a small nonnegative integer for an exact power
std::optional<Rational> exact_pow(const Rational& base, const Rational& e) {
  if (e.get_den() != 1 || e < 0 || e > 4096) return std::nullopt;
  const unsigned long k = e.get_num().get_ui();
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), k);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), k);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::int64_t table_lookup(const Node& n, const Rational& x) {
  const std::int64_t key = ceil_int(x);
  auto it = n.samples.lower_bound(key);
  if (it == n.samples.end())
    throw DomainError("tabulated growth function has no sample at or beyond " + std::to_string(key));
  return it->second;
}

std::optional<Rational> exact_of(const Node& n, const Rational& x) {
  using K = GrowthFunction::Kind;
  switch (n.kind) {
    case K::constant: return n.value;
    case K::polynomial: {
      auto p = exact_pow(x < 0 ? Rational(0) : x, n.degree);
      if (!p) {
        // rational argument with a non-integer power never happens: degree is an integer
        Rational acc = 1;
        for (int i = 0; i < n.degree; ++i) acc *= x;
        return n.value * acc;
      }
      return n.value * *p;
    }
    case K::exponential: {
      auto p = exact_pow(n.base, x);
      if (!p) return std::nullopt;
      return *p;
    }
    case K::tabulated: return Rational(static_cast<long>(table_lookup(n, x)));
    case K::affine: return exact_of(*n.left, n.l * x + n.c);
    case K::product: {
      auto a = exact_of(*n.left, x);
      auto b = exact_of(*n.right, x);
      if (!a || !b) return std::nullopt;
      return *a * *b;
    }
  }
  return std::nullopt;
}

long double approx_of(const Node& n, long double x) {
  using K = GrowthFunction::Kind;
  switch (n.kind) {
    case K::constant: return to_ld(n.value);
    case K::polynomial: return to_ld(n.value) * std::pow(std::max(x, 0.0L), n.degree);
    case K::exponential: return std::pow(to_ld(n.base), x);
    case K::tabulated:
      return static_cast<long double>(table_lookup(n, from_double(static_cast<double>(x))));
    case K::affine: return approx_of(*n.left, to_ld(n.l) * x + to_ld(n.c));
    case K::product: return approx_of(*n.left, x) * approx_of(*n.right, x);
  }
  return 0;
}

long double approx_at(const Node& n, const Rational& x) {
  using K = GrowthFunction::Kind;
  if (n.kind == K::affine) return approx_at(*n.left, n.l * x + n.c);
  if (n.kind == K::product) return approx_at(*n.left, x) * approx_at(*n.right, x);
  if (n.kind == K::tabulated) return static_cast<long double>(table_lookup(n, x));
  return approx_of(n, to_ld(x));
}

GrowthClass class_of_table(const Node& n) {
  // Heuristic: compare the top half of the sampled range. Doubling ratio near 1
  // reads as bounded; a constant log-ratio per unit step reads as exponential.
  GrowthClass g;
  g.family = GrowthClass::Family::tabulated;
  if (n.samples.size() < 2) return g;
  const auto hi = *n.samples.rbegin();
  auto mid_it = n.samples.lower_bound(hi.first / 2);
  const auto mid = *mid_it;
  if (mid.first == hi.first || mid.second <= 0 || hi.second <= 0) return g;
  const double ratio = static_cast<double>(hi.second) / static_cast<double>(mid.second);
  const double span = static_cast<double>(hi.first - mid.first);
  const double scale = static_cast<double>(hi.first) / std::max<double>(mid.first, 1.0);
  const double poly_exp = std::log(ratio) / std::log(std::max(scale, 1.0 + 1e-9));
  g.degree = static_cast<int>(std::lround(poly_exp));
  g.log_base = std::log(ratio) / span;
  return g;
}

enum class Guess { bounded, polynomial, exponential };

Guess guess_table(const GrowthClass& g) {
  if (g.degree <= 0 && g.log_base < 1e-3) return Guess::bounded;
  if (g.degree > 8) return Guess::exponential;
  return Guess::polynomial;
}

std::string fmt(const Rational& q) { return q.get_str(); }

}  // namespace

GrowthFunction GrowthFunction::constant(const Rational& c) {
  if (c < 0) throw DomainError("growth constant must be nonnegative");
  auto n = fresh(Kind::constant);
  n->value = c;
  return GrowthFunction(n);
}

GrowthFunction GrowthFunction::polynomial(int degree, const Rational& coefficient) {
  if (degree < 0) throw DomainError("polynomial degree must be nonnegative");
  if (coefficient <= 0) throw DomainError("polynomial coefficient must be positive");
  auto n = fresh(Kind::polynomial);
  n->degree = degree;
  n->value = coefficient;
  return GrowthFunction(n);
}

GrowthFunction GrowthFunction::exponential(const Rational& base) {
  if (base <= 1) throw DomainError("exponential base must exceed 1");
  auto n = fresh(Kind::exponential);
  n->base = base;
  return GrowthFunction(n);
}

GrowthFunction GrowthFunction::tabulated(std::map<std::int64_t, std::int64_t> samples) {
  if (samples.empty()) throw DomainError("tabulated growth function needs samples");
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for (const auto& [x, v] : samples) {
    if (x < 0 || v < 0) throw DomainError("tabulated samples must be nonnegative");
    if (v < prev) throw DomainError("tabulated growth function is not nondecreasing");
    prev = v;
  }
  auto n = fresh(Kind::tabulated);
  n->samples = std::move(samples);
  return GrowthFunction(n);
}

GrowthFunction GrowthFunction::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("growth function needs a kind prefix: '" + text + "'");
  const std::string kind = text.substr(0, colon), arg = text.substr(colon + 1);
  try {
    if (kind == "const") return constant(parse_rational(arg));
    if (kind == "exp") return exponential(parse_rational(arg));
    if (kind == "poly") {
      const auto star = arg.find('*');
      const int degree = std::stoi(arg.substr(0, star));
      return polynomial(degree, star == std::string::npos ? Rational(1) : parse_rational(arg.substr(star + 1)));
    }
    if (kind == "table") {
      std::map<std::int64_t, std::int64_t> samples;
      std::stringstream ss(arg);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("table entry needs x=v: '" + item + "'");
        samples[std::stoll(item.substr(0, eq))] = std::stoll(item.substr(eq + 1));
      }
      return tabulated(std::move(samples));
    }
  } catch (const std::logic_error&) {
    throw ConfigError("malformed growth function '" + text + "'");
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown growth function kind '" + kind + "'");
}

GrowthFunction::Kind GrowthFunction::kind() const { return node_->kind; }

std::optional<Rational> GrowthFunction::exact(const Rational& x) const { return exact_of(*node_, x); }

long double GrowthFunction::approx(long double x) const { return approx_of(*node_, x); }

std::int64_t GrowthFunction::at(const Rational& x) const {
  if (auto e = exact(x)) {
    if (*e >= Rational(static_cast<double>(kMax))) return kMax;
    return ceil_int(*e);
  }
  const long double v = approx_at(*node_, x);
  if (!(v < static_cast<long double>(kMax))) return kMax;
  return static_cast<std::int64_t>(std::ceil(v));
}

GrowthClass GrowthFunction::growth_class() const {
  using F = GrowthClass::Family;
  const Node& n = *node_;
  GrowthClass g;
  switch (n.kind) {
    case Kind::constant: g.family = F::constant; return g;
    case Kind::polynomial:
      g.family = n.degree == 0 ? F::constant : F::polynomial;
      g.degree = n.degree;
      return g;
    case Kind::exponential:
      g.family = F::exponential;
      g.log_base = std::log(n.base.get_d());
      return g;
    case Kind::tabulated: return class_of_table(n);
    case Kind::affine: {
      g = GrowthFunction(n.left).growth_class();
      if (g.family == F::exponential) g.log_base *= n.l.get_d();
      return g;
    }
    case Kind::product: {
      const auto a = GrowthFunction(n.left).growth_class();
      const auto b = GrowthFunction(n.right).growth_class();
      if (a.family == F::tabulated || b.family == F::tabulated) {
        g.family = F::tabulated;
        return g;
      }
      g.family = std::max(a.family, b.family);
      g.degree = a.degree + b.degree;
      g.log_base = a.log_base + b.log_base;
      if (g.family == F::exponential) g.degree = 0;
      return g;
    }
  }
  return g;
}

std::string GrowthClass::describe() const {
  std::ostringstream os;
  switch (family) {
    case Family::constant: os << "bounded"; break;
    case Family::polynomial: os << "polynomial degree " << degree; break;
    case Family::exponential: os << "exponential rate " << log_base; break;
    case Family::tabulated: os << "tabulated"; break;
  }
  return os.str();
}

std::string GrowthFunction::describe() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::constant: return "const:" + fmt(n.value);
    case Kind::polynomial:
      return "poly:" + std::to_string(n.degree) + (n.value == 1 ? "" : "*" + fmt(n.value));
    case Kind::exponential: return "exp:" + fmt(n.base);
    case Kind::tabulated: {
      std::string s = "table:";
      bool first = true;
      for (const auto& [x, v] : n.samples) {
        s += (first ? "" : ",") + std::to_string(x) + "=" + std::to_string(v);
        first = false;
      }
      return s;
    }
    case Kind::affine:
      return GrowthFunction(n.left).describe() + "(" + fmt(n.l) + "x+" + fmt(n.c) + ")";
    case Kind::product:
      return "(" + GrowthFunction(n.left).describe() + ")*(" + GrowthFunction(n.right).describe() + ")";
  }
  return {};
}

GrowthFunction compose_affine(const GrowthFunction& s, const Rational& l, const Rational& c) {
  if (l <= 0 || c < 0) throw DomainError("affine substitution needs L > 0 and C >= 0");
  auto n = fresh(GrowthFunction::Kind::affine);
  n->left = s.node_;
  n->l = l;
  n->c = c;
  return GrowthFunction(n);
}

GrowthFunction product_growth(const GrowthFunction& s, const GrowthFunction& t) {
  auto n = fresh(GrowthFunction::Kind::product);
  n->left = s.node_;
  n->right = t.node_;
  return GrowthFunction(n);
}

namespace {

struct Reading {
  Guess guess;
  int degree;
  bool heuristic;
};

Reading read(const GrowthFunction& s) {
  using F = GrowthClass::Family;
  const auto g = s.growth_class();
  switch (g.family) {
    case F::constant: return {Guess::bounded, 0, false};
    case F::polynomial: return {Guess::polynomial, g.degree, false};
    case F::exponential: return {Guess::exponential, 0, false};
    case F::tabulated: return {guess_table(g), g.degree, true};
  }
  return {Guess::bounded, 0, true};
}

const char* name(Guess g) {
  switch (g) {
    case Guess::bounded: return "bounded";
    case Guess::polynomial: return "polynomial";
    case Guess::exponential: return "exponential";
  }
  return "?";
}

}  // namespace

Decision growth_equivalent(const GrowthFunction& s, const GrowthFunction& t) {
  const auto a = read(s), b = read(t);
  Decision d;
  d.heuristic = a.heuristic || b.heuristic;
  if (a.guess != b.guess) {
    d.value = false;
    d.reason = std::string(name(a.guess)) + " vs " + name(b.guess);
  } else if (a.guess == Guess::polynomial && a.degree != b.degree) {
    d.value = false;
    d.reason = "polynomial degrees " + std::to_string(a.degree) + " and " + std::to_string(b.degree);
  } else {
    d.value = true;
    d.reason = std::string("both ") + name(a.guess) +
               (a.guess == Guess::polynomial ? " of degree " + std::to_string(a.degree) : "");
  }
  if (d.heuristic) d.reason += " (tabulated data, class guessed from samples)";
  return d;
}

Decision is_subexponential(const GrowthFunction& s) {
  const auto a = read(s);
  Decision d;
  d.heuristic = a.heuristic;
  d.value = a.guess != Guess::exponential;
  d.reason = name(a.guess);
  if (d.heuristic) d.reason += " (tabulated data, class guessed from samples)";
  return d;
}

}  // namespace dcg
