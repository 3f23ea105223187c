#include "dcg/qi.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "dcg/errors.hpp"

namespace dcg {

namespace {

bool distortion_ok(const QIEmbedding& f, PointId x, PointId y, std::string& why) {
  if (x == y) return true;
  const Rational dx(static_cast<long>(f.source->dist(x, y)));
  const Rational dy(static_cast<long>(f.target->dist(f.map[x], f.map[y])));
  const Rational lo = f.l * dx - f.c, hi = f.l * dx + f.c;
  const bool strict = f.c > 0;
  const bool ok = strict ? (lo < dy && dy < hi) : (lo <= dy && dy <= hi);
  if (!ok) {
    std::ostringstream os;
    os << "distortion violated at (" << f.source->label(x) << ", " << f.source->label(y)
       << "): d = " << dx.get_str() << ", d(f) = " << dy.get_str() << ", L = " << f.l.get_str()
       << ", C = " << f.c.get_str();
    why = os.str();
  }
  return ok;
}

}  // namespace

QIEmbedding make_qi_embedding(SpacePtr source, SpacePtr target, std::vector<PointId> map,
                              Rational l, Rational c, std::size_t samples, std::uint64_t seed) {
  if (!source || !target) throw StructuralError("embedding needs both spaces");
  if (l <= 0) throw DomainError("embedding needs L > 0");
  if (c < 0) throw DomainError("embedding needs C >= 0");
  if (map.size() != source->size()) throw StructuralError("embedding map has the wrong length");
  for (PointId y : map)
    if (y >= target->size()) throw StructuralError("embedding maps outside the target");
  QIEmbedding f{std::move(source), std::move(target), std::move(map), std::move(l), std::move(c)};
  const std::size_t n = f.source->size();
  std::string why;
  if (n * n <= 250000) {
    for (PointId x = 0; x < n; ++x)
      for (PointId y = x + 1; y < n; ++y)
        if (!distortion_ok(f, x, y, why)) throw IntegrityError(why);
  } else {
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s)
      if (!distortion_ok(f, static_cast<PointId>(rng() % n), static_cast<PointId>(rng() % n), why))
        throw IntegrityError(why);
  }
  return f;
}

std::vector<PointId> preimage(const std::vector<PointId>& map, const SubsetRef& piece) {
  std::vector<PointId> out;
  for (PointId x = 0; x < map.size(); ++x)
    if (piece.contains(map[x])) out.push_back(x);
  return out;
}

Dist integer_radius(const Rational& q) { return std::max<Dist>(0, floor_int(q)); }

PullbackFamily pullback_family(const QIEmbedding& f, const MetricFamily& v, Dist r, Dist d) {
  for (const auto& p : v.pieces)
    if (p.space() != f.target) throw StructuralError("family does not live on the embedding target");
  if (!v.pieces.empty()) {
    if (!is_r_disjoint(v, r)) throw DomainError("family to pull back is not " + std::to_string(r) + "-disjoint");
    if (mesh(v) > d) throw DomainError("family to pull back has mesh above " + std::to_string(d));
  }
  PullbackFamily out;
  out.family.tag = v.tag;
  for (const auto& p : v.pieces) {
    auto members = preimage(f.map, p);
    if (members.empty()) {
      ++out.dropped;
      continue;
    }
    out.family.pieces.emplace_back(f.source, std::move(members));
  }
  out.certified_separation = (Rational(static_cast<long>(r)) - f.c) / f.l;
  out.certified_mesh = (Rational(static_cast<long>(d)) + f.c) / f.l;
  if (out.family.pieces.empty()) return out;
  out.actual_separation = min_separation(out.family);
  out.actual_mesh = mesh(out.family);
  if (out.actual_separation && Rational(static_cast<long>(*out.actual_separation)) <= out.certified_separation)
    throw IntegrityError("pulled-back pieces at distance " + std::to_string(*out.actual_separation) +
                         ", certified above " + out.certified_separation.get_str());
  if (Rational(static_cast<long>(out.actual_mesh)) > out.certified_mesh)
    throw IntegrityError("pulled-back mesh " + std::to_string(out.actual_mesh) +
                         " exceeds certified " + out.certified_mesh.get_str());
  return out;
}

PullbackDecomposition pullback_decomposition(const QIEmbedding& f, const Decomposition& d) {
  auto src = preimage(f.map, d.source);
  if (src.empty()) throw DomainError("decomposed piece has empty preimage");
  PullbackDecomposition out{Decomposition{SubsetRef(f.source, std::move(src)), 0, {}}, 0, 0};
  out.certified_radius = (Rational(static_cast<long>(d.radius)) - f.c) / f.l;
  out.formula_radius = integer_radius(out.certified_radius);
  Dist measured = std::numeric_limits<Dist>::max();
  for (const auto& sub : d.subfamilies) {
    const Dist m = sub.pieces.empty() ? 0 : mesh(sub);
    auto pulled = pullback_family(f, sub, d.radius, m);
    if (pulled.family.pieces.empty()) continue;
    if (pulled.actual_separation) measured = std::min(measured, *pulled.actual_separation - 1);
    out.decomposition.subfamilies.push_back(std::move(pulled.family));
  }
  out.decomposition.radius =
      measured == std::numeric_limits<Dist>::max() ? out.formula_radius : std::max(out.formula_radius, measured);
  return out;
}

PullbackChain pullback_chain(const QIEmbedding& f, const DecompositionChain& chain,
                             const GrowthFunction& s) {
  if (chain.space != f.target) throw DomainError("chain does not live on the embedding target");
  const auto in = verify_chain(chain, [&](Dist r) { return s(r); });
  if (!in.pass) throw DomainError("input chain does not verify against " + s.describe() + ": " + in.summary());

  PullbackChain out{DecompositionChain{f.source, {}}, compose_affine(s, f.l, f.c), {}, {}, {}};
  for (const auto& stage : chain.stages) {
    ChainStage pulled;
    const Rational q = (Rational(static_cast<long>(stage.radius)) - f.c) / f.l;
    pulled.radius = integer_radius(q);
    for (const auto& step : stage.steps) {
      if (preimage(f.map, step.source).empty()) continue;
      auto pd = pullback_decomposition(f, step);
      pd.decomposition.radius = std::max(pd.decomposition.radius, pulled.radius);
      pulled.width = std::max(pulled.width, pd.decomposition.width());
      pulled.steps.push_back(std::move(pd.decomposition));
    }
    out.certified_radii.push_back(q);
    out.stage_bounds.push_back(out.bound.at(q));
    out.chain.stages.push_back(std::move(pulled));
  }
  out.report = verify_chain(out.chain, out.stage_bounds);
  if (!out.report.pass) throw IntegrityError("pulled-back chain fails verification: " + out.report.summary());
  return out;
}

}  // namespace dcg
