#include <algorithm>
#include <cmath>
#include <sstream>

#include "dcg/errors.hpp"
#include "dcg/property_a.hpp"

namespace dcg {

namespace {

std::size_t position(const SubsetRef& region, PointId p) {
  const auto& m = region.members();
  auto it = std::lower_bound(m.begin(), m.end(), p);
  if (it == m.end() || *it != p) return m.size();
  return static_cast<std::size_t>(it - m.begin());
}

// Parameter used when a member contains the whole region: beyond every finite
// depth, so f_x is the same vector for all x.
constexpr std::int64_t kWholeLambda = std::int64_t{1} << 30;

}  // namespace

CoverDepths cover_depths(const Cover& cover) {
  const auto& region = cover.region;
  const auto& sp = *region.space();
  const std::size_t n = region.size();
  CoverDepths out;
  out.per_point.resize(n);
  std::vector<char> inside(n);
  for (std::size_t k = 0; k < cover.members.size(); ++k) {
    const auto& m = cover.members[k];
    if (m.space() != region.space()) throw StructuralError("cover member lives on another space");
    std::fill(inside.begin(), inside.end(), 0);
    for (PointId p : m.members()) {
      const auto pos = position(region, p);
      if (pos == n) throw StructuralError("cover member leaves the region at " + sp.label(p));
      inside[pos] = 1;
    }
    std::vector<PointId> outside;
    for (std::size_t i = 0; i < n; ++i)
      if (!inside[i]) outside.push_back(region.members()[i]);
    for (PointId p : m.members()) {
      std::int64_t depth = CoverDepths::kUnbounded;
      if (!outside.empty()) {
        Dist nearest = std::numeric_limits<Dist>::max();
        for (PointId q : outside) nearest = std::min(nearest, sp.dist(p, q));
        depth = nearest - 1;
      }
      out.per_point[position(region, p)].emplace_back(k, depth);
    }
  }
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < n; ++i)
    if (out.per_point[i].empty()) missing.push_back(sp.label(region.members()[i]));
  if (!missing.empty()) {
    std::ostringstream os;
    os << "not a cover; uncovered:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) os << ' ' << missing[i];
    if (missing.size() > 20) os << " ... (" << missing.size() << " total)";
    throw StructuralError(os.str());
  }
  return out;
}

namespace {

std::int64_t lebesgue_from(const CoverDepths& d) {
  std::int64_t best = CoverDepths::kUnbounded;
  for (const auto& row : d.per_point) {
    std::int64_t here = -1;
    for (const auto& [k, depth] : row) here = std::max(here, depth);
    best = std::min(best, here);
  }
  return best;
}

}  // namespace

Dist lebesgue_number(const Cover& cover) {
  const auto l = lebesgue_from(cover_depths(cover));
  return l == CoverDepths::kUnbounded ? cover.region.diameter() : l;
}

std::size_t multiplicity(const Cover& cover) {
  if (cover.members.empty()) throw DomainError("multiplicity of an empty cover");
  std::vector<std::size_t> count(cover.region.space()->size(), 0);
  std::size_t best = 0;
  for (const auto& m : cover.members)
    for (PointId p : m.members()) best = std::max(best, ++count[p]);
  return best;
}

std::int64_t lambda_eff(const Cover& cover) {
  const auto leb = lebesgue_from(cover_depths(cover));
  if (leb == CoverDepths::kUnbounded) return kWholeLambda;
  std::int64_t l = 0;
  while (2 * (l + 1) + l / 2 <= leb) ++l;  // floor(((l+1)-1)/2) = l/2
  return l;
}

std::vector<SparseL1Vector> ozawa_map(const Cover& cover, std::optional<std::int64_t> lambda) {
  const auto depths = cover_depths(cover);
  const std::int64_t l = lambda ? *lambda : lambda_eff(cover);
  if (l < 1) throw DomainError("Ozawa map needs a parameter >= 1 (Lebesgue number too small)");
  const auto& sp = *cover.region.space();
  std::vector<SparseL1Vector> out;
  out.reserve(depths.per_point.size());
  for (std::size_t i = 0; i < depths.per_point.size(); ++i) {
    // e_j = min(depth_j, 2l); member j lies in S_x(k) for k <= e_j.
    std::vector<std::pair<std::int64_t, std::size_t>> e;
    for (const auto& [k, depth] : depths.per_point[i]) e.emplace_back(std::min<std::int64_t>(depth, 2 * l), k);
    std::sort(e.begin(), e.end());
    if (e.back().first < 2 * l) {
      std::ostringstream os;
      os << "S_x(k) empty at x = " << sp.label(cover.region.members()[i]) << ", k = " << e.back().first + 1;
      throw DomainError(os.str());
    }
    std::vector<SparseL1Vector::Entry> entries;
    Rational cum = 0;
    std::int64_t start = l;
    for (std::size_t j = 0; j < e.size();) {
      std::size_t r = j;
      while (r < e.size() && e[r].first == e[j].first) ++r;
      const std::int64_t v = e[j].first;
      if (v > l) {
        const auto c = static_cast<long>(e.size() - j);  // members with e >= v
        cum += make_rational(v - start, l * c);
        start = v;
        for (std::size_t t = j; t < r; ++t) entries.emplace_back(e[t].second, cum);
      }
      j = r;
    }
    out.push_back(SparseL1Vector::from_entries(std::move(entries)));
  }
  return out;
}

long double ozawa_bound(std::size_t m, Dist d, std::int64_t lambda) {
  if (m <= 1 || d == 0) return 0;
  return 2.0L * (1.0L - std::pow(static_cast<long double>(m),
                                 -2.0L * static_cast<long double>(d) / static_cast<long double>(lambda)));
}

OzawaCheck check_ozawa_bound(const Cover& cover, const std::vector<SparseL1Vector>& f, std::int64_t lambda) {
  OzawaCheck out;
  const auto m = multiplicity(cover);
  const auto& pts = cover.region.members();
  const auto& sp = *cover.region.space();
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const Dist d = sp.dist(pts[a], pts[b]);
      if (2 * d + 1 > lambda) continue;
      ++out.pairs;
      const Rational lhs = l1_distance(f[a], f[b]);
      const long double rhs = ozawa_bound(m, d, lambda);
      out.worst_margin = std::max(out.worst_margin, lhs.get_d() - static_cast<double>(rhs));
      if (lhs > from_double(static_cast<double>(rhs) + kGuard)) {
        if (out.failures++ == 0) {
          std::ostringstream os;
          os << "pair (" << sp.label(pts[a]) << ", " << sp.label(pts[b]) << "), D = " << d << ": "
             << lhs.get_str() << " > " << static_cast<double>(rhs);
          out.first_failure = os.str();
        }
      }
    }
  return out;
}

}  // namespace dcg
