#include "dcg/product.hpp"

#include <algorithm>

#include "dcg/errors.hpp"

namespace dcg {

namespace {

class SumOracle final : public DistanceOracle {
 public:
  SumOracle(SpacePtr x, SpacePtr y) : x_(std::move(x)), y_(std::move(y)), ny_(y_->size()) {}
  std::size_t size() const override { return x_->size() * ny_; }
  Dist distance(PointId a, PointId b) const override {
    return x_->dist(static_cast<PointId>(a / ny_), static_cast<PointId>(b / ny_)) +
           y_->dist(static_cast<PointId>(a % ny_), static_cast<PointId>(b % ny_));
  }

 private:
  SpacePtr x_, y_;
  std::size_t ny_;
};

constexpr std::size_t kMaterializeLimit = 4096;

// Pieces of one step in stage-family order, grouped by subfamily, as indices
// into the stage family.
std::vector<std::vector<std::size_t>> step_indices(const Decomposition& step, std::size_t& offset) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& sub : step.subfamilies) {
    out.emplace_back();
    for (std::size_t k = 0; k < sub.pieces.size(); ++k) out.back().push_back(offset++);
  }
  return out;
}

SubsetRef cross(const SpacePtr& space, const SubsetRef& u, const SubsetRef& v, std::size_t ny) {
  std::vector<PointId> members;
  members.reserve(u.size() * v.size());
  for (PointId a : u.members())
    for (PointId b : v.members()) members.push_back(static_cast<PointId>(a * ny + b));
  return SubsetRef(space, std::move(members));
}

}  // namespace

SpacePtr product_space(const SpacePtr& x, const SpacePtr& y) {
  std::vector<std::string> labels;
  labels.reserve(x->size() * y->size());
  for (PointId a = 0; a < x->size(); ++a)
    for (PointId b = 0; b < y->size(); ++b) labels.push_back("(" + x->label(a) + "," + y->label(b) + ")");
  std::shared_ptr<const DistanceOracle> oracle = std::make_shared<SumOracle>(x, y);
  const std::size_t n = labels.size();
  if (n <= kMaterializeLimit) {
    std::vector<std::int32_t> flat(n * n);
    for (PointId a = 0; a < n; ++a)
      for (PointId b = 0; b < n; ++b) flat[a * n + b] = static_cast<std::int32_t>(oracle->distance(a, b));
    oracle = std::make_shared<MatrixOracle>(n, std::move(flat));
  }
  auto space = std::make_shared<FiniteMetricSpace>(x->name() + "x" + y->name(), std::move(labels), oracle);
  if (x->coordinates() && y->coordinates()) {
    std::vector<std::vector<std::int64_t>> coords;
    for (const auto& cx : *x->coordinates())
      for (const auto& cy : *y->coordinates()) {
        auto c = cx;
        c.insert(c.end(), cy.begin(), cy.end());
        coords.push_back(std::move(c));
      }
    space->set_coordinates(std::move(coords));
  }
  space->set_provenance("l1 product of [" + x->provenance() + "] and [" + y->provenance() + "]");
  return space;
}

DecompositionChain pad_chain(const DecompositionChain& chain, const std::vector<Dist>& radii) {
  const auto own = chain.radii();
  if (radii.size() < own.size() || !std::equal(own.begin(), own.end(), radii.begin()))
    throw StructuralError("padding radii do not extend the chain's radii");
  DecompositionChain out = chain;
  for (std::size_t i = own.size(); i < radii.size(); ++i) {
    ChainStage stage;
    stage.radius = radii[i];
    stage.width = 1;
    for (const auto& piece : out.terminal_family().pieces)
      stage.steps.push_back(trivial_decomposition(piece, radii[i]));
    out.stages.push_back(std::move(stage));
  }
  return out;
}

ProductChain product_chain(const DecompositionChain& cx, const DecompositionChain& cy,
                           const std::optional<GrowthFunction>& s,
                           const std::optional<GrowthFunction>& t, SpacePtr space) {
  const auto rx = cx.radii(), ry = cy.radii();
  const auto& longer = rx.size() >= ry.size() ? rx : ry;
  const auto& shorter = rx.size() >= ry.size() ? ry : rx;
  if (!std::equal(shorter.begin(), shorter.end(), longer.begin()))
    throw StructuralError("product chains need equal radii at every shared stage");
  const auto px = pad_chain(cx, longer), py = pad_chain(cy, longer);
  const std::size_t ny = cy.space->size();
  if (!space) space = product_space(cx.space, cy.space);
  if (space->size() != cx.space->size() * ny) throw StructuralError("product space has the wrong size");

  ProductChain out{space, DecompositionChain{space, {}}, {}, {}};
  // Current product pieces as (index in X stage family, index in Y stage family);
  // before the first stage both factors are whole.
  std::vector<std::pair<std::size_t, std::size_t>> parents{{0, 0}};
  std::vector<SubsetRef> parent_pieces{SubsetRef::whole(space)};

  for (std::size_t i = 0; i < longer.size(); ++i) {
    const auto& sx = px.stages[i];
    const auto& sy = py.stages[i];
    std::vector<std::vector<std::vector<std::size_t>>> ix, iy;
    std::size_t off = 0;
    for (const auto& step : sx.steps) ix.push_back(step_indices(step, off));
    off = 0;
    for (const auto& step : sy.steps) iy.push_back(step_indices(step, off));
    const auto fx = sx.family().pieces, fy = sy.family().pieces;

    ChainStage stage;
    stage.radius = longer[i];
    stage.width = sx.width * sy.width;
    out.width_products.push_back(stage.width);
    std::vector<std::pair<std::size_t, std::size_t>> next;
    std::vector<SubsetRef> next_pieces;
    for (std::size_t p = 0; p < parents.size(); ++p) {
      const auto [a, b] = parents[p];
      Decomposition step{parent_pieces[p], stage.radius, {}};
      for (const auto& jx : ix[a])
        for (const auto& ky : iy[b]) {
          MetricFamily fam;
          fam.tag = "product";
          for (std::size_t u : jx)
            for (std::size_t v : ky) {
              fam.pieces.push_back(cross(space, fx[u], fy[v], ny));
              next.emplace_back(u, v);
              next_pieces.push_back(fam.pieces.back());
            }
          step.subfamilies.push_back(std::move(fam));
        }
      stage.steps.push_back(std::move(step));
    }
    parents = std::move(next);
    parent_pieces = std::move(next_pieces);
    out.chain.stages.push_back(std::move(stage));
  }

  if (s && t) {
    const auto st = product_growth(*s, *t);
    out.report = verify_chain(out.chain, [&](Dist r) { return st(r); });
  } else {
    out.report = verify_chain(out.chain);
  }
  if (!out.report.pass) throw IntegrityError("product chain fails verification: " + out.report.summary());
  return out;
}

}  // namespace dcg
