#pragma once

#include <optional>
#include <vector>

#include "dcg/family.hpp"
#include "dcg/growth.hpp"

namespace dcg {

/// X x Y with d((x,y),(x',y')) = d(x,x') + d(y,y'). Point (i,j) has index
/// i*|Y| + j. Small products are materialized into a matrix.
SpacePtr product_space(const SpacePtr& x, const SpacePtr& y);

/// Extends a chain with trivial stages (every piece kept whole) at the given
/// radii. `radii` must start with the chain's own radii.
DecompositionChain pad_chain(const DecompositionChain& chain, const std::vector<Dist>& radii);

struct ProductChain {
  SpacePtr space;
  DecompositionChain chain;
  /// Declared stage widths: products of the padded factor widths.
  std::vector<std::size_t> width_products;
  ChainReport report;
};

/// Chains on X and Y whose radii agree where both are defined; the shorter
/// one is padded. Stage i decomposes U x V into the families U'_j x V'_k.
/// StructuralError on incompatible radii. When both bounds are given the
/// result is verified against their product s*t.
ProductChain product_chain(const DecompositionChain& cx, const DecompositionChain& cy,
                           const std::optional<GrowthFunction>& s = std::nullopt,
                           const std::optional<GrowthFunction>& t = std::nullopt,
                           SpacePtr space = nullptr);

}  // namespace dcg
