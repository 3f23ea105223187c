#pragma once

#include "json.hpp"

#include "dcg/family.hpp"

namespace dcg {

using Json = nlohmann::json;

// Versioned JSON schemas. Integers are written as JSON integers and pieces keep
// their order, so a write/read/write cycle is byte-identical.
inline constexpr const char* kSpaceSchema = "dcg.space/1";
inline constexpr const char* kFamilySchema = "dcg.family/1";
inline constexpr const char* kDecompositionSchema = "dcg.decomposition/1";
inline constexpr const char* kChainSchema = "dcg.chain/1";

Json space_to_json(const FiniteMetricSpace& space);
SpacePtr space_from_json(const Json& j);

Json family_to_json(const MetricFamily& family);
MetricFamily family_from_json(const Json& j, const SpacePtr& space);

/// With `embed_space` the space travels with the decomposition; otherwise the
/// caller supplies it when reading back.
Json decomposition_to_json(const Decomposition& d, bool embed_space = true);
Decomposition decomposition_from_json(const Json& j, SpacePtr space = nullptr);

Json chain_to_json(const DecompositionChain& chain);
DecompositionChain chain_from_json(const Json& j);

/// Radius field reader: integers pass through, reals are floored.
Dist radius_from_json(const Json& j);

}  // namespace dcg
