#include "dcg/metric_json.hpp"

#include "dcg/errors.hpp"

namespace dcg {

namespace {

void expect_schema(const Json& j, const char* schema) {
  if (!j.is_object() || !j.contains("schema") || j.at("schema") != schema) {
    throw ConfigError(std::string("expected a JSON object with schema '") + schema + "'");
  }
}

std::vector<PointId> members_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("subset must be an array of point indices");
  std::vector<PointId> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
      throw ConfigError("point index must be a nonnegative integer");
    out.push_back(v.get<PointId>());
  }
  return out;
}

}  // namespace

Dist radius_from_json(const Json& j) {
  if (j.is_number_integer()) {
    const auto r = j.get<std::int64_t>();
    if (r < 0) throw ConfigError("radius must be nonnegative");
    return r;
  }
  if (j.is_number()) return floor_radius(j.get<double>());
  throw ConfigError("radius must be a number");
}

Json space_to_json(const FiniteMetricSpace& space) {
  Json j;
  j["schema"] = kSpaceSchema;
  j["name"] = space.name();
  j["labels"] = space.labels();
  const auto flat = materialize(space);
  const std::size_t n = space.size();
  Json rows = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back(std::vector<std::int32_t>(flat.begin() + static_cast<std::ptrdiff_t>(i * n),
                                             flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * n)));
  }
  j["dist"] = std::move(rows);
  if (space.coordinates()) j["coordinates"] = *space.coordinates();
  if (!space.provenance().empty()) j["provenance"] = space.provenance();
  return j;
}

SpacePtr space_from_json(const Json& j) {
  expect_schema(j, kSpaceSchema);
  try {
    const auto labels = j.at("labels").get<std::vector<std::string>>();
    const auto rows = j.at("dist").get<std::vector<std::vector<Dist>>>();
    auto base = FiniteMetricSpace::from_matrix(j.at("name").get<std::string>(), labels, rows);
    if (!j.contains("coordinates") && !j.contains("provenance")) return base;
    auto space = std::make_shared<FiniteMetricSpace>(*base);
    if (j.contains("coordinates"))
      space->set_coordinates(j.at("coordinates").get<std::vector<std::vector<std::int64_t>>>());
    if (j.contains("provenance")) space->set_provenance(j.at("provenance").get<std::string>());
    return space;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed space JSON: ") + e.what());
  }
}

Json family_to_json(const MetricFamily& family) {
  Json j;
  j["tag"] = family.tag;
  Json pieces = Json::array();
  for (const auto& p : family.pieces) pieces.push_back(p.members());
  j["pieces"] = std::move(pieces);
  return j;
}

MetricFamily family_from_json(const Json& j, const SpacePtr& space) {
  MetricFamily f;
  try {
    f.tag = j.value("tag", std::string());
    for (const auto& p : j.at("pieces")) f.pieces.emplace_back(space, members_from_json(p));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed family JSON: ") + e.what());
  }
  return f;
}

Json decomposition_to_json(const Decomposition& d, bool embed_space) {
  Json j;
  j["schema"] = kDecompositionSchema;
  if (embed_space) j["space"] = space_to_json(*d.source.space());
  j["source"] = d.source.members();
  j["radius"] = d.radius;
  Json subs = Json::array();
  for (const auto& s : d.subfamilies) subs.push_back(family_to_json(s));
  j["subfamilies"] = std::move(subs);
  return j;
}

Decomposition decomposition_from_json(const Json& j, SpacePtr space) {
  expect_schema(j, kDecompositionSchema);
  if (j.contains("space")) space = space_from_json(j.at("space"));
  if (!space) throw ConfigError("decomposition JSON carries no space");
  try {
    Decomposition d{SubsetRef(space, members_from_json(j.at("source"))),
                    radius_from_json(j.at("radius")),
                    {}};
    for (const auto& s : j.at("subfamilies")) d.subfamilies.push_back(family_from_json(s, space));
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed decomposition JSON: ") + e.what());
  }
}

Json chain_to_json(const DecompositionChain& chain) {
  Json j;
  j["schema"] = kChainSchema;
  j["space"] = space_to_json(*chain.space);
  Json stages = Json::array();
  for (const auto& stage : chain.stages) {
    Json s;
    s["radius"] = stage.radius;
    s["width"] = stage.width;
    Json steps = Json::array();
    for (const auto& step : stage.steps) steps.push_back(decomposition_to_json(step, false));
    s["steps"] = std::move(steps);
    stages.push_back(std::move(s));
  }
  j["stages"] = std::move(stages);
  return j;
}

DecompositionChain chain_from_json(const Json& j) {
  expect_schema(j, kChainSchema);
  DecompositionChain chain;
  chain.space = space_from_json(j.at("space"));
  try {
    for (const auto& s : j.at("stages")) {
      ChainStage stage;
      stage.radius = radius_from_json(s.at("radius"));
      stage.width = s.at("width").get<std::size_t>();
      for (const auto& step : s.at("steps"))
        stage.steps.push_back(decomposition_from_json(step, chain.space));
      chain.stages.push_back(std::move(stage));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed chain JSON: ") + e.what());
  }
  return chain;
}

}  // namespace dcg
