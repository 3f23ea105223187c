#include <charconv>
#include <cstdio>
#include <fstream>

#include "dcg/errors.hpp"
#include "dcg/runner.hpp"

namespace dcg {

namespace {

std::int64_t parse_int(const std::string& text, const std::string& context) {
  std::int64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end || text.empty())
    throw ConfigError("not an integer: '" + text + "' in '" + context + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

}  // namespace

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const auto item = trim(text.substr(start, comma - start));
    if (item.empty()) throw ConfigError("empty entry in list '" + text + "'");
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(item, text));
    } else {
      const auto a = parse_int(item.substr(0, dots), text), b = parse_int(item.substr(dots + 2), text);
      if (b < a) throw ConfigError("descending range '" + item + "'");
      if (b - a > 100000) throw ConfigError("range too long: '" + item + "'");
      for (auto v = a; v <= b; ++v) out.push_back(v);
    }
    start = comma + 1;
  }
  return out;
}

SpaceHandle parse_space(const std::string& descriptor, bool use_cache) {
  SpaceHandle h;
  h.descriptor = descriptor;
  if (descriptor.rfind("path:", 0) == 0) {
    const auto n = parse_int(descriptor.substr(5), descriptor);
    if (n < 1) throw ConfigError("path needs at least one point: '" + descriptor + "'");
    h.space = FiniteMetricSpace::path(static_cast<std::size_t>(n));
    return h;
  }
  if (descriptor.rfind("file:", 0) == 0) {
    const auto path = descriptor.substr(5);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read space file '" + path + "'");
    try {
      h.space = space_from_json(Json::parse(in));
    } catch (const Json::exception& e) {
      throw ConfigError("malformed space file '" + path + "': " + e.what());
    }
    return h;
  }
  const auto at = descriptor.rfind('@');
  if (at == std::string::npos)
    throw ConfigError("space descriptor '" + descriptor + "' is not <group>@<N>, path:<n> or file:<path>");
  const auto radius = parse_int(descriptor.substr(at + 1), descriptor);
  if (radius < 0) throw ConfigError("negative ball radius in '" + descriptor + "'");
  const auto group = parse_group(descriptor.substr(0, at), radius);
  BallOptions opts;
  opts.use_cache = use_cache;
  h.ball = std::make_shared<const BallSpec>(make_ball(group, radius, opts));
  h.space = h.ball->space;
  return h;
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["experiment"] = experiment;
  j["spaces"] = spaces;
  j["ball_radii"] = ball_radii;
  j["radii"] = radii;
  j["stab_radii"] = stab_radii;
  j["mesh_rule"] = mesh_rule;
  j["stab_mesh_rule"] = stab_mesh_rule;
  j["strategy"] = strategy;
  j["scales"] = scales;
  j["stages"] = stages;
  j["exact_limit"] = exact_limit;
  j["map_scale"] = map_scale;
  j["bound"] = bound;
  j["seed"] = seed;
  j["cache"] = use_cache;
  j["timing"] = timing;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  ExperimentConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("experiment", c.experiment);
    get("spaces", c.spaces);
    get("ball_radii", c.ball_radii);
    get("radii", c.radii);
    get("stab_radii", c.stab_radii);
    get("mesh_rule", c.mesh_rule);
    get("stab_mesh_rule", c.stab_mesh_rule);
    get("strategy", c.strategy);
    get("scales", c.scales);
    get("stages", c.stages);
    get("exact_limit", c.exact_limit);
    get("map_scale", c.map_scale);
    get("bound", c.bound);
    get("seed", c.seed);
    get("cache", c.use_cache);
    get("timing", c.timing);
    get("csv", c.csv_path);
    get("json", c.json_path);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  return c;
}

std::string ExperimentConfig::checksum() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : to_json().dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json make_report(const ExperimentConfig& config, const std::vector<std::string>& generating_sets,
                 Json body) {
  Json j;
  j["schema"] = kReportSchema;
  j["experiment"] = config.experiment;
  j["config"] = config.to_json();
  j["config_checksum"] = config.checksum();
  j["library_version"] = kLibraryVersion;
  j["generating_sets"] = generating_sets;
  j["disclaimer"] = kDisclaimer;
  j["result"] = std::move(body);
  return j;
}

}  // namespace dcg
