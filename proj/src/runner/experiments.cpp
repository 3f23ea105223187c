#include <algorithm>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include "dcg/errors.hpp"
#include "dcg/fiber.hpp"
#include "dcg/growth.hpp"
#include "dcg/product.hpp"
#include "dcg/property_a.hpp"
#include "dcg/qi.hpp"
#include "dcg/runner.hpp"

namespace dcg {

namespace {

void need_spaces(const ExperimentConfig& c, std::size_t k) {
  if (c.spaces.size() < k)
    throw ConfigError(c.experiment + " needs " + std::to_string(k) + " space descriptor(s), got " +
                      std::to_string(c.spaces.size()));
}

void need_radii(const std::vector<Dist>& radii, const char* what) {
  if (radii.empty()) throw ConfigError(std::string(what) + " list is empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 0) throw ConfigError(std::string(what) + " must be nonnegative");
    if (i > 0 && radii[i] < radii[i - 1]) throw ConfigError(std::string(what) + " must be nondecreasing");
  }
}

ChainOptions chain_options(const ExperimentConfig& c) {
  ChainOptions o;
  o.kind = parse_strategy(c.strategy);
  o.mesh_rule = parse_mesh_rule(c.mesh_rule);
  o.exact_limit = c.exact_limit;
  return o;
}

std::vector<std::string> provenance(const std::vector<SpaceHandle>& hs) {
  std::vector<std::string> out;
  for (const auto& h : hs) out.push_back(h.descriptor + ": " + h.space->provenance());
  return out;
}

std::string rational_text(const Rational& q) { return q.get_str(); }

Json chain_json(const DecompositionChain& chain, const ChainReport& report) {
  Json j;
  j["radii"] = chain.radii();
  j["widths"] = chain.widths();
  j["terminal_mesh"] = chain.terminal_mesh();
  j["terminal_pieces"] = chain.terminal_family().pieces.size();
  j["verified"] = report.pass;
  j["summary"] = report.summary();
  return j;
}

std::int64_t max_width(const DecompositionChain& c) {
  std::size_t w = 1;
  for (auto x : c.widths()) w = std::max(w, x);
  return static_cast<std::int64_t>(w);
}

GrowthFunction bound_or_width(const ExperimentConfig& c, const DecompositionChain& chain) {
  return c.bound.empty() ? GrowthFunction::constant(Rational(static_cast<long>(max_width(chain))))
                         : GrowthFunction::parse(c.bound);
}

// Lattice map x -> k x, by coordinates.
std::vector<PointId> scale_map(const FiniteMetricSpace& x, const FiniteMetricSpace& y, std::int64_t k) {
  if (!x.coordinates() || !y.coordinates())
    throw ConfigError("pullback by scaling needs lattice coordinates on both spaces");
  std::map<std::vector<std::int64_t>, PointId> where;
  for (PointId p = 0; p < y.size(); ++p) where.emplace((*y.coordinates())[p], p);
  std::vector<PointId> map(x.size());
  for (PointId p = 0; p < x.size(); ++p) {
    auto v = (*x.coordinates())[p];
    for (auto& t : v) t *= k;
    auto it = where.find(v);
    if (it == where.end())
      throw ConfigError("the target does not contain " + std::to_string(k) + " * " + x.label(p) +
                        "; enlarge the target ball");
    map[p] = it->second;
  }
  return map;
}

Json witness_row(const SpacePtr& space, std::int64_t n, const ChainFactory& factory, std::size_t stages) {
  WitnessOptions opts;
  opts.stages = stages;
  WitnessDiagnostics diag;
  const auto w = witness_from_chain(space, n, factory, opts, &diag);
  const auto rep = verify_witness(w, n, make_rational(1, n));
  Json terms = Json::array();
  for (const auto& t : w.terms) {
    std::ostringstream term;
    term.precision(17);
    term << static_cast<double>(t.term);
    terms.push_back({{"radius", t.radius},
                     {"multiplicity", t.multiplicity},
                     {"lambda_eff", t.lambda},
                     {"lebesgue", t.lebesgue},
                     {"term", term.str()}});
  }
  Json j;
  j["n"] = n;
  j["radii"] = w.radii;
  j["stages"] = terms;
  j["support_radius"] = w.support_radius;
  j["max_support_radius"] = rep.max_support_radius;
  j["max_norm_deviation"] = rational_text(rep.max_norm_deviation);
  j["sup_variation"] = rational_text(rep.sup_variation);
  j["epsilon"] = rational_text(make_rational(1, n));
  j["pairs"] = rep.pairs;
  j["recursion_pairs"] = diag.recursion_pairs;
  j["pass"] = rep.pass;
  return j;
}

// Rows in parallel, assembled in order.
Json witness_rows(const SpacePtr& space, const std::vector<std::int64_t>& scales, const ChainFactory& factory,
                  std::size_t stages) {
  if (scales.empty()) throw ConfigError("witness scale list is empty");
  for (auto n : scales)
    if (n < 1) throw ConfigError("witness scales must be positive");
  space->diameter();  // filled before threads share the space
  std::vector<std::future<Json>> jobs;
  for (auto n : scales)
    jobs.push_back(std::async(std::launch::async, [&, n] { return witness_row(space, n, factory, stages); }));
  Json rows = Json::array();
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

bool all_pass(const Json& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const Json& r) { return r.at("pass").get<bool>(); });
}

Json profile_row_json(const ProfileRow& r) {
  Json j;
  j["space"] = r.space;
  j["N"] = r.ball_radius;
  j["R"] = r.radius;
  j["D"] = r.mesh;
  j["n_greedy"] = r.n_greedy ? Json(*r.n_greedy) : Json();
  j["n_exact"] = r.n_exact ? Json(*r.n_exact) : Json();
  j["wall_ms"] = r.wall_ms ? Json(*r.wall_ms) : Json();
  j["note"] = r.note;
  return j;
}

ProfileRow profile_row_from_json(const Json& j) {
  ProfileRow r;
  r.space = j.at("space").get<std::string>();
  r.ball_radius = j.at("N").get<std::int64_t>();
  r.radius = j.at("R").get<Dist>();
  r.mesh = j.at("D").get<Dist>();
  if (!j.at("n_greedy").is_null()) r.n_greedy = j.at("n_greedy").get<std::size_t>();
  if (!j.at("n_exact").is_null()) r.n_exact = j.at("n_exact").get<std::size_t>();
  if (!j.at("wall_ms").is_null()) r.wall_ms = j.at("wall_ms").get<double>();
  r.note = j.at("note").get<std::string>();
  return r;
}

}  // namespace

Json run_ball(const ExperimentConfig& config) {
  need_spaces(config, 1);
  const auto h = parse_space(config.spaces[0], config.use_cache);
  if (!h.ball) throw ConfigError("'" + h.descriptor + "' is not a group ball");
  const auto& t = h.ball->table;
  Json j;
  j["group"] = h.ball->group->name();
  j["generating_set"] = h.ball->group->generating_set();
  j["radius"] = h.ball->radius;
  j["size"] = h.space->size();
  std::vector<std::size_t> spheres(t.sphere_sizes.begin(),
                                   t.sphere_sizes.begin() + std::min<std::size_t>(t.sphere_sizes.size(),
                                                                                  h.ball->radius + 1));
  j["sphere_sizes"] = spheres;
  j["diameter"] = h.space->diameter();
  return make_report(config, provenance({h}), j);
}

Json run_decompose(const ExperimentConfig& config) {
  need_spaces(config, 1);
  need_radii(config.radii, "radius");
  const auto h = parse_space(config.spaces[0], config.use_cache);
  DecompositionStrategy s;
  s.kind = parse_strategy(config.strategy);
  s.mesh = parse_mesh_rule(config.mesh_rule)(config.radii[0]);
  s.exact_limit = config.exact_limit;
  const auto d = decompose(SubsetRef::whole(h.space), config.radii[0], s);
  const auto rep = verify_decomposition(d);
  Json j;
  j["R"] = d.radius;
  j["D"] = s.mesh;
  j["strategy"] = to_string(s.kind);
  j["width"] = d.width();
  std::vector<std::size_t> pieces;
  Dist m = 0;
  for (const auto& f : d.subfamilies) {
    pieces.push_back(f.pieces.size());
    m = std::max(m, mesh(f));
  }
  j["pieces_per_subfamily"] = pieces;
  j["mesh"] = m;
  j["verified"] = rep.pass;
  j["summary"] = rep.summary();
  j["decomposition"] = decomposition_to_json(d, false);
  if (!rep.pass) throw IntegrityError("decomposition failed verification: " + rep.summary());
  return make_report(config, provenance({h}), j);
}

ProfileOutput run_profile(const ExperimentConfig& config) {
  need_spaces(config, 1);
  if (config.radii.empty()) throw ConfigError("profile needs a nonempty radius list");
  auto descriptor = config.spaces[0];
  auto ball_radii = config.ball_radii;
  if (const auto at = descriptor.rfind('@'); at != std::string::npos) {
    ball_radii = {parse_int_list(descriptor.substr(at + 1)).at(0)};
    descriptor = descriptor.substr(0, at);
  }
  if (ball_radii.empty()) throw ConfigError("profile needs at least one ball radius");
  parse_group(descriptor, ball_radii.front());  // reject bad descriptors before any work

  ProfileOutput out;
  const auto file = cache_directory() / ("profile-" + config.checksum() + ".json");
  if (config.use_cache && !config.timing) {
    std::ifstream in(file);
    if (in) {
      try {
        const auto cached = Json::parse(in);
        for (const auto& r : cached.at("result").at("rows")) out.table.rows.push_back(profile_row_from_json(r));
        out.report = cached;
        out.cached = true;
        return out;
      } catch (const std::exception&) {
        out.table.rows.clear();  // unreadable entry: recompute
      }
    }
  }

  ProfileOptions opts;
  opts.mesh_rule = parse_mesh_rule(config.mesh_rule);
  opts.exact_limit = config.exact_limit;
  opts.record_time = config.timing;
  BallOptions ball_opts;
  ball_opts.use_cache = config.use_cache;
  const SpaceFactory factory = [&](std::int64_t n) { return ball(parse_group(descriptor, n), n, ball_opts); };
  std::vector<std::future<ProfileTable>> jobs;
  for (auto n : ball_radii)
    jobs.push_back(std::async(std::launch::async, [&, n] {
      return dimension_profile(descriptor, factory, {n}, config.radii, opts);
    }));
  for (auto& j : jobs)
    for (auto& r : j.get().rows) out.table.rows.push_back(std::move(r));

  Json rows = Json::array();
  for (const auto& r : out.table.rows) rows.push_back(profile_row_json(r));
  const auto group = parse_group(descriptor, ball_radii.front());
  out.report = make_report(config, {descriptor + ": " + group->generating_set()},
                           Json{{"rows", rows},
                                {"note", "n is the width found on the ball: an upper estimate of d_X(R) "
                                         "restricted to B(e,N)"}});
  if (config.use_cache && !config.timing) {
    std::filesystem::create_directories(file.parent_path());
    std::ofstream(file) << out.report.dump();
  }
  return out;
}

Json run_pullback(const ExperimentConfig& config) {
  need_spaces(config, 2);
  need_radii(config.radii, "radius");
  if (config.map_scale < 1) throw ConfigError("map scale must be at least 1");
  const auto x = parse_space(config.spaces[0], config.use_cache);
  const auto y = parse_space(config.spaces[1], config.use_cache);
  const auto k = config.map_scale;
  const auto f = make_qi_embedding(x.space, y.space, scale_map(*x.space, *y.space, k),
                                   Rational(static_cast<long>(k)), 0);
  const auto chain = build_chain(y.space, config.radii, chain_options(config));
  const auto s = bound_or_width(config, chain);
  const auto pulled = pullback_chain(f, chain, s);
  std::vector<std::string> certified;
  for (const auto& q : pulled.certified_radii) certified.push_back(rational_text(q));
  Json j;
  j["map"] = "x -> " + std::to_string(k) + "x";
  j["L"] = k;
  j["C"] = 0;
  j["target_chain"] = chain_json(chain, verify_chain(chain, [&](Dist r) { return s(r); }));
  j["target_bound"] = s.describe();
  j["pulled_bound"] = pulled.bound.describe();
  j["certified_radii"] = certified;
  j["stage_bounds"] = pulled.stage_bounds;
  j["pulled_chain"] = chain_json(pulled.chain, pulled.report);
  return make_report(config, provenance({x, y}), j);
}

Json run_product(const ExperimentConfig& config) {
  need_spaces(config, 2);
  need_radii(config.radii, "radius");
  const auto x = parse_space(config.spaces[0], config.use_cache);
  const auto y = parse_space(config.spaces[1], config.use_cache);
  const auto cx = build_chain(x.space, config.radii, chain_options(config));
  const auto cy = build_chain(y.space, config.radii, chain_options(config));
  const auto s = GrowthFunction::constant(Rational(static_cast<long>(max_width(cx))));
  const auto t = GrowthFunction::constant(Rational(static_cast<long>(max_width(cy))));
  const auto p = product_chain(cx, cy, s, t);
  const auto px = pad_chain(cx, p.chain.radii()), py = pad_chain(cy, p.chain.radii());
  bool widths_ok = true;
  for (std::size_t i = 0; i < p.chain.stages.size(); ++i)
    widths_ok = widths_ok && p.chain.stages[i].width == px.stages[i].width * py.stages[i].width;
  Json j;
  j["product_points"] = p.space->size();
  j["x_chain"] = chain_json(cx, verify_chain(cx));
  j["y_chain"] = chain_json(cy, verify_chain(cy));
  j["product_chain"] = chain_json(p.chain, p.report);
  j["width_products"] = p.width_products;
  j["widths_are_products"] = widths_ok;
  j["mesh_within_sum"] = p.chain.terminal_mesh() <= cx.terminal_mesh() + cy.terminal_mesh();
  if (!widths_ok) throw IntegrityError("product stage width differs from the product of factor widths");
  return make_report(config, provenance({x, y}), j);
}

Json run_fiber(const ExperimentConfig& config) {
  need_spaces(config, 2);
  need_radii(config.radii, "radius");
  need_radii(config.stab_radii, "stabilizer radius");
  const auto g = parse_space(config.spaces[0], config.use_cache);
  const auto b = parse_space(config.spaces[1], config.use_cache);
  if (!g.ball || !b.ball) throw ConfigError("fiber needs two group balls: a wreath product and its base");
  const auto action = walker_action(g.ball, b.ball);
  validate_action(action, 2000, config.seed);
  const auto target = build_chain(b.space, config.radii, chain_options(config));
  const auto s = bound_or_width(config, target);
  ChainOptions stab_opts;
  stab_opts.mesh_rule = parse_mesh_rule(config.stab_mesh_rule);
  stab_opts.exact_limit = config.exact_limit;
  const auto r = fiber_chain(action, target, s, sfdc_stab_factory(config.stab_radii, stab_opts));
  Json j;
  j["action"] = action.description;
  j["lipschitz"] = r.lipschitz;
  j["target_chain"] = chain_json(target, verify_chain(target));
  j["pullback_stages"] = r.pullback_stages;
  j["stab_diameter"] = r.stab_diameter;
  j["stab_terminal_mesh"] = r.stab_terminal_mesh;
  j["stage_bounds"] = r.stage_bounds;
  j["fiber_pieces"] = r.representatives.size();
  j["chain"] = chain_json(r.chain, r.report);
  j["mesh_within_stabilizer_mesh"] = r.chain.terminal_mesh() <= r.stab_terminal_mesh;
  return make_report(config, provenance({g, b}), j);
}

Json run_witness(const ExperimentConfig& config) {
  need_spaces(config, 1);
  const auto h = parse_space(config.spaces[0], config.use_cache);
  const auto opts = chain_options(config);
  const ChainFactory factory = [&](const std::vector<Dist>& radii) { return build_chain(h.space, radii, opts); };
  const auto rows = witness_rows(h.space, config.scales, factory, config.stages);
  Json j;
  j["points"] = h.space->size();
  j["rows"] = rows;
  j["pass"] = all_pass(rows);
  return make_report(config, provenance({h}), j);
}

ExperimentConfig demo_thm51_defaults() {
  ExperimentConfig c;
  c.experiment = "demo-thm51";
  c.spaces = {"wreath(z^1,free:2)@2", "grigorchuk@3"};
  c.radii = {1, 2};
  c.scales = {1, 2, 3};
  c.stages = 2;
  return c;
}

Json run_demo_thm51(const ExperimentConfig& config) {
  need_spaces(config, 2);
  need_radii(config.radii, "radius");
  auto radius_of = [](const std::string& d) {
    const auto at = d.rfind('@');
    return at == std::string::npos ? std::int64_t{-1} : parse_int_list(d.substr(at + 1)).at(0);
  };
  if (radius_of(config.spaces[0]) > 4 || radius_of(config.spaces[1]) > 8)
    throw ResourceError("demo-thm51 is desk scale: keep N <= 4 for the wreath ball and N <= 8 for Grigorchuk");
  SpaceHandle x, y;
  try {
    x = parse_space(config.spaces[0], config.use_cache);
    y = parse_space(config.spaces[1], config.use_cache);
  } catch (const ResourceError& e) {
    throw ResourceError(std::string(e.what()) + "; shrink N");
  }
  const auto opts = chain_options(config);
  const auto space = product_space(x.space, y.space);

  const auto cx = build_chain(x.space, config.radii, opts);
  const auto cy = build_chain(y.space, {config.radii.front()}, opts);
  const auto s = GrowthFunction::constant(Rational(static_cast<long>(max_width(cx))));
  const auto t = GrowthFunction::constant(Rational(static_cast<long>(max_width(cy))));
  const auto p = product_chain(cx, cy, s, t, space);
  const auto px = pad_chain(cx, p.chain.radii()), py = pad_chain(cy, p.chain.radii());
  std::vector<std::size_t> expected;
  for (std::size_t i = 0; i < p.chain.stages.size(); ++i) expected.push_back(px.stages[i].width * py.stages[i].width);
  const bool widths_ok = p.chain.widths() == expected;

  const ChainFactory factory = [&](const std::vector<Dist>& radii) {
    const auto a = build_chain(x.space, radii, opts);
    const auto b = build_chain(y.space, {radii.front()}, opts);
    return product_chain(a, b, std::nullopt, std::nullopt, space).chain;
  };
  Json rows;
  try {
    rows = witness_rows(space, config.scales, factory, config.stages);
  } catch (const ResourceError& e) {
    throw ResourceError(std::string(e.what()) + "; shrink N");
  }

  Json j;
  j["points"] = {{"wreath", x.space->size()}, {"grigorchuk", y.space->size()}, {"product", space->size()}};
  j["wreath_chain"] = chain_json(cx, verify_chain(cx));
  j["grigorchuk_chain"] = chain_json(cy, verify_chain(cy));
  j["product_chain"] = chain_json(p.chain, p.report);
  j["width_products"] = expected;
  j["widths_are_products"] = widths_ok;
  j["witness"] = rows;
  j["pass"] = widths_ok && p.report.pass && all_pass(rows);
  return make_report(config, provenance({x, y}), j);
}

}  // namespace dcg
