// dcg: command-line front end for the decomposition toolkit.
#include <fstream>
#include <iostream>
#include <new>
#include <optional>

#include "CLI11.hpp"

#include "dcg/errors.hpp"
#include "dcg/runner.hpp"

using namespace dcg;

namespace {

struct Flags {
  std::string config_file;
  std::vector<std::string> spaces;
  // Optional so that an explicitly empty list is rejected instead of ignored.
  std::optional<std::string> radii, stab_radii, ball_radii, scales;
  std::string mesh_rule, stab_mesh_rule, strategy, bound;
  std::size_t stages = 0, exact_limit = 0;
  std::int64_t map_scale = 0;
  std::uint64_t seed = 0;
  bool cache = false, timing = false;
  std::string csv, json;
};

// Explicit flags override the config file, which overrides verb defaults.
ExperimentConfig resolve(const std::string& verb, ExperimentConfig base, const Flags& f) {
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw ConfigError("cannot read config file '" + f.config_file + "'");
    try {
      base = ExperimentConfig::from_json(Json::parse(in));
    } catch (const Json::exception& e) {
      throw ConfigError("config file '" + f.config_file + "' is not JSON: " + e.what());
    }
  }
  base.experiment = verb;
  if (!f.spaces.empty()) base.spaces = f.spaces;
  if (f.radii) base.radii = parse_int_list(*f.radii);
  if (f.stab_radii) base.stab_radii = parse_int_list(*f.stab_radii);
  if (f.ball_radii) base.ball_radii = parse_int_list(*f.ball_radii);
  if (f.scales) base.scales = parse_int_list(*f.scales);
  if (!f.mesh_rule.empty()) base.mesh_rule = f.mesh_rule;
  if (!f.stab_mesh_rule.empty()) base.stab_mesh_rule = f.stab_mesh_rule;
  if (!f.strategy.empty()) base.strategy = f.strategy;
  if (!f.bound.empty()) base.bound = f.bound;
  if (f.stages) base.stages = f.stages;
  if (f.exact_limit) base.exact_limit = f.exact_limit;
  if (f.map_scale) base.map_scale = f.map_scale;
  if (f.seed) base.seed = f.seed;
  if (f.cache) base.use_cache = true;
  if (f.timing) base.timing = true;
  if (!f.csv.empty()) base.csv_path = f.csv;
  if (!f.json.empty()) base.json_path = f.json;
  return base;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

void emit(const ExperimentConfig& c, const Json& report) {
  const auto text = report.dump(2) + "\n";
  if (c.json_path.empty())
    std::cout << text;
  else
    write_text(c.json_path, text);
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_file, "JSON experiment config (flags override it)");
  cmd->add_flag("--cache", f.cache, "Use the on-disk cache (directory: $DCG_CACHE_DIR)");
  cmd->add_option("--json", f.json, "Write the JSON report here instead of stdout");
  cmd->add_option("--exact-limit", f.exact_limit, "Largest region for the exhaustive search [12]");
}

void add_chain(CLI::App* cmd, Flags& f, const std::string& radii_default) {
  cmd->add_option("--radii", f.radii, "Stage radii, e.g. 1,2 or 1..3 [" + radii_default + "]");
  cmd->add_option("--mesh-rule", f.mesh_rule, "Piece diameter rule: kR or a constant [3R]");
  cmd->add_option("--strategy", f.strategy, "greedy, grid or exact [greedy]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decomposition complexity toolkit: finite-scale constructions on group balls"};
  app.require_subcommand(1);
  Flags f;

  auto* ball_cmd = app.add_subcommand("ball", "Enumerate a ball and print its sphere sizes");
  ball_cmd->add_option("space", f.spaces, "Ball descriptor, e.g. z^2@20 or grigorchuk@5")->required();
  add_common(ball_cmd, f);

  auto* dec = app.add_subcommand("decompose", "One (R, n)-decomposition of a space");
  dec->add_option("space", f.spaces, "Space descriptor: <group>@<N>, path:<n> or file:<json>")->required();
  add_chain(dec, f, "1");
  add_common(dec, f);

  auto* prof = app.add_subcommand("profile", "Finite-scale dimension profile as CSV");
  prof->add_option("group", f.spaces, "Group descriptor, or <group>@<N> for one ball")->required();
  prof->add_option("--balls", f.ball_radii, "Ball radii N [10]");
  prof->add_option("--radii", f.radii, "Radii R [1..5]");
  prof->add_option("--mesh-rule", f.mesh_rule, "Piece diameter rule [3R]");
  prof->add_option("--csv", f.csv, "Write the CSV here instead of stdout");
  prof->add_flag("--timing", f.timing, "Record wall_ms (output is then not reproducible)");
  add_common(prof, f);

  auto* pb = app.add_subcommand("pullback", "Pull a chain back along x -> kx");
  pb->add_option("spaces", f.spaces, "Source and target descriptors")->expected(2)->required();
  pb->add_option("--scale", f.map_scale, "Map scale k [2]");
  pb->add_option("--bound", f.bound, "Growth bound s of the target chain [const: largest width]");
  add_chain(pb, f, "2,4");
  add_common(pb, f);

  auto* prod = app.add_subcommand("product", "Product chain of two spaces under the sum metric");
  prod->add_option("spaces", f.spaces, "Two space descriptors")->expected(2)->required();
  add_chain(prod, f, "2");
  add_common(prod, f);

  auto* fib = app.add_subcommand("fiber", "Fiber chain of a wreath product over its walker action");
  fib->add_option("spaces", f.spaces, "Wreath ball and base ball [wreath(cyclic:2,z^1)@6 z^1@6]")
      ->expected(2);
  fib->add_option("--radii", f.radii, "Target chain radii [2]");
  fib->add_option("--mesh-rule", f.mesh_rule, "Target chain diameter rule [R]");
  fib->add_option("--strategy", f.strategy, "Target chain strategy [grid]");
  fib->add_option("--stab-radii", f.stab_radii, "Stabilizer chain radii [2,4]");
  fib->add_option("--stab-mesh-rule", f.stab_mesh_rule, "Stabilizer diameter rule [8R]");
  fib->add_option("--bound", f.bound, "Growth bound s of the target chain [const: largest width]");
  fib->add_option("--seed", f.seed, "Seed for the isometry sampling [1]");
  add_common(fib, f);

  auto* wit = app.add_subcommand("witness", "Unit-vector witness families at scales n");
  wit->add_option("space", f.spaces, "Space descriptor")->required();
  wit->add_option("--n", f.scales, "Scales n [1..3]");
  wit->add_option("--stages", f.stages, "Chain stages [2]");
  add_chain(wit, f, "searched");
  add_common(wit, f);

  auto* demo = app.add_subcommand("demo-thm51", "Product of Z wr F_2 and Grigorchuk balls, with witnesses");
  demo->add_option("spaces", f.spaces, "Wreath ball and Grigorchuk ball [wreath(z^1,free:2)@2 grigorchuk@3]")
      ->expected(2);
  demo->add_option("--n", f.scales, "Scales n [1..3]");
  demo->add_option("--radii", f.radii, "Displayed chain radii [1,2]");
  demo->add_option("--stages", f.stages, "Witness chain stages [2]");
  add_common(demo, f);

  auto* cache = app.add_subcommand("cache", "Inspect or clear the ball cache");
  cache->require_subcommand(1);
  auto* cache_list = cache->add_subcommand("list", "List cached files");
  auto* cache_clear = cache->add_subcommand("clear", "Delete cached files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cache_list->parsed()) {
      for (const auto& p : list_cache()) std::cout << p.string() << "\n";
      return 0;
    }
    if (cache_clear->parsed()) {
      std::cout << "removed " << clear_cache() << " file(s) from " << cache_directory().string() << "\n";
      return 0;
    }

    ExperimentConfig base;
    if (ball_cmd->parsed()) {
      const auto c = resolve("ball", base, f);
      emit(c, run_ball(c));
    } else if (dec->parsed()) {
      base.radii = {1};
      const auto c = resolve("decompose", base, f);
      emit(c, run_decompose(c));
    } else if (prof->parsed()) {
      base.ball_radii = {10};
      base.radii = {1, 2, 3, 4, 5};
      const auto c = resolve("profile", base, f);
      const auto out = run_profile(c);
      const auto csv = out.table.to_csv();
      if (!c.csv_path.empty()) write_text(c.csv_path, csv);
      if (!c.json_path.empty()) write_text(c.json_path, out.report.dump(2) + "\n");
      if (c.csv_path.empty()) std::cout << csv;
      if (out.cached) std::cerr << "profile: reused cached result " << c.checksum() << "\n";
    } else if (pb->parsed()) {
      base.radii = {2, 4};
      base.map_scale = 2;
      const auto c = resolve("pullback", base, f);
      emit(c, run_pullback(c));
    } else if (prod->parsed()) {
      base.radii = {2};
      const auto c = resolve("product", base, f);
      emit(c, run_product(c));
    } else if (fib->parsed()) {
      base.spaces = {"wreath(cyclic:2,z^1)@6", "z^1@6"};
      base.radii = {2};
      base.mesh_rule = "R";
      base.strategy = "grid";
      base.stab_radii = {2, 4};
      const auto c = resolve("fiber", base, f);
      emit(c, run_fiber(c));
    } else if (wit->parsed()) {
      base.scales = {1, 2, 3};
      const auto c = resolve("witness", base, f);
      emit(c, run_witness(c));
    } else if (demo->parsed()) {
      const auto c = resolve("demo-thm51", demo_thm51_defaults(), f);
      const auto report = run_demo_thm51(c);
      emit(c, report);
      if (!report.at("result").at("pass").get<bool>()) return 4;
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "dcg: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::bad_alloc&) {
    std::cerr << "dcg: out of memory; shrink the ball radius\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "dcg: internal error: " << e.what() << "\n";
    return 4;
  }
}
