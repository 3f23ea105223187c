#include "dcg/ball.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <numeric>

#include "json.hpp"

#include "dcg/errors.hpp"

namespace dcg {

std::size_t BallTable::ball_size(std::int64_t r) const {
  std::size_t total = 0;
  for (std::int64_t i = 0; i <= r && i < static_cast<std::int64_t>(sphere_sizes.size()); ++i)
    total += sphere_sizes[static_cast<std::size_t>(i)];
  return total;
}

std::optional<std::int64_t> BallTable::length_of(const Key& k) const {
  auto it = index.find(k);
  if (it == index.end()) return std::nullopt;
  return lengths[it->second];
}

namespace {

void check_generators(const GroupModel& g) {
  const Key e = g.identity();
  const auto& gens = g.generators();
  if (gens.empty()) throw IntegrityError(g.name() + ": empty generating set");
  for (const auto& s : gens) {
    const Key inv = g.invert(s.key);
    if (g.multiply(s.key, inv) != e || g.multiply(inv, s.key) != e)
      throw IntegrityError(g.name() + ": generator " + s.label + " fails s*s^-1 = e");
    const bool closed = std::any_of(gens.begin(), gens.end(),
                                    [&](const Generator& t) { return t.key == inv; });
    if (!closed) throw IntegrityError(g.name() + ": generating set is not symmetric at " + s.label);
    if (s.key == e) throw IntegrityError(g.name() + ": identity listed as a generator");
  }
}

void rebuild_index(BallTable& t) {
  t.index.clear();
  t.index.reserve(t.elements.size());
  for (std::uint32_t i = 0; i < t.elements.size(); ++i) {
    if (!t.index.emplace(t.elements[i], i).second)
      throw IntegrityError(t.group->name() + ": duplicate canonical key in ball table");
  }
}

BallTable bfs(const GroupPtr& group, std::int64_t depth, std::size_t budget) {
  check_generators(*group);
  BallTable t;
  t.group = group;
  t.depth = depth;
  const Key e = group->identity();
  t.elements.push_back(e);
  t.lengths.push_back(0);
  t.words.push_back("e");
  t.sphere_sizes.push_back(1);
  t.index.emplace(e, 0);
  std::size_t level_begin = 0;
  for (std::int64_t level = 1; level <= depth; ++level) {
    const std::size_t level_end = t.elements.size();
    std::vector<std::pair<Key, std::string>> fresh;
    std::unordered_map<Key, std::size_t, KeyHash> seen;
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (const auto& s : group->generators()) {
        Key next = group->multiply(t.elements[i], s.key);
        if (t.index.count(next) || seen.count(next)) continue;
        seen.emplace(next, fresh.size());
        const std::string& w = t.words[i];
        fresh.emplace_back(std::move(next), (w == "e" ? std::string() : w + " ") + s.label);
      }
      if (t.elements.size() + fresh.size() > budget) {
        throw ResourceError(group->name() + ": ball enumeration to radius " +
                            std::to_string(depth) + " exceeds the element budget of " +
                            std::to_string(budget) + "; shrink the radius or raise the budget");
      }
    }
    std::sort(fresh.begin(), fresh.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [k, w] : fresh) {
      t.index.emplace(k, static_cast<std::uint32_t>(t.elements.size()));
      t.elements.push_back(std::move(k));
      t.lengths.push_back(level);
      t.words.push_back(std::move(w));
    }
    t.sphere_sizes.push_back(fresh.size());
    level_begin = level_end;
  }
  // Inverses of every enumerated element must cancel.
  for (const auto& g : t.elements) {
    if (group->multiply(g, group->invert(g)) != e) {
      throw IntegrityError(group->name() + ": g * g^-1 != e for an enumerated element");
    }
  }
  return t;
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

std::filesystem::path cache_file(const GroupModel& g, std::int64_t depth) {
  return cache_directory() / (sanitize(g.name()) + "_d" + std::to_string(depth) + ".json");
}

}  // namespace

BallTable enumerate_ball(const GroupPtr& group, std::int64_t depth, const BallOptions& options) {
  if (depth < 0) throw DomainError("ball radius must be nonnegative");
  if (options.use_cache) {
    if (auto cached = load_ball_table(group, depth)) return std::move(*cached);
  }
  BallTable t = bfs(group, depth, options.element_budget);
  if (options.stabilization_check) {
    if (auto finer = group->refined()) {
      const BallTable check = bfs(finer, depth, options.element_budget);
      if (check.sphere_sizes != t.sphere_sizes) {
        throw IntegrityError(group->name() + ": sphere sizes change under " + finer->name() +
                             " up to radius " + std::to_string(depth) +
                             "; the truncated model is not faithful, use a deeper tree");
      }
    }
  }
  if (options.use_cache) store_ball_table(t);
  return t;
}

std::int64_t BallSpec::distance_of(const Key& a, const Key& b) const {
  const auto len = table.length_of(group->multiply(group->invert(a), b));
  if (!len) throw IntegrityError(group->name() + ": g^-1 h missing from the length table");
  return *len;
}

BallSpec make_ball(const GroupPtr& group, std::int64_t radius, const BallOptions& options) {
  if (radius < 0) throw DomainError("ball radius must be nonnegative");
  BallSpec spec;
  spec.group = group;
  spec.radius = radius;
  spec.table = enumerate_ball(group, 2 * radius, options);
  const std::size_t n = spec.table.ball_size(radius);
  std::vector<Key> inverses(n);
  for (std::size_t i = 0; i < n; ++i) inverses[i] = group->invert(spec.table.elements[i]);
  std::vector<std::int32_t> flat(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto len = spec.table.length_of(group->multiply(inverses[i], spec.table.elements[j]));
      if (!len) {
        throw IntegrityError(group->name() + ": g^-1 h escaped B(e,2N); canonical forms collide");
      }
      flat[i * n + j] = flat[j * n + i] = static_cast<std::int32_t>(*len);
    }
  }
  std::vector<std::string> labels(n);
  bool lattice = true;
  std::vector<std::vector<std::int64_t>> coords;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& k = spec.table.elements[i];
    auto text = group->format(k);
    labels[i] = text.empty() ? spec.table.words[i] : std::move(text);
    if (lattice) {
      auto c = group->lattice_coordinates(k);
      if (c) coords.push_back(std::move(*c));
      else lattice = false;
    }
  }
  auto space = std::make_shared<FiniteMetricSpace>(
      group->name() + "@" + std::to_string(radius), std::move(labels),
      std::make_shared<MatrixOracle>(n, std::move(flat)));
  if (lattice) space->set_coordinates(std::move(coords));
  space->set_provenance("word metric of " + group->name() + " with " + group->generating_set());
  spec.space = std::move(space);
  return spec;
}

SpacePtr ball(const GroupPtr& group, std::int64_t radius, const BallOptions& options) {
  return make_ball(group, radius, options).space;
}

// ------------------------------------------------------------------ cache --

std::filesystem::path cache_directory() {
  if (const char* dir = std::getenv("DCG_CACHE_DIR"); dir && *dir) return dir;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg)
    return std::filesystem::path(xdg) / "dcgrowth";
  if (const char* home = std::getenv("HOME"); home && *home)
    return std::filesystem::path(home) / ".cache" / "dcgrowth";
  return ".dcg-cache";
}

void store_ball_table(const BallTable& table) {
  nlohmann::json j;
  j["schema"] = "dcg.balltable/1";
  j["group"] = table.group->name();
  j["generating_set"] = table.group->generating_set();
  j["depth"] = table.depth;
  j["elements"] = table.elements;
  j["lengths"] = table.lengths;
  j["words"] = table.words;
  j["sphere_sizes"] = table.sphere_sizes;
  const auto path = cache_file(*table.group, table.depth);
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump();
    if (!out) throw ResourceError("cannot write ball cache file " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<BallTable> load_ball_table(const GroupPtr& group, std::int64_t depth) {
  const auto path = cache_file(*group, depth);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("schema") != "dcg.balltable/1" || j.at("group") != group->name() ||
        j.at("depth") != depth) {
      return std::nullopt;
    }
    BallTable t;
    t.group = group;
    t.depth = depth;
    t.elements = j.at("elements").get<std::vector<Key>>();
    t.lengths = j.at("lengths").get<std::vector<std::int64_t>>();
    t.words = j.at("words").get<std::vector<std::string>>();
    t.sphere_sizes = j.at("sphere_sizes").get<std::vector<std::size_t>>();
    // Re-verify: sphere sizes must match the length column exactly.
    std::vector<std::size_t> counted(static_cast<std::size_t>(depth) + 1, 0);
    if (t.lengths.size() != t.elements.size() || t.words.size() != t.elements.size())
      throw IntegrityError("column sizes differ");
    for (std::size_t i = 0; i < t.lengths.size(); ++i) {
      const auto l = t.lengths[i];
      if (l < 0 || l > depth || (i > 0 && l < t.lengths[i - 1]))
        throw IntegrityError("length column out of order");
      ++counted[static_cast<std::size_t>(l)];
    }
    if (counted != t.sphere_sizes || t.elements.empty() || t.elements[0] != group->identity())
      throw IntegrityError("sphere sizes disagree with the length column");
    rebuild_index(t);
    return t;
  } catch (const IntegrityError& e) {
    throw IntegrityError("ball cache " + path.string() + " failed verification: " + e.what());
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

std::vector<std::filesystem::path> list_cache() {
  std::vector<std::filesystem::path> out;
  const auto dir = cache_directory();
  if (!std::filesystem::exists(dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t clear_cache() {
  std::size_t removed = 0;
  for (const auto& p : list_cache()) removed += std::filesystem::remove(p) ? 1 : 0;
  return removed;
}

}  // namespace dcg
