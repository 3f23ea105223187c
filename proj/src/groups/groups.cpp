#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "dcg/errors.hpp"
#include "dcg/group.hpp"

namespace dcg {

std::string GroupModel::format(const Key&) const { return {}; }

std::string GroupModel::generating_set() const {
  std::string out = "S={";
  const auto& gens = generators();
  for (std::size_t i = 0; i < gens.size(); ++i) out += (i ? "," : "") + gens[i].label;
  return out + "}";
}

namespace {

// ---------------------------------------------------------------- Z^d -----

class FreeAbelian final : public GroupModel {
 public:
  explicit FreeAbelian(int rank) : rank_(rank) {
    for (int i = 0; i < rank; ++i) {
      Key plus(rank, 0), minus(rank, 0);
      plus[i] = 1;
      minus[i] = -1;
      gens_.push_back({"+e" + std::to_string(i + 1), plus});
      gens_.push_back({"-e" + std::to_string(i + 1), minus});
    }
  }
  std::string name() const override { return "z^" + std::to_string(rank_); }
  Key identity() const override { return Key(rank_, 0); }
  Key multiply(const Key& a, const Key& b) const override {
    Key out(a);
    for (int i = 0; i < rank_; ++i) out[i] += b[i];
    return out;
  }
  Key invert(const Key& a) const override {
    Key out(a);
    for (auto& v : out) v = -v;
    return out;
  }
  const std::vector<Generator>& generators() const override { return gens_; }
  std::string format(const Key& k) const override {
    std::string s = "(";
    for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
    return s + ")";
  }
  std::string generating_set() const override {
    return "standard basis of Z^" + std::to_string(rank_) + " and inverses (l1 word metric)";
  }
  std::optional<std::vector<std::int64_t>> lattice_coordinates(const Key& k) const override {
    return k;
  }

 private:
  int rank_;
  std::vector<Generator> gens_;
};

// ------------------------------------------------------------- free:k -----

class FreeGroup final : public GroupModel {
 public:
  explicit FreeGroup(int rank) : rank_(rank) {
    for (int i = 1; i <= rank; ++i) {
      gens_.push_back({letter(i), Key{i}});
      gens_.push_back({letter(-i), Key{-i}});
    }
  }
  std::string name() const override { return "free:" + std::to_string(rank_); }
  Key identity() const override { return {}; }
  Key multiply(const Key& a, const Key& b) const override {
    Key out(a);
    std::size_t j = 0;
    while (j < b.size() && !out.empty() && out.back() == -b[j]) {
      out.pop_back();
      ++j;
    }
    out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(j), b.end());
    return out;
  }
  Key invert(const Key& a) const override {
    Key out(a.rbegin(), a.rend());
    for (auto& v : out) v = -v;
    return out;
  }
  const std::vector<Generator>& generators() const override { return gens_; }
  std::string format(const Key& k) const override {
    if (k.empty()) return "e";
    std::string s;
    for (auto v : k) s += letter(static_cast<int>(v));
    return s;
  }
  std::string generating_set() const override {
    return "free basis a,b,... and inverses A,B,... (reduced words)";
  }

 private:
  static std::string letter(int i) {
    const char base = i > 0 ? 'a' : 'A';
    return std::string(1, static_cast<char>(base + std::abs(i) - 1));
  }
  int rank_;
  std::vector<Generator> gens_;
};

// ----------------------------------------------------------- cyclic:m -----

class Cyclic final : public GroupModel {
 public:
  explicit Cyclic(std::int64_t order) : order_(order) {
    gens_.push_back({"+1", Key{1 % order}});
    if (order > 2) gens_.push_back({"-1", Key{order - 1}});
  }
  std::string name() const override { return "cyclic:" + std::to_string(order_); }
  Key identity() const override { return Key{0}; }
  Key multiply(const Key& a, const Key& b) const override { return Key{(a[0] + b[0]) % order_}; }
  Key invert(const Key& a) const override { return Key{(order_ - a[0]) % order_}; }
  const std::vector<Generator>& generators() const override { return gens_; }
  std::string format(const Key& k) const override { return std::to_string(k[0]); }

 private:
  std::int64_t order_;
  std::vector<Generator> gens_;
};

// ------------------------------------------------------------ product -----

// Key layout: [len(a), a..., b...].
class DirectProduct final : public GroupModel {
 public:
  DirectProduct(GroupPtr g, GroupPtr h) : g_(std::move(g)), h_(std::move(h)) {
    for (const auto& s : g_->generators())
      gens_.push_back({"(" + s.label + ",1)", pack(s.key, h_->identity())});
    for (const auto& t : h_->generators())
      gens_.push_back({"(1," + t.label + ")", pack(g_->identity(), t.key)});
  }
  std::string name() const override {
    return "product(" + g_->name() + "," + h_->name() + ")";
  }
  Key identity() const override { return pack(g_->identity(), h_->identity()); }
  Key multiply(const Key& a, const Key& b) const override {
    auto [a1, a2] = unpack(a);
    auto [b1, b2] = unpack(b);
    return pack(g_->multiply(a1, b1), h_->multiply(a2, b2));
  }
  Key invert(const Key& a) const override {
    auto [a1, a2] = unpack(a);
    return pack(g_->invert(a1), h_->invert(a2));
  }
  const std::vector<Generator>& generators() const override { return gens_; }
  std::string format(const Key& k) const override {
    auto [a, b] = unpack(k);
    const auto fa = g_->format(a), fb = h_->format(b);
    if (fa.empty() || fb.empty()) return {};
    return "(" + fa + "," + fb + ")";
  }
  std::string generating_set() const override {
    return "S_G x {1} u {1} x S_H with S_G: " + g_->generating_set() +
           "; S_H: " + h_->generating_set();
  }
  std::optional<std::vector<std::int64_t>> lattice_coordinates(const Key& k) const override {
    auto [a, b] = unpack(k);
    auto ca = g_->lattice_coordinates(a);
    auto cb = h_->lattice_coordinates(b);
    if (!ca || !cb) return std::nullopt;
    ca->insert(ca->end(), cb->begin(), cb->end());
    return ca;
  }
  std::shared_ptr<const GroupModel> refined() const override {
    auto rg = g_->refined(), rh = h_->refined();
    if (!rg && !rh) return nullptr;
    return std::make_shared<DirectProduct>(rg ? rg : g_, rh ? rh : h_);
  }

 private:
  static Key pack(const Key& a, const Key& b) {
    Key out;
    out.reserve(1 + a.size() + b.size());
    out.push_back(static_cast<std::int64_t>(a.size()));
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }
  static std::pair<Key, Key> unpack(const Key& k) {
    const auto n = static_cast<std::ptrdiff_t>(k[0]);
    return {Key(k.begin() + 1, k.begin() + 1 + n), Key(k.begin() + 1 + n, k.end())};
  }
  GroupPtr g_, h_;
  std::vector<Generator> gens_;
};

// ------------------------------------------------------------- wreath -----

// Key layout: [len(h), h..., count, (len(p), p..., len(v), v...)*] with lamp
// positions p strictly increasing in key order and values v != identity.
using LampMap = std::map<Key, Key>;

Key read_block(const Key& k, std::size_t& at) {
  const auto n = static_cast<std::size_t>(k.at(at++));
  Key out(k.begin() + static_cast<std::ptrdiff_t>(at),
          k.begin() + static_cast<std::ptrdiff_t>(at + n));
  at += n;
  return out;
}

void write_block(Key& out, const Key& block) {
  out.push_back(static_cast<std::int64_t>(block.size()));
  out.insert(out.end(), block.begin(), block.end());
}

class Wreath final : public GroupModel {
 public:
  Wreath(GroupPtr lamps, GroupPtr base) : g_(std::move(lamps)), h_(std::move(base)) {
    for (const auto& s : g_->generators()) {
      LampMap f;
      f[h_->identity()] = s.key;
      gens_.push_back({"lamp" + s.label, pack(f, h_->identity())});
    }
    for (const auto& t : h_->generators()) gens_.push_back({"walk" + t.label, pack({}, t.key)});
  }
  std::string name() const override { return "wreath(" + g_->name() + "," + h_->name() + ")"; }
  Key identity() const override { return pack({}, h_->identity()); }

  // (f1,h1)(f2,h2) = (f1 * (h1.f2), h1 h2) with (h.f)(x) = f(h^{-1} x).
  Key multiply(const Key& a, const Key& b) const override {
    auto [f1, h1] = unpack(a);
    auto [f2, h2] = unpack(b);
    const Key e = g_->identity();
    for (const auto& [pos, val] : f2) {
      const Key moved = h_->multiply(h1, pos);
      auto it = f1.find(moved);
      Key merged = it == f1.end() ? val : g_->multiply(it->second, val);
      if (merged == e) {
        if (it != f1.end()) f1.erase(it);
      } else {
        f1[moved] = std::move(merged);
      }
    }
    return pack(f1, h_->multiply(h1, h2));
  }

  // (f,h)^{-1} = (h^{-1}.f^{-1}, h^{-1}).
  Key invert(const Key& a) const override {
    auto [f, h] = unpack(a);
    const Key hinv = h_->invert(h);
    LampMap out;
    for (const auto& [pos, val] : f) out[h_->multiply(hinv, pos)] = g_->invert(val);
    return pack(out, hinv);
  }
  const std::vector<Generator>& generators() const override { return gens_; }
  std::string format(const Key& k) const override {
    auto [f, h] = unpack(k);
    const auto fh = h_->format(h);
    if (fh.empty()) return {};
    std::string s = "[";
    bool first = true;
    for (const auto& [pos, val] : f) {
      const auto fp = h_->format(pos), fv = g_->format(val);
      if (fp.empty() || fv.empty()) return {};
      s += (first ? "" : ",") + fp + ":" + fv;
      first = false;
    }
    return s + "]@" + fh;
  }
  std::string generating_set() const override {
    return "lamp-at-origin {(delta_e,s),e} for s in S_lamp plus walk {(0,t)} for t in S_base; "
           "S_lamp: " + g_->generating_set() + "; S_base: " + h_->generating_set();
  }
  std::shared_ptr<const GroupModel> refined() const override {
    auto rg = g_->refined(), rh = h_->refined();
    if (!rg && !rh) return nullptr;
    return std::make_shared<Wreath>(rg ? rg : g_, rh ? rh : h_);
  }

  static Key pack(const LampMap& f, const Key& h) {
    Key out;
    write_block(out, h);
    out.push_back(static_cast<std::int64_t>(f.size()));
    for (const auto& [pos, val] : f) {
      write_block(out, pos);
      write_block(out, val);
    }
    return out;
  }
  static std::pair<LampMap, Key> unpack(const Key& k) {
    std::size_t at = 0;
    Key h = read_block(k, at);
    const auto count = static_cast<std::size_t>(k.at(at++));
    LampMap f;
    for (std::size_t i = 0; i < count; ++i) {
      Key pos = read_block(k, at);
      Key val = read_block(k, at);
      f.emplace(std::move(pos), std::move(val));
    }
    return {std::move(f), std::move(h)};
  }

 private:
  GroupPtr g_, h_;
  std::vector<Generator> gens_;
};

// --------------------------------------------------------- grigorchuk -----

// Elements are portraits of automorphisms of the binary tree truncated at
// `depth` levels: one swap bit per vertex of levels 0..depth-1, vertex j of
// level l stored at bit 2^l - 1 + j. Composition applies the right factor
// first: (gh)(v) = g(h(v)).
class Grigorchuk final : public GroupModel {
 public:
  explicit Grigorchuk(int depth) : depth_(depth) {
    if (depth < 1 || depth > 20) throw ConfigError("grigorchuk depth must be in 1..20");
    vertices_ = (std::size_t{1} << depth) - 1;
    words_ = (vertices_ + 63) / 64;
    const char* names = "abcd";
    for (int g = 0; g < 4; ++g) {
      Key k(words_, 0);
      fill(k, static_cast<State>(g), 0, 0);
      gens_.push_back({std::string(1, names[g]), k});
    }
  }
  std::string name() const override { return "grigorchuk:" + std::to_string(depth_); }
  Key identity() const override { return Key(words_, 0); }
  Key multiply(const Key& g, const Key& h) const override {
    Key out(words_, 0);
    std::vector<std::uint32_t> img{0}, next;
    for (int level = 0; level < depth_; ++level) {
      const std::size_t offset = (std::size_t{1} << level) - 1;
      next.assign(img.size() * 2, 0);
      for (std::size_t j = 0; j < img.size(); ++j) {
        const bool hb = bit(h, offset + j);
        const bool gb = bit(g, offset + img[j]);
        if (hb != gb) set(out, offset + j);
        next[2 * j] = 2 * img[j] + (hb ? 1 : 0);
        next[2 * j + 1] = 2 * img[j] + (hb ? 0 : 1);
      }
      img.swap(next);
    }
    return out;
  }
  Key invert(const Key& g) const override {
    Key out(words_, 0);
    std::vector<std::uint32_t> img{0}, next;
    for (int level = 0; level < depth_; ++level) {
      const std::size_t offset = (std::size_t{1} << level) - 1;
      next.assign(img.size() * 2, 0);
      for (std::size_t j = 0; j < img.size(); ++j) {
        const bool gb = bit(g, offset + j);
        if (gb) set(out, offset + img[j]);
        next[2 * j] = 2 * img[j] + (gb ? 1 : 0);
        next[2 * j + 1] = 2 * img[j] + (gb ? 0 : 1);
      }
      img.swap(next);
    }
    return out;
  }
  const std::vector<Generator>& generators() const override { return gens_; }
  std::string generating_set() const override {
    return "S={a,b,c,d}; a swaps the subtrees, b=(a,c), c=(a,d), d=(1,b); tree depth " +
           std::to_string(depth_);
  }
  std::shared_ptr<const GroupModel> refined() const override {
    return std::make_shared<Grigorchuk>(depth_ + 2);
  }

 private:
  enum State { A = 0, B = 1, C = 2, D = 3, Id = 4 };

  void fill(Key& k, State s, int level, std::size_t j) const {
    if (level >= depth_ || s == Id) return;
    const std::size_t offset = (std::size_t{1} << level) - 1;
    if (s == A) {
      set(k, offset + j);
      return;
    }
    static constexpr State left[] = {Id, A, A, Id};
    static constexpr State right[] = {Id, C, D, B};
    fill(k, left[s], level + 1, 2 * j);
    fill(k, right[s], level + 1, 2 * j + 1);
  }
  static bool bit(const Key& k, std::size_t i) {
    return (static_cast<std::uint64_t>(k[i >> 6]) >> (i & 63)) & 1u;
  }
  static void set(Key& k, std::size_t i) {
    k[i >> 6] = static_cast<std::int64_t>(static_cast<std::uint64_t>(k[i >> 6]) |
                                          (std::uint64_t{1} << (i & 63)));
  }

  int depth_;
  std::size_t vertices_ = 0;
  std::size_t words_ = 0;
  std::vector<Generator> gens_;
};

// ------------------------------------------------------------- parser -----

class Parser {
 public:
  Parser(const std::string& text, std::int64_t radius) : text_(text), radius_(radius) {}

  GroupPtr parse() {
    auto g = group();
    skip();
    if (pos_ != text_.size()) fail("trailing characters");
    return g;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("invalid group descriptor '" + text_ + "': " + why + " at offset " +
                      std::to_string(pos_));
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(const std::string& token) {
    skip();
    if (text_.compare(pos_, token.size(), token) == 0) {
      pos_ += token.size();
      return true;
    }
    return false;
  }
  void expect(const std::string& token) {
    if (!eat(token)) fail("expected '" + token + "'");
  }
  std::int64_t integer() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return std::stoll(text_.substr(start, pos_ - start));
  }
  std::pair<GroupPtr, GroupPtr> pair_args() {
    expect("(");
    auto a = group();
    expect(",");
    auto b = group();
    expect(")");
    return {a, b};
  }
  GroupPtr group() {
    if (eat("z^")) {
      const auto d = integer();
      if (d < 1) fail("rank must be >= 1");
      return free_abelian(static_cast<int>(d));
    }
    if (eat("free:")) {
      const auto k = integer();
      if (k < 1) fail("rank must be >= 1");
      return free_group(static_cast<int>(k));
    }
    if (eat("cyclic:")) {
      const auto m = integer();
      if (m < 2) fail("order must be >= 2");
      return cyclic(m);
    }
    if (eat("grigorchuk")) {
      if (eat(":")) return grigorchuk(static_cast<int>(integer()));
      return grigorchuk(default_grigorchuk_depth(radius_));
    }
    if (eat("product")) {
      auto [a, b] = pair_args();
      return direct_product(a, b);
    }
    if (eat("wreath")) {
      auto [a, b] = pair_args();
      return wreath(a, b);
    }
    fail("unknown group");
  }

  const std::string& text_;
  std::int64_t radius_;
  std::size_t pos_ = 0;
};

}  // namespace

GroupPtr free_abelian(int rank) {
  if (rank < 1) throw ConfigError("free abelian rank must be >= 1");
  return std::make_shared<FreeAbelian>(rank);
}
GroupPtr free_group(int rank) {
  if (rank < 1) throw ConfigError("free group rank must be >= 1");
  return std::make_shared<FreeGroup>(rank);
}
GroupPtr cyclic(std::int64_t order) {
  if (order < 2) throw ConfigError("cyclic order must be >= 2");
  return std::make_shared<Cyclic>(order);
}
GroupPtr direct_product(GroupPtr g, GroupPtr h) {
  return std::make_shared<DirectProduct>(std::move(g), std::move(h));
}
GroupPtr wreath(GroupPtr lamps, GroupPtr base) {
  return std::make_shared<Wreath>(std::move(lamps), std::move(base));
}
GroupPtr grigorchuk(int depth) { return std::make_shared<Grigorchuk>(depth); }

int default_grigorchuk_depth(std::int64_t radius) {
  const double target = std::max<double>(1.0, 4.0 * static_cast<double>(radius));
  return std::max(12, static_cast<int>(std::ceil(std::log2(target))) + 6);
}

GroupPtr parse_group(const std::string& descriptor, std::int64_t radius) {
  return Parser(descriptor, radius).parse();
}

WreathParts wreath_parts(const Key& element) {
  auto [lamps, base] = Wreath::unpack(element);
  WreathParts parts{std::move(base), {}};
  for (auto& [pos, val] : lamps) parts.lamps.emplace_back(pos, val);
  return parts;
}

}  // namespace dcg
