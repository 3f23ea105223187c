#include <algorithm>

#include "dcg/errors.hpp"
#include "dcg/property_a.hpp"

namespace dcg {

SparseL1Vector SparseL1Vector::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  SparseL1Vector v;
  for (auto& [k, q] : entries) {
    if (q < 0) throw DomainError("l1 vectors here are nonnegative");
    if (!v.entries_.empty() && v.entries_.back().first == k)
      v.entries_.back().second += q;
    else
      v.entries_.emplace_back(k, std::move(q));
  }
  v.entries_.erase(std::remove_if(v.entries_.begin(), v.entries_.end(), [](const Entry& e) { return e.second == 0; }),
                   v.entries_.end());
  return v;
}

SparseL1Vector SparseL1Vector::point_mass(Key k) {
  SparseL1Vector v;
  v.entries_.emplace_back(k, Rational(1));
  return v;
}

Rational SparseL1Vector::norm() const {
  Rational s = 0;
  for (const auto& e : entries_) s += e.second;
  return s;
}

Rational SparseL1Vector::at(Key k) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), k,
                             [](const Entry& e, Key key) { return e.first < key; });
  return it != entries_.end() && it->first == k ? it->second : Rational(0);
}

Rational l1_distance(const SparseL1Vector& a, const SparseL1Vector& b) {
  Rational s = 0;
  auto i = a.entries_.begin(), j = b.entries_.begin();
  while (i != a.entries_.end() || j != b.entries_.end()) {
    if (j == b.entries_.end() || (i != a.entries_.end() && i->first < j->first)) {
      s += i->second;
      ++i;
    } else if (i == a.entries_.end() || j->first < i->first) {
      s += j->second;
      ++j;
    } else {
      s += abs(i->second - j->second);
      ++i;
      ++j;
    }
  }
  return s;
}

Json SparseL1Vector::to_json() const {
  Json out = Json::array();
  for (const auto& [k, q] : entries_) out.push_back(Json::array({k, q.get_num().get_str(), q.get_den().get_str()}));
  return out;
}

SparseL1Vector SparseL1Vector::from_json(const Json& j) {
  std::vector<Entry> entries;
  try {
    for (const auto& t : j) {
      Rational q(mpz_class(t.at(1).get<std::string>()), mpz_class(t.at(2).get<std::string>()));
      q.canonicalize();
      entries.emplace_back(t.at(0).get<Key>(), q);
    }
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed sparse vector: ") + e.what());
  }
  return from_entries(std::move(entries));
}

SparseL1Vector xi(std::vector<SparseL1Vector::Key> keys) {
  if (keys.empty()) throw DomainError("xi of an empty set");
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  const Rational w(1, static_cast<unsigned long>(keys.size()));
  std::vector<SparseL1Vector::Entry> e;
  for (auto k : keys) e.emplace_back(k, w);
  return SparseL1Vector::from_entries(std::move(e));
}

}  // namespace dcg
