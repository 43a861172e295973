#include "fwdlab/names.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <unordered_map>

namespace fwdlab {

namespace {

struct InternTable {
  std::mutex mu;
  std::unordered_map<std::string, uint32_t> ids;
  std::vector<std::string> spellings{""}; // id 0 reserved for the invalid name
};

InternTable& table() {
  static InternTable t;
  return t;
}

std::atomic<uint64_t> fresh_counter{0};

} // namespace

Name intern(std::string_view text) {
  auto& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  std::string key(text);
  auto it = t.ids.find(key);
  if (it != t.ids.end()) return Name(it->second);
  uint32_t id = static_cast<uint32_t>(t.spellings.size());
  t.spellings.push_back(key);
  t.ids.emplace(std::move(key), id);
  return Name(id);
}

const std::string& Name::str() const {
  auto& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  return t.spellings[id_];
}

bool Name::operator<(const Name& o) const {
  if (id_ == o.id_) return false;
  return str() < o.str();
}

Name fresh(std::string_view base) {
  auto hash = base.rfind('#');
  if (hash != std::string_view::npos && hash + 1 < base.size()) {
    bool digits = true;
    for (size_t i = hash + 1; i < base.size(); ++i)
      digits = digits && base[i] >= '0' && base[i] <= '9';
    if (digits) base = base.substr(0, hash);
  }
  uint64_t n = ++fresh_counter;
  return intern(std::string(base) + "#" + std::to_string(n));
}

Name fresh(Name base) { return fresh(std::string_view(base.str())); }

Name primed(Name base) { return intern(base.str() + "'"); }

bool contains(const NameSet& s, Name n) {
  return std::binary_search(s.begin(), s.end(), n);
}

void insert_name(NameSet& s, Name n) {
  auto it = std::lower_bound(s.begin(), s.end(), n);
  if (it == s.end() || *it != n) s.insert(it, n);
}

NameSet set_union(const NameSet& a, const NameSet& b) {
  NameSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

NameSet set_minus(const NameSet& a, Name n) {
  NameSet out;
  out.reserve(a.size());
  for (auto x : a)
    if (x != n) out.push_back(x);
  return out;
}

NameSet set_minus(const NameSet& a, const NameSet& b) {
  NameSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool intersects(const NameSet& a, const NameSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j)
      ++i;
    else
      ++j;
  }
  return false;
}

} // namespace fwdlab
