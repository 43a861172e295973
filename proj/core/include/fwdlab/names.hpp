#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fwdlab {

// Interned endpoint/atom identifier. Comparison and hashing are by id;
// the spelling is recovered through the global intern table.
class Name {
public:
  Name() : id_(0) {}

  bool valid() const { return id_ != 0; }
  uint32_t id() const { return id_; }
  const std::string& str() const;

  bool operator==(const Name& o) const { return id_ == o.id_; }
  bool operator!=(const Name& o) const { return id_ != o.id_; }
  // Orders by spelling so printed contexts and canonical links are stable
  // across runs regardless of interning order.
  bool operator<(const Name& o) const;

private:
  explicit Name(uint32_t id) : id_(id) {}
  uint32_t id_;
  friend Name intern(std::string_view);
};

// Get-or-create the interned name for `text`.
Name intern(std::string_view text);

// A globally fresh name rendered `base#n`. Strips any existing `#n`
// suffix from `base` first so freshening a fresh name stays readable.
Name fresh(Name base);
Name fresh(std::string_view base);

// `x` becomes `x'`, the paper-style name for a translated endpoint.
Name primed(Name base);

// Sorted unique name sets, the working representation for free/bound names.
using NameSet = std::vector<Name>;

bool contains(const NameSet& s, Name n);
NameSet set_union(const NameSet& a, const NameSet& b);
NameSet set_minus(const NameSet& a, Name n);
NameSet set_minus(const NameSet& a, const NameSet& b);
bool intersects(const NameSet& a, const NameSet& b);
void insert_name(NameSet& s, Name n);

} // namespace fwdlab
