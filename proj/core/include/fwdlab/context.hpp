#pragma once

#include "fwdlab/prop.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace fwdlab {

struct ContextError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EntryKind : uint8_t { Active, Buffer, LBox, RBox, QBox };

// One typed slot of a forwarder context:
//   Active   x:A
//   Buffer   [msg:msgTy] ep:ty     message received on ep, not yet forwarded
//   L/R/QBox members with pivot ep:ty
struct Entry {
  EntryKind kind;
  Name ep;
  PropPtr ty;
  Name msg;
  PropPtr msgTy;
  std::vector<std::pair<Name, PropPtr>> members;
};

Entry e_active(Name x, PropPtr a);
Entry e_buffer(Name msg, PropPtr msgTy, Name blocked, PropPtr blockedTy);
// Empty boxes collapse to the active pivot on construction.
Entry e_box(EntryKind k, std::vector<std::pair<Name, PropPtr>> members, Name pivot,
            PropPtr pivotTy);

bool entry_eq(const Entry& a, const Entry& b);

// Ordered sequence of entries with multiset equality plus the close flag.
// Endpoint names are unique across entries, buffer messages and box
// members; insertion rejects duplicates.
class Context {
public:
  Context() = default;

  static Context basic(std::vector<std::pair<Name, PropPtr>> actives);

  const std::vector<Entry>& entries() const { return entries_; }
  bool star() const { return star_; }
  void set_star(bool s) { star_ = s; }

  void add(Entry e); // throws ContextError on duplicate endpoint names
  void add_active(Name x, PropPtr a) { add(e_active(x, a)); }

  // Remove the entry at index i (entry order preserved otherwise).
  Entry take(size_t i);

  bool empty() const { return entries_.empty() && !star_; }
  size_t size() const { return entries_.size(); }

  // Index of the entry owning `x` as ep; box membership and buffer
  // messages are found through the *_of helpers instead.
  std::optional<size_t> find(Name x) const;
  // Entry index whose box contains x as a member.
  std::optional<size_t> box_of(Name x) const;
  // Entry index whose buffer message is x.
  std::optional<size_t> buffer_of_msg(Name x) const;

  bool mentions(Name x) const;
  NameSet names() const; // every endpoint, message and member name

  bool is_basic() const; // only Active entries, no star
  std::vector<std::pair<Name, PropPtr>> actives() const;

  bool operator==(const Context& o) const; // multiset equality + star
  bool operator!=(const Context& o) const { return !(*this == o); }

private:
  std::vector<Entry> entries_;
  bool star_ = false;
};

NameSet free_names(const Context& ctx);

} // namespace fwdlab
