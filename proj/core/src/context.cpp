#include "fwdlab/context.hpp"

namespace fwdlab {

Entry e_active(Name x, PropPtr a) {
  Entry e;
  e.kind = EntryKind::Active;
  e.ep = x;
  e.ty = std::move(a);
  return e;
}

Entry e_buffer(Name msg, PropPtr msgTy, Name blocked, PropPtr blockedTy) {
  Entry e;
  e.kind = EntryKind::Buffer;
  e.ep = blocked;
  e.ty = std::move(blockedTy);
  e.msg = msg;
  e.msgTy = std::move(msgTy);
  return e;
}

Entry e_box(EntryKind k, std::vector<std::pair<Name, PropPtr>> members, Name pivot,
            PropPtr pivotTy) {
  if (members.empty()) return e_active(pivot, std::move(pivotTy)); // [[.]]z:C == z:C
  Entry e;
  e.kind = k;
  e.ep = pivot;
  e.ty = std::move(pivotTy);
  e.members = std::move(members);
  return e;
}

bool entry_eq(const Entry& a, const Entry& b) {
  if (a.kind != b.kind || a.ep != b.ep) return false;
  if (!prop_eq(a.ty, b.ty)) return false;
  switch (a.kind) {
    case EntryKind::Active:
      return true;
    case EntryKind::Buffer:
      return a.msg == b.msg && prop_eq(a.msgTy, b.msgTy);
    default: {
      if (a.members.size() != b.members.size()) return false;
      // member multiset equality
      std::vector<bool> used(b.members.size(), false);
      for (const auto& [n, t] : a.members) {
        bool found = false;
        for (size_t j = 0; j < b.members.size(); ++j) {
          if (used[j]) continue;
          if (b.members[j].first == n && prop_eq(b.members[j].second, t)) {
            used[j] = true;
            found = true;
            break;
          }
        }
        if (!found) return false;
      }
      return true;
    }
  }
}

Context Context::basic(std::vector<std::pair<Name, PropPtr>> actives) {
  Context c;
  for (auto& [n, t] : actives) c.add_active(n, std::move(t));
  return c;
}

void Context::add(Entry e) {
  NameSet incoming;
  insert_name(incoming, e.ep);
  if (e.kind == EntryKind::Buffer) insert_name(incoming, e.msg);
  for (const auto& [n, t] : e.members) {
    if (contains(incoming, n))
      throw ContextError("duplicate endpoint '" + n.str() + "' inside one box");
    insert_name(incoming, n);
  }
  for (auto n : incoming)
    if (mentions(n))
      throw ContextError("duplicate endpoint '" + n.str() + "' in context");
  entries_.push_back(std::move(e));
}

Entry Context::take(size_t i) {
  Entry e = entries_[i];
  entries_.erase(entries_.begin() + static_cast<long>(i));
  return e;
}

std::optional<size_t> Context::find(Name x) const {
  for (size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].ep == x) return i;
  return std::nullopt;
}

std::optional<size_t> Context::box_of(Name x) const {
  for (size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.kind == EntryKind::LBox || e.kind == EntryKind::RBox ||
        e.kind == EntryKind::QBox) {
      for (const auto& [n, t] : e.members)
        if (n == x) return i;
    }
  }
  return std::nullopt;
}

std::optional<size_t> Context::buffer_of_msg(Name x) const {
  for (size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].kind == EntryKind::Buffer && entries_[i].msg == x) return i;
  return std::nullopt;
}

bool Context::mentions(Name x) const {
  for (const auto& e : entries_) {
    if (e.ep == x) return true;
    if (e.kind == EntryKind::Buffer && e.msg == x) return true;
    for (const auto& [n, t] : e.members)
      if (n == x) return true;
  }
  return false;
}

NameSet Context::names() const {
  NameSet out;
  for (const auto& e : entries_) {
    insert_name(out, e.ep);
    if (e.kind == EntryKind::Buffer) insert_name(out, e.msg);
    for (const auto& [n, t] : e.members) insert_name(out, n);
  }
  return out;
}

bool Context::is_basic() const {
  if (star_) return false;
  for (const auto& e : entries_)
    if (e.kind != EntryKind::Active) return false;
  return true;
}

std::vector<std::pair<Name, PropPtr>> Context::actives() const {
  std::vector<std::pair<Name, PropPtr>> out;
  for (const auto& e : entries_)
    if (e.kind == EntryKind::Active) out.emplace_back(e.ep, e.ty);
  return out;
}

bool Context::operator==(const Context& o) const {
  if (star_ != o.star_ || entries_.size() != o.entries_.size()) return false;
  std::vector<bool> used(o.entries_.size(), false);
  for (const auto& e : entries_) {
    bool found = false;
    for (size_t j = 0; j < o.entries_.size(); ++j) {
      if (used[j]) continue;
      if (entry_eq(e, o.entries_[j])) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

NameSet free_names(const Context& ctx) { return ctx.names(); }

} // namespace fwdlab
