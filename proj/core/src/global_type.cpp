#include "fwdlab/global_type.hpp"

#include "fwdlab/context.hpp"

#include <algorithm>

namespace fwdlab {

namespace {

void check_distinct(const std::vector<Name>& many, Name one, Name other) {
  NameSet seen;
  auto put = [&](Name n) {
    if (!n.valid()) return;
    if (contains(seen, n))
      throw ContextError("duplicate endpoint '" + n.str() + "' in one global type constructor");
    insert_name(seen, n);
  };
  for (auto x : many) put(x);
  put(one);
  put(other);
}

GlobalPtr node(GlobalKind k, std::vector<Name> many, Name one, Name other, PropPtr ty,
               GlobalPtr g, GlobalPtr h) {
  check_distinct(many, one, other);
  auto t = std::make_shared<GlobalType>();
  t->kind = k;
  t->many = std::move(many);
  t->one = one;
  t->other = other;
  t->ty = std::move(ty);
  t->g = std::move(g);
  t->h = std::move(h);
  return t;
}

} // namespace

size_t GlobalType::size() const {
  size_t n = 1;
  if (g) n += g->size();
  if (h) n += h->size();
  return n;
}

GlobalPtr g_close_all(std::vector<Name> xs, Name y) {
  if (xs.empty()) throw ContextError("close needs at least one endpoint");
  return node(GlobalKind::CloseAll, std::move(xs), y, Name{}, nullptr, nullptr, nullptr);
}

GlobalPtr g_gather(std::vector<Name> xs, Name y, GlobalPtr g, GlobalPtr h) {
  if (xs.empty()) throw ContextError("gather needs at least one endpoint");
  return node(GlobalKind::Gather, std::move(xs), y, Name{}, nullptr, std::move(g), std::move(h));
}

GlobalPtr g_branch(Name x, std::vector<Name> ys, GlobalPtr g, GlobalPtr h) {
  if (ys.empty()) throw ContextError("branch needs at least one endpoint");
  return node(GlobalKind::Branch, std::move(ys), x, Name{}, nullptr, std::move(g), std::move(h));
}

GlobalPtr g_serve(Name x, std::vector<Name> ys, GlobalPtr g) {
  if (ys.empty()) throw ContextError("serve needs at least one endpoint");
  return node(GlobalKind::Serve, std::move(ys), x, Name{}, nullptr, std::move(g), nullptr);
}

GlobalPtr g_axiom(Name x, PropPtr a, Name y) {
  return node(GlobalKind::GAxiom, {}, x, y, std::move(a), nullptr, nullptr);
}

NameSet global_free_names(const GlobalPtr& g) {
  NameSet out;
  for (auto x : g->many) insert_name(out, x);
  if (g->one.valid()) insert_name(out, g->one);
  if (g->other.valid()) insert_name(out, g->other);
  if (g->g) out = set_union(out, global_free_names(g->g));
  if (g->h) out = set_union(out, global_free_names(g->h));
  return out;
}

namespace {
bool geq(const GlobalPtr& a, const GlobalPtr& b, bool mod_order) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->one != b->one || a->other != b->other) return false;
  if ((a->ty == nullptr) != (b->ty == nullptr)) return false;
  if (a->ty && !prop_eq(a->ty, b->ty)) return false;
  if (a->many.size() != b->many.size()) return false;
  if (mod_order) {
    auto ma = a->many;
    auto mb = b->many;
    std::sort(ma.begin(), ma.end());
    std::sort(mb.begin(), mb.end());
    if (ma != mb) return false;
  } else if (a->many != b->many) {
    return false;
  }
  if ((a->g == nullptr) != (b->g == nullptr)) return false;
  if ((a->h == nullptr) != (b->h == nullptr)) return false;
  if (a->g && !geq(a->g, b->g, mod_order)) return false;
  if (a->h && !geq(a->h, b->h, mod_order)) return false;
  return true;
}
} // namespace

bool global_eq(const GlobalPtr& a, const GlobalPtr& b) { return geq(a, b, false); }
bool global_eq_mod_order(const GlobalPtr& a, const GlobalPtr& b) { return geq(a, b, true); }

} // namespace fwdlab
