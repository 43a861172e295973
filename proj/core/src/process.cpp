#include "fwdlab/process.hpp"

#include <cstdio>
#include <optional>
#include <map>

namespace fwdlab {

namespace {

bool binds_in_p(ProcKind k) {
  return k == ProcKind::Send || k == ProcKind::Recv || k == ProcKind::Client ||
         k == ProcKind::Server;
}

bool is_cut_kind(ProcKind k) {
  return k == ProcKind::Cut || k == ProcKind::CutHalf || k == ProcKind::CutMsg;
}

ProcPtr node(ProcKind k, Name a, Name b, PropPtr ty, ProcPtr p, ProcPtr q) {
  auto t = std::make_shared<Proc>();
  t->kind = k;
  t->a = a;
  t->b = b;
  t->ty = std::move(ty);
  t->p = std::move(p);
  t->q = std::move(q);

  NameSet fn;
  NameSet bn;
  switch (k) {
    case ProcKind::Link:
      insert_name(fn, a);
      insert_name(fn, b);
      break;
    case ProcKind::Close:
      insert_name(fn, a);
      break;
    case ProcKind::Wait:
    case ProcKind::InL:
    case ProcKind::InR:
      fn = t->p->fn;
      insert_name(fn, a);
      bn = t->p->bn;
      break;
    case ProcKind::Case:
      fn = set_union(t->p->fn, t->q->fn);
      insert_name(fn, a);
      bn = set_union(t->p->bn, t->q->bn);
      break;
    case ProcKind::Send:
      fn = set_union(set_minus(t->p->fn, b), t->q->fn);
      insert_name(fn, a);
      bn = set_union(t->p->bn, t->q->bn);
      insert_name(bn, b);
      break;
    case ProcKind::Recv:
    case ProcKind::Client:
    case ProcKind::Server:
      fn = set_minus(t->p->fn, b);
      insert_name(fn, a);
      bn = t->p->bn;
      insert_name(bn, b);
      break;
    case ProcKind::Cut:
    case ProcKind::CutHalf:
    case ProcKind::CutMsg:
      fn = set_union(set_minus(t->p->fn, a), set_minus(t->q->fn, b));
      bn = set_union(t->p->bn, t->q->bn);
      insert_name(bn, a);
      insert_name(bn, b);
      break;
  }
  t->fn = std::move(fn);
  t->bn = std::move(bn);
  return t;
}

} // namespace

size_t Proc::size() const {
  size_t n = 1;
  if (p) n += p->size();
  if (q) n += q->size();
  return n;
}

const NameSet& free_names(const ProcPtr& p) { return p->fn; }

ProcPtr mk_link(Name x, Name y) { return node(ProcKind::Link, x, y, nullptr, nullptr, nullptr); }
ProcPtr mk_close(Name x) { return node(ProcKind::Close, x, Name{}, nullptr, nullptr, nullptr); }
ProcPtr mk_wait(Name x, ProcPtr p) { return node(ProcKind::Wait, x, Name{}, nullptr, std::move(p), nullptr); }
ProcPtr mk_inl(Name x, ProcPtr p) { return node(ProcKind::InL, x, Name{}, nullptr, std::move(p), nullptr); }
ProcPtr mk_inr(Name x, ProcPtr p) { return node(ProcKind::InR, x, Name{}, nullptr, std::move(p), nullptr); }
ProcPtr mk_case(Name x, ProcPtr p, ProcPtr q) {
  return node(ProcKind::Case, x, Name{}, nullptr, std::move(p), std::move(q));
}

ProcPtr mk_send(Name x, Name y, ProcPtr p, ProcPtr q) {
  // y scopes over p only; freshen when it would collide with the subject
  // or leak into the sibling.
  if (y == x || contains(q->fn, y)) {
    Name y2 = fresh(y);
    p = substitute(p, y, y2);
    y = y2;
  }
  return node(ProcKind::Send, x, y, nullptr, std::move(p), std::move(q));
}

ProcPtr mk_recv(Name x, Name y, ProcPtr p) {
  if (y == x) {
    Name y2 = fresh(y);
    p = substitute(p, y, y2);
    y = y2;
  }
  return node(ProcKind::Recv, x, y, nullptr, std::move(p), nullptr);
}

ProcPtr mk_client(Name x, Name y, ProcPtr p) {
  if (y == x) {
    Name y2 = fresh(y);
    p = substitute(p, y, y2);
    y = y2;
  }
  return node(ProcKind::Client, x, y, nullptr, std::move(p), nullptr);
}

ProcPtr mk_server(Name x, Name y, ProcPtr p) {
  if (y == x) {
    Name y2 = fresh(y);
    p = substitute(p, y, y2);
    y = y2;
  }
  return node(ProcKind::Server, x, y, nullptr, std::move(p), nullptr);
}

namespace {
ProcPtr mk_cutlike(ProcKind k, Name x, PropPtr a, Name y, ProcPtr p, ProcPtr q) {
  if (contains(q->fn, x)) {
    Name x2 = fresh(x);
    p = substitute(p, x, x2);
    x = x2;
  }
  if (contains(p->fn, y) || y == x) {
    Name y2 = fresh(y);
    q = substitute(q, y, y2);
    y = y2;
  }
  return node(k, x, y, std::move(a), std::move(p), std::move(q));
}
} // namespace

ProcPtr mk_cut(Name x, PropPtr a, Name y, ProcPtr p, ProcPtr q) {
  return mk_cutlike(ProcKind::Cut, x, std::move(a), y, std::move(p), std::move(q));
}
ProcPtr mk_cuthalf(Name x, PropPtr a, Name y, ProcPtr p, ProcPtr q) {
  return mk_cutlike(ProcKind::CutHalf, x, std::move(a), y, std::move(p), std::move(q));
}
ProcPtr mk_cutmsg(Name u, PropPtr a, Name v, ProcPtr p, ProcPtr q) {
  return mk_cutlike(ProcKind::CutMsg, u, std::move(a), v, std::move(p), std::move(q));
}

namespace {
ProcPtr rebuild(const Proc& t, ProcPtr p, ProcPtr q) {
  switch (t.kind) {
    case ProcKind::Link: return mk_link(t.a, t.b);
    case ProcKind::Close: return mk_close(t.a);
    case ProcKind::Wait: return mk_wait(t.a, std::move(p));
    case ProcKind::Send: return mk_send(t.a, t.b, std::move(p), std::move(q));
    case ProcKind::Recv: return mk_recv(t.a, t.b, std::move(p));
    case ProcKind::InL: return mk_inl(t.a, std::move(p));
    case ProcKind::InR: return mk_inr(t.a, std::move(p));
    case ProcKind::Case: return mk_case(t.a, std::move(p), std::move(q));
    case ProcKind::Client: return mk_client(t.a, t.b, std::move(p));
    case ProcKind::Server: return mk_server(t.a, t.b, std::move(p));
    case ProcKind::Cut: return mk_cut(t.a, t.ty, t.b, std::move(p), std::move(q));
    case ProcKind::CutHalf: return mk_cuthalf(t.a, t.ty, t.b, std::move(p), std::move(q));
    case ProcKind::CutMsg: return mk_cutmsg(t.a, t.ty, t.b, std::move(p), std::move(q));
  }
  return nullptr;
}
} // namespace

ProcPtr substitute(const ProcPtr& t, Name target, Name replacement) {
  if (target == replacement || !contains(t->fn, target)) return t;

  Name a = t->a == target ? replacement : t->a;
  Name b = t->b;
  ProcPtr p = t->p;
  ProcPtr q = t->q;

  switch (t->kind) {
    case ProcKind::Link: {
      Name y = t->b == target ? replacement : t->b;
      return mk_link(a, y);
    }
    case ProcKind::Close:
      return mk_close(a);
    case ProcKind::Wait:
    case ProcKind::InL:
    case ProcKind::InR: {
      Proc shell = *t;
      shell.a = a;
      return rebuild(shell, substitute(p, target, replacement), nullptr);
    }
    case ProcKind::Case:
      return mk_case(a, substitute(p, target, replacement),
                     substitute(q, target, replacement));
    case ProcKind::Send:
    case ProcKind::Recv:
    case ProcKind::Client:
    case ProcKind::Server: {
      // b binds in p; avoid capture of the replacement.
      if (b != target && contains(p->fn, target)) {
        if (b == replacement) {
          Name b2 = fresh(b);
          p = substitute(p, b, b2);
          b = b2;
        }
        p = substitute(p, target, replacement);
      }
      if (t->kind == ProcKind::Send) q = substitute(q, target, replacement);
      Proc shell = *t;
      shell.a = a;
      shell.b = b;
      return rebuild(shell, std::move(p), std::move(q));
    }
    case ProcKind::Cut:
    case ProcKind::CutHalf:
    case ProcKind::CutMsg: {
      Name x = t->a;
      Name y = t->b;
      if (x != target && contains(p->fn, target)) {
        if (x == replacement) {
          Name x2 = fresh(x);
          p = substitute(p, x, x2);
          x = x2;
        }
        p = substitute(p, target, replacement);
      }
      if (y != target && contains(q->fn, target)) {
        if (y == replacement) {
          Name y2 = fresh(y);
          q = substitute(q, y, y2);
          y = y2;
        }
        q = substitute(q, target, replacement);
      }
      Proc shell = *t;
      shell.a = x;
      shell.b = y;
      return rebuild(shell, std::move(p), std::move(q));
    }
  }
  return t;
}

namespace {

// Alpha-comparison with a pairing of in-scope binders.
bool aeq(const ProcPtr& a, const ProcPtr& b, std::map<Name, Name>& ab,
         std::map<Name, Name>& ba) {
  if (a->kind != b->kind) return false;

  auto eqn = [&](Name x, Name y) {
    auto i = ab.find(x);
    auto j = ba.find(y);
    if (i == ab.end() && j == ba.end()) return x == y; // both free
    if (i == ab.end() || j == ba.end()) return false;  // bound vs free
    return i->second == y && j->second == x;
  };

  auto under = [&](Name x, Name y, auto&& body) {
    auto oldi = ab.find(x) != ab.end() ? std::optional<Name>(ab[x]) : std::nullopt;
    auto oldj = ba.find(y) != ba.end() ? std::optional<Name>(ba[y]) : std::nullopt;
    ab[x] = y;
    ba[y] = x;
    bool ok = body();
    if (oldi)
      ab[x] = *oldi;
    else
      ab.erase(x);
    if (oldj)
      ba[y] = *oldj;
    else
      ba.erase(y);
    return ok;
  };

  switch (a->kind) {
    case ProcKind::Link:
      return eqn(a->a, b->a) && eqn(a->b, b->b);
    case ProcKind::Close:
      return eqn(a->a, b->a);
    case ProcKind::Wait:
    case ProcKind::InL:
    case ProcKind::InR:
      return eqn(a->a, b->a) && aeq(a->p, b->p, ab, ba);
    case ProcKind::Case:
      return eqn(a->a, b->a) && aeq(a->p, b->p, ab, ba) && aeq(a->q, b->q, ab, ba);
    case ProcKind::Send:
      return eqn(a->a, b->a) &&
             under(a->b, b->b, [&] { return aeq(a->p, b->p, ab, ba); }) &&
             aeq(a->q, b->q, ab, ba);
    case ProcKind::Recv:
    case ProcKind::Client:
    case ProcKind::Server:
      return eqn(a->a, b->a) &&
             under(a->b, b->b, [&] { return aeq(a->p, b->p, ab, ba); });
    case ProcKind::Cut:
    case ProcKind::CutHalf:
    case ProcKind::CutMsg:
      if (a->ty && b->ty && !prop_eq(a->ty, b->ty)) return false;
      return under(a->a, b->a, [&] { return aeq(a->p, b->p, ab, ba); }) &&
             under(a->b, b->b, [&] { return aeq(a->q, b->q, ab, ba); });
  }
  return false;
}

ProcPtr canon_walk(const ProcPtr& t, std::map<Name, Name>& ren, size_t& next) {
  auto look = [&](Name x) {
    auto it = ren.find(x);
    return it == ren.end() ? x : it->second;
  };
  auto bind = [&] {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_c%05zu", next++);
    return intern(buf);
  };
  auto under = [&](Name x, Name nx, auto&& body) {
    auto old = ren.find(x) != ren.end() ? std::optional<Name>(ren[x]) : std::nullopt;
    ren[x] = nx;
    ProcPtr r = body();
    if (old)
      ren[x] = *old;
    else
      ren.erase(x);
    return r;
  };

  switch (t->kind) {
    case ProcKind::Link: return mk_link(look(t->a), look(t->b));
    case ProcKind::Close: return mk_close(look(t->a));
    case ProcKind::Wait: return mk_wait(look(t->a), canon_walk(t->p, ren, next));
    case ProcKind::InL: return mk_inl(look(t->a), canon_walk(t->p, ren, next));
    case ProcKind::InR: return mk_inr(look(t->a), canon_walk(t->p, ren, next));
    case ProcKind::Case: {
      Name x = look(t->a);
      auto l = canon_walk(t->p, ren, next);
      return mk_case(x, std::move(l), canon_walk(t->q, ren, next));
    }
    case ProcKind::Send: {
      Name x = look(t->a);
      Name nb = bind();
      auto l = under(t->b, nb, [&] { return canon_walk(t->p, ren, next); });
      return node(ProcKind::Send, x, nb, nullptr, std::move(l),
                  canon_walk(t->q, ren, next));
    }
    case ProcKind::Recv:
    case ProcKind::Client:
    case ProcKind::Server: {
      Name x = look(t->a);
      Name nb = bind();
      auto l = under(t->b, nb, [&] { return canon_walk(t->p, ren, next); });
      return node(t->kind, x, nb, nullptr, std::move(l), nullptr);
    }
    case ProcKind::Cut:
    case ProcKind::CutHalf:
    case ProcKind::CutMsg: {
      Name na = bind();
      auto l = under(t->a, na, [&] { return canon_walk(t->p, ren, next); });
      Name nb = bind();
      auto r = under(t->b, nb, [&] { return canon_walk(t->q, ren, next); });
      return node(t->kind, na, nb, t->ty, std::move(l), std::move(r));
    }
  }
  return t;
}

} // namespace

bool alpha_eq(const ProcPtr& a, const ProcPtr& b) {
  std::map<Name, Name> ab, ba;
  return aeq(a, b, ab, ba);
}

ProcPtr canon(const ProcPtr& p) {
  std::map<Name, Name> ren;
  size_t next = 0;
  return canon_walk(p, ren, next);
}

bool struct_eq(const ProcPtr& a, const ProcPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->a != b->a || a->b != b->b) return false;
  if ((a->ty == nullptr) != (b->ty == nullptr)) return false;
  if (a->ty && !prop_eq(a->ty, b->ty)) return false;
  if ((a->p == nullptr) != (b->p == nullptr)) return false;
  if ((a->q == nullptr) != (b->q == nullptr)) return false;
  if (a->p && !struct_eq(a->p, b->p)) return false;
  if (a->q && !struct_eq(a->q, b->q)) return false;
  return true;
}

namespace {

ProcPtr barendregt_walk(const ProcPtr& t, NameSet& used) {
  auto pick = [&](Name b) {
    Name nb = b;
    if (contains(used, b)) nb = fresh(b);
    insert_name(used, nb);
    return nb;
  };
  switch (t->kind) {
    case ProcKind::Link:
    case ProcKind::Close:
      return t;
    case ProcKind::Wait:
    case ProcKind::InL:
    case ProcKind::InR:
      return rebuild(*t, barendregt_walk(t->p, used), nullptr);
    case ProcKind::Case: {
      auto l = barendregt_walk(t->p, used);
      return mk_case(t->a, std::move(l), barendregt_walk(t->q, used));
    }
    case ProcKind::Send: {
      Name nb = pick(t->b);
      auto body = nb == t->b ? t->p : substitute(t->p, t->b, nb);
      auto l = barendregt_walk(body, used);
      auto r = barendregt_walk(t->q, used);
      Proc shell = *t;
      shell.b = nb;
      return rebuild(shell, std::move(l), std::move(r));
    }
    case ProcKind::Recv:
    case ProcKind::Client:
    case ProcKind::Server: {
      Name nb = pick(t->b);
      auto body = nb == t->b ? t->p : substitute(t->p, t->b, nb);
      Proc shell = *t;
      shell.b = nb;
      return rebuild(shell, barendregt_walk(body, used), nullptr);
    }
    case ProcKind::Cut:
    case ProcKind::CutHalf:
    case ProcKind::CutMsg: {
      Name na = pick(t->a);
      Name nb = pick(t->b);
      auto l = na == t->a ? t->p : substitute(t->p, t->a, na);
      auto r = nb == t->b ? t->q : substitute(t->q, t->b, nb);
      l = barendregt_walk(l, used);
      r = barendregt_walk(r, used);
      Proc shell = *t;
      shell.a = na;
      shell.b = nb;
      return rebuild(shell, std::move(l), std::move(r));
    }
  }
  return t;
}

} // namespace

ProcPtr barendregt(const ProcPtr& p, const NameSet& avoid) {
  NameSet used = set_union(avoid, p->fn);
  return barendregt_walk(p, used);
}

bool has_cut(const ProcPtr& p) {
  if (is_cut_kind(p->kind)) return true;
  if (p->p && has_cut(p->p)) return true;
  if (p->q && has_cut(p->q)) return true;
  return false;
}

bool has_runtime_cut(const ProcPtr& p) {
  if (p->kind == ProcKind::CutHalf || p->kind == ProcKind::CutMsg) return true;
  if (p->p && has_runtime_cut(p->p)) return true;
  if (p->q && has_runtime_cut(p->q)) return true;
  return false;
}

} // namespace fwdlab
