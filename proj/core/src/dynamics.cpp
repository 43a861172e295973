#include "fwdlab/dynamics.hpp"

#include "fwdlab/logic_cll.hpp"
#include "fwdlab/surface.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace fwdlab {

std::string step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::Beta: return "beta";
    case StepKind::Kappa: return "kappa";
    case StepKind::Equiv: return "equiv";
  }
  return "?";
}

ProcPtr compose(const ProcPtr& p, Name x, const ProcPtr& q, Name y, PropPtr a) {
  if (!contains(p->fn, x))
    throw CheckError("EndpointNotFree", "endpoint '" + x.str() + "' is not free in the left process");
  if (!contains(q->fn, y))
    throw CheckError("EndpointNotFree", "endpoint '" + y.str() + "' is not free in the right process");
  if (intersects(p->fn, q->fn)) {
    NameSet shared;
    for (auto n : p->fn)
      if (contains(q->fn, n)) insert_name(shared, n);
    throw CheckError("NameClash",
                     "processes share free endpoint '" + shared.front().str() + "'");
  }
  return mk_cut(x, std::move(a), y, p, q);
}

namespace {

struct Rewrite {
  StepKind kind;
  std::string rule;
  ProcPtr after;
};

bool is_cutty(ProcKind k) {
  return k == ProcKind::Cut || k == ProcKind::CutHalf || k == ProcKind::CutMsg;
}

// One rewrite of the plain cut new (x:A)(y) (P|Q), components cut-free.
std::optional<Rewrite> rewrite_cut(const ProcPtr& t) {
  Name x = t->a, y = t->b;
  const ProcPtr& P = t->p;
  const ProcPtr& Q = t->q;
  const PropPtr& A = t->ty;

  // beta-link
  if (P->kind == ProcKind::Link && (P->a == x || P->b == x)) {
    Name w = P->a == x ? P->b : P->a;
    return Rewrite{StepKind::Beta, "beta-link", substitute(Q, y, w)};
  }
  if (Q->kind == ProcKind::Link && (Q->a == y || Q->b == y)) {
    Name w = Q->a == y ? Q->b : Q->a;
    return Rewrite{StepKind::Beta, "beta-link", substitute(P, x, w)};
  }

  bool p_principal = P->a == x && P->kind != ProcKind::Link;
  bool q_principal = Q->a == y && Q->kind != ProcKind::Link;

  if (p_principal && q_principal) {
    // orient: output-like action on the left
    const ProcPtr* l = &P;
    const ProcPtr* r = &Q;
    Name lx = x, ry = y;
    PropPtr la = A;
    auto is_neg = [](ProcKind k) {
      return k == ProcKind::Wait || k == ProcKind::Recv || k == ProcKind::Case ||
             k == ProcKind::Server;
    };
    if (is_neg(P->kind)) {
      std::swap(l, r);
      std::swap(lx, ry);
      la = dual(A);
    }
    const ProcPtr& L = *l;
    const ProcPtr& R = *r;
    switch (L->kind) {
      case ProcKind::Close:
        if (R->kind != ProcKind::Wait) return std::nullopt;
        return Rewrite{StepKind::Beta, "beta-one-bot", R->p};
      case ProcKind::Send: {
        if (R->kind != ProcKind::Recv || la->kind != PropKind::Tensor) return std::nullopt;
        ProcPtr inner = mk_cutmsg(L->b, la->left, R->b, L->p, R->p);
        return Rewrite{StepKind::Beta, "beta-tensor-par",
                       mk_cuthalf(lx, la->right, ry, L->q, std::move(inner))};
      }
      case ProcKind::InL:
        if (R->kind != ProcKind::Case || la->kind != PropKind::Plus) return std::nullopt;
        return Rewrite{StepKind::Beta, "beta-plus-with-l",
                       mk_cut(lx, la->left, ry, L->p, R->p)};
      case ProcKind::InR:
        if (R->kind != ProcKind::Case || la->kind != PropKind::Plus) return std::nullopt;
        return Rewrite{StepKind::Beta, "beta-plus-with-r",
                       mk_cut(lx, la->right, ry, L->p, R->q)};
      case ProcKind::Client: {
        if (R->kind != ProcKind::Server || la->kind != PropKind::WhyNot) return std::nullopt;
        // new (u:A')(v) (client continuation | server body)
        return Rewrite{StepKind::Beta, "beta-bang-query",
                       mk_cut(L->b, la->left, R->b, L->p, R->p)};
      }
      default:
        return std::nullopt;
    }
  }

  // kappa: hoist a non-principal head out of the cut. Try the left
  // component first, then the right through cut symmetry.
  auto hoist = [&](const ProcPtr& side, const ProcPtr& other, Name sx, Name oy,
                   PropPtr sa, bool side_is_left) -> std::optional<Rewrite> {
    auto rebuild_cut = [&](const ProcPtr& inner_side) {
      return side_is_left ? mk_cut(sx, sa, oy, inner_side, other)
                          : mk_cut(oy, dual(sa), sx, other, inner_side);
    };
    if (side->a == sx || side->kind == ProcKind::Link) return std::nullopt;
    switch (side->kind) {
      case ProcKind::Wait:
        return Rewrite{StepKind::Kappa, "kappa-wait",
                       mk_wait(side->a, rebuild_cut(side->p))};
      case ProcKind::Send:
        if (contains(side->p->fn, sx)) return std::nullopt; // ill-typed payload capture
        return Rewrite{StepKind::Kappa, "kappa-send",
                       mk_send(side->a, side->b, side->p, rebuild_cut(side->q))};
      case ProcKind::Recv:
        return Rewrite{StepKind::Kappa, "kappa-recv",
                       mk_recv(side->a, side->b, rebuild_cut(side->p))};
      case ProcKind::InL:
        return Rewrite{StepKind::Kappa, "kappa-select",
                       mk_inl(side->a, rebuild_cut(side->p))};
      case ProcKind::InR:
        return Rewrite{StepKind::Kappa, "kappa-select",
                       mk_inr(side->a, rebuild_cut(side->p))};
      case ProcKind::Case:
        return Rewrite{StepKind::Kappa, "kappa-case",
                       mk_case(side->a, rebuild_cut(side->p), rebuild_cut(side->q))};
      case ProcKind::Client:
        return Rewrite{StepKind::Kappa, "kappa-client",
                       mk_client(side->a, side->b, rebuild_cut(side->p))};
      case ProcKind::Server:
        // only sound when the other side is a server principal on the cut
        if (other->kind == ProcKind::Server && other->a == oy)
          return Rewrite{StepKind::Kappa, "kappa-server",
                         mk_server(side->a, side->b, rebuild_cut(side->p))};
        return std::nullopt;
      default:
        return std::nullopt;
    }
  };

  if (!p_principal) {
    if (auto r = hoist(P, Q, x, y, A, true)) return r;
  }
  if (!q_principal) {
    if (auto r = hoist(Q, P, y, x, dual(A), false)) return r;
  }
  return std::nullopt;
}

// One rewrite of the blocked pair new (x:B)([]y) (Q | new (u:A)([v]) (P|R)).
std::optional<Rewrite> rewrite_pair(const ProcPtr& t) {
  const ProcPtr& inner = t->q;
  Name x = t->a, y = t->b;
  Name u = inner->a, v = inner->b;
  const ProcPtr& Q = t->p;
  const ProcPtr& P = inner->p;
  const ProcPtr& R = inner->q;
  PropPtr B = t->ty;
  PropPtr A = inner->ty;

  auto repack = [&](const ProcPtr& newR) {
    return mk_cuthalf(x, B, y, Q, mk_cutmsg(u, A, v, P, newR));
  };

  switch (R->kind) {
    case ProcKind::Send: {
      if (contains(R->p->fn, v)) {
        // the in-transit message is forwarded: both cuts unblock
        ProcPtr left = mk_cut(u, A, v, P, R->p);
        ProcPtr right = mk_cut(x, B, y, Q, R->q);
        return Rewrite{StepKind::Kappa, "kappa-free-send",
                       mk_send(R->a, R->b, std::move(left), std::move(right))};
      }
      if (contains(R->q->fn, v))
        return Rewrite{StepKind::Kappa, "kappa-send",
                       mk_send(R->a, R->b, R->p, repack(R->q))};
      return std::nullopt;
    }
    case ProcKind::Wait:
      return Rewrite{StepKind::Kappa, "kappa-wait", mk_wait(R->a, repack(R->p))};
    case ProcKind::Recv:
      return Rewrite{StepKind::Kappa, "kappa-recv",
                     mk_recv(R->a, R->b, repack(R->p))};
    case ProcKind::InL:
      return Rewrite{StepKind::Kappa, "kappa-select", mk_inl(R->a, repack(R->p))};
    case ProcKind::InR:
      return Rewrite{StepKind::Kappa, "kappa-select", mk_inr(R->a, repack(R->p))};
    case ProcKind::Case:
      return Rewrite{StepKind::Kappa, "kappa-case",
                     mk_case(R->a, repack(R->p), repack(R->q))};
    case ProcKind::Client:
      return Rewrite{StepKind::Kappa, "kappa-client",
                     mk_client(R->a, R->b, repack(R->p))};
    default:
      return std::nullopt;
  }
}

std::optional<Step> find_step(const ProcPtr& t, std::vector<int>& path) {
  if (t->p) {
    path.push_back(0);
    if (auto s = find_step(t->p, path)) return s;
    path.pop_back();
  }
  if (t->q) {
    // a CutHalf whose inner CutMsg is the redex is handled as one unit
    bool unit = t->kind == ProcKind::CutHalf && t->q->kind == ProcKind::CutMsg;
    if (!unit) {
      path.push_back(1);
      if (auto s = find_step(t->q, path)) return s;
      path.pop_back();
    } else {
      // still descend into the pair's components
      path.push_back(1);
      path.push_back(0);
      if (auto s = find_step(t->q->p, path)) return s;
      path.pop_back();
      path.push_back(1);
      if (auto s = find_step(t->q->q, path)) return s;
      path.pop_back();
      path.pop_back();
    }
  }
  std::optional<Rewrite> rw;
  if (t->kind == ProcKind::Cut) rw = rewrite_cut(t);
  else if (t->kind == ProcKind::CutHalf && t->q->kind == ProcKind::CutMsg)
    rw = rewrite_pair(t);
  else if (is_cutty(t->kind))
    throw CheckError("StuckConfiguration",
                     "stray runtime cut: " + print_process(t));
  if (!rw) {
    if (is_cutty(t->kind))
      throw CheckError("StuckConfiguration", "no rule applies to: " + print_process(t));
    return std::nullopt;
  }
  Step s;
  s.kind = rw->kind;
  s.rule = rw->rule;
  s.position = path;
  s.before = t;
  s.after = rw->after;
  return s;
}

ProcPtr replace_path(const ProcPtr& t, const std::vector<int>& path, size_t i,
                     const ProcPtr& repl) {
  if (i == path.size()) return repl;
  ProcPtr np = t->p;
  ProcPtr nq = t->q;
  if (path[i] == 0)
    np = replace_path(t->p, path, i + 1, repl);
  else
    nq = replace_path(t->q, path, i + 1, repl);
  switch (t->kind) {
    case ProcKind::Wait: return mk_wait(t->a, np);
    case ProcKind::Send: return mk_send(t->a, t->b, np, nq);
    case ProcKind::Recv: return mk_recv(t->a, t->b, np);
    case ProcKind::InL: return mk_inl(t->a, np);
    case ProcKind::InR: return mk_inr(t->a, np);
    case ProcKind::Case: return mk_case(t->a, np, nq);
    case ProcKind::Client: return mk_client(t->a, t->b, np);
    case ProcKind::Server: return mk_server(t->a, t->b, np);
    case ProcKind::Cut: return mk_cut(t->a, t->ty, t->b, np, nq);
    case ProcKind::CutHalf: return mk_cuthalf(t->a, t->ty, t->b, np, nq);
    case ProcKind::CutMsg: return mk_cutmsg(t->a, t->ty, t->b, np, nq);
    default:
      throw InternalError("replace_path: leaf on the rewrite path");
  }
}

} // namespace

std::optional<Step> step(const ProcPtr& p) {
  std::vector<int> path;
  auto s = find_step(p, path);
  if (!s) return std::nullopt;
  // report whole-process before/after
  ProcPtr after_whole = replace_path(p, s->position, 0, s->after);
  Step out = *s;
  out.before = p;
  out.after = after_whole;
  return out;
}

std::vector<std::pair<size_t, size_t>> cut_measure(const ProcPtr& p) {
  std::vector<std::pair<size_t, size_t>> out;
  std::function<void(const ProcPtr&)> walk = [&](const ProcPtr& t) {
    if (is_cutty(t->kind)) out.emplace_back(t->ty ? t->ty->size() : 0, t->size());
    if (t->p) walk(t->p);
    if (t->q) walk(t->q);
  };
  walk(p);
  std::sort(out.begin(), out.end());
  return out;
}

bool measure_decreases(const std::vector<std::pair<size_t, size_t>>& before,
                       const std::vector<std::pair<size_t, size_t>>& after) {
  // Dershowitz-Manna: remove the common part; every added element must be
  // dominated by some removed element.
  auto b = before;
  auto a = after;
  // delete common elements
  for (auto it = a.begin(); it != a.end();) {
    auto jt = std::find(b.begin(), b.end(), *it);
    if (jt != b.end()) {
      b.erase(jt);
      it = a.erase(it);
    } else {
      ++it;
    }
  }
  if (b.empty()) return false; // nothing removed: not a strict decrease
  for (const auto& x : a) {
    bool dominated = false;
    for (const auto& y : b)
      if (x < y) {
        dominated = true;
        break;
      }
    if (!dominated) return false;
  }
  return true;
}

Trace normalize(const ProcPtr& p, size_t max_steps) {
  Trace tr;
  tr.initial = p;
  ProcPtr cur = p;
  for (size_t i = 0; i < max_steps; ++i) {
    auto s = step(cur);
    if (!s) {
      tr.final = cur;
      return tr;
    }
    if (s->kind != StepKind::Equiv) {
      auto before = cut_measure(s->before);
      auto after = cut_measure(s->after);
      if (!measure_decreases(before, after))
        throw InternalError("termination measure failed to decrease at step " +
                            std::to_string(i) + " (" + s->rule + ")");
    }
    cur = s->after;
    tr.steps.push_back(std::move(*s));
  }
  tr.final = cur;
  throw CheckError("StepLimitExceeded",
                   "no normal form after " + std::to_string(max_steps) + " steps");
}

bool is_restriction_free(const ProcPtr& p) { return !has_cut(p); }

namespace {

ProcPtr orient(const ProcPtr& t) {
  ProcPtr np = t->p ? orient(t->p) : nullptr;
  ProcPtr nq = t->q ? orient(t->q) : nullptr;
  switch (t->kind) {
    case ProcKind::Link: {
      Name a = t->a, b = t->b;
      if (b < a) std::swap(a, b);
      return mk_link(a, b);
    }
    case ProcKind::Cut: {
      // orient by the alpha-invariant print of the two components
      Name hole = intern("_hole");
      auto key = [&](const ProcPtr& side, Name bound) {
        return print_process(canon(substitute(side, bound, hole)));
      };
      std::string kl = key(np, t->a);
      std::string kr = key(nq, t->b);
      if (kr < kl) return mk_cut(t->b, dual(t->ty), t->a, nq, np);
      return mk_cut(t->a, t->ty, t->b, np, nq);
    }
    case ProcKind::Close: return t;
    case ProcKind::Wait: return mk_wait(t->a, np);
    case ProcKind::Send: return mk_send(t->a, t->b, np, nq);
    case ProcKind::Recv: return mk_recv(t->a, t->b, np);
    case ProcKind::InL: return mk_inl(t->a, np);
    case ProcKind::InR: return mk_inr(t->a, np);
    case ProcKind::Case: return mk_case(t->a, np, nq);
    case ProcKind::Client: return mk_client(t->a, t->b, np);
    case ProcKind::Server: return mk_server(t->a, t->b, np);
    case ProcKind::CutHalf: return mk_cuthalf(t->a, t->ty, t->b, np, nq);
    case ProcKind::CutMsg: return mk_cutmsg(t->a, t->ty, t->b, np, nq);
  }
  return t;
}

} // namespace

ProcPtr struct_canon(const ProcPtr& p) {
  // iterate orient+rename to a fixpoint; on a cycle pick the least print
  std::map<std::string, ProcPtr> seen;
  ProcPtr cur = canon(p);
  for (;;) {
    std::string k = print_process(cur);
    if (seen.count(k)) {
      auto best = seen.begin();
      return best->second;
    }
    seen.emplace(std::move(k), cur);
    ProcPtr next = canon(orient(cur));
    if (struct_eq(next, cur)) return cur;
    cur = next;
  }
}

} // namespace fwdlab
