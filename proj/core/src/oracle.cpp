#include "fwdlab/oracle.hpp"

#include "fwdlab/errors.hpp"
#include "fwdlab/logic_cll.hpp"
#include "fwdlab/surface.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>

namespace fwdlab {

namespace {

// Apply f over the cartesian product of premise alternatives.
void product2(const std::vector<DerivPtr>& a, const std::vector<DerivPtr>& b,
              const std::function<void(const DerivPtr&, const DerivPtr&)>& f) {
  for (const auto& x : a)
    for (const auto& y : b) f(x, y);
}

struct SyncSearch {
  std::map<std::string, std::vector<DerivPtr>> memo;

  std::vector<DerivPtr> go(const ProcPtr& t, const Context& G) {
    std::string k = print_process(t) + " |- " + print_context(G);
    if (auto it = memo.find(k); it != memo.end()) return it->second;
    std::vector<DerivPtr> out = enumerate(t, G);
    memo[k] = out;
    return out;
  }

  std::vector<DerivPtr> enumerate(const ProcPtr& t, const Context& G) {
    std::vector<DerivPtr> out;
    auto jdg = [&] { return j_sync(t, G); };
    switch (t->kind) {
      case ProcKind::Link: {
        if (G.star() || G.size() != 2) break;
        auto i = G.find(t->a);
        auto j = G.find(t->b);
        if (!i || !j) break;
        if (G.entries()[*i].kind != EntryKind::Active ||
            G.entries()[*j].kind != EntryKind::Active)
          break;
        if (prop_eq(G.entries()[*i].ty, dual(G.entries()[*j].ty)))
          out.push_back(mk_deriv(Rule::Ax, jdg(), {}, t->a));
        break;
      }
      case ProcKind::Close: {
        if (!G.star() || G.size() != 1) break;
        const auto& e = G.entries()[0];
        if (e.kind == EntryKind::Active && e.ep == t->a && e.ty->kind == PropKind::One)
          out.push_back(mk_deriv(Rule::One, jdg(), {}, t->a));
        break;
      }
      case ProcKind::Wait: {
        auto i = G.find(t->a);
        if (!i || G.entries()[*i].kind != EntryKind::Active ||
            G.entries()[*i].ty->kind != PropKind::Bot)
          break;
        Context prem = G;
        prem.take(*i);
        prem.set_star(true);
        for (auto& d : go(t->p, prem))
          out.push_back(mk_deriv(Rule::Bot, jdg(), {d}, t->a));
        break;
      }
      case ProcKind::Recv: {
        auto i = G.find(t->a);
        if (!i || G.entries()[*i].kind != EntryKind::Active ||
            G.entries()[*i].ty->kind != PropKind::Par)
          break;
        const Entry e = G.entries()[*i];
        Context prem = G;
        prem.take(*i);
        prem.add(e_buffer(t->b, e.ty->left, t->a, e.ty->right));
        for (auto& d : go(t->p, prem))
          out.push_back(mk_deriv(Rule::Par, jdg(), {d}, t->a, t->b));
        break;
      }
      case ProcKind::Send: {
        auto i = G.find(t->a);
        if (!i || G.entries()[*i].kind != EntryKind::Active ||
            G.entries()[*i].ty->kind != PropKind::Tensor)
          break;
        const Entry e = G.entries()[*i];
        // every subset of buffers is a candidate [D1]D2
        std::vector<size_t> buffers;
        for (size_t k2 = 0; k2 < G.size(); ++k2)
          if (G.entries()[k2].kind == EntryKind::Buffer) buffers.push_back(k2);
        size_t total = size_t{1} << buffers.size();
        for (size_t mask = 0; mask < total; ++mask) {
          Context left;
          Context right;
          right.set_star(G.star());
          for (size_t k2 = 0; k2 < G.size(); ++k2) {
            if (k2 == *i) continue;
            const Entry& g = G.entries()[k2];
            bool chosen = false;
            for (size_t b = 0; b < buffers.size(); ++b)
              if (buffers[b] == k2 && (mask & (size_t{1} << b))) chosen = true;
            if (chosen) {
              left.add_active(g.msg, g.msgTy);
              right.add_active(g.ep, g.ty);
            } else {
              right.add(g);
            }
          }
          left.add_active(t->b, e.ty->left);
          right.add_active(t->a, e.ty->right);
          product2(go(t->p, left), go(t->q, right), [&](auto& dl, auto& dr) {
            out.push_back(mk_deriv(Rule::Tensor, jdg(), {dl, dr}, t->a, t->b));
          });
        }
        break;
      }
      case ProcKind::InL:
      case ProcKind::InR: {
        bool l = t->kind == ProcKind::InL;
        auto bi = G.box_of(t->a);
        if (!bi) break;
        const Entry box = G.entries()[*bi];
        if (box.kind != (l ? EntryKind::LBox : EntryKind::RBox)) break;
        PropPtr sel;
        std::vector<std::pair<Name, PropPtr>> rest;
        for (const auto& [n, ty] : box.members) {
          if (n == t->a) sel = ty;
          else rest.emplace_back(n, ty);
        }
        if (!sel || sel->kind != PropKind::Plus) break;
        Context prem = G;
        prem.take(*bi);
        prem.add(e_box(box.kind, rest, box.ep, box.ty));
        prem.add_active(t->a, l ? sel->left : sel->right);
        for (auto& d : go(t->p, prem))
          out.push_back(mk_deriv(l ? Rule::PlusL : Rule::PlusR, jdg(), {d}, t->a));
        break;
      }
      case ProcKind::Case: {
        auto i = G.find(t->a);
        if (!i || G.entries()[*i].kind != EntryKind::Active ||
            G.entries()[*i].ty->kind != PropKind::With)
          break;
        const Entry e = G.entries()[*i];
        std::vector<std::pair<Name, PropPtr>> cand;
        for (const auto& g : G.entries())
          if (g.kind == EntryKind::Active && g.ty->kind == PropKind::Plus &&
              g.ep != t->a)
            cand.emplace_back(g.ep, g.ty);
        size_t total = size_t{1} << cand.size();
        for (size_t mask = 1; mask < total; ++mask) {
          std::vector<std::pair<Name, PropPtr>> sel;
          for (size_t b = 0; b < cand.size(); ++b)
            if (mask & (size_t{1} << b)) sel.push_back(cand[b]);
          Context base = G;
          base.take(*base.find(t->a));
          for (auto& [n, ty] : sel) base.take(*base.find(n));
          Context pl = base;
          pl.add(e_box(EntryKind::LBox, sel, t->a, e.ty->left));
          Context pr = base;
          pr.add(e_box(EntryKind::RBox, sel, t->a, e.ty->right));
          product2(go(t->p, pl), go(t->q, pr), [&](auto& dl, auto& dr) {
            out.push_back(mk_deriv(Rule::With, jdg(), {dl, dr}, t->a));
          });
        }
        break;
      }
      case ProcKind::Client: {
        auto bi = G.box_of(t->a);
        if (!bi || G.entries()[*bi].kind != EntryKind::QBox) break;
        const Entry box = G.entries()[*bi];
        PropPtr qty;
        std::vector<std::pair<Name, PropPtr>> rest;
        for (const auto& [n, ty] : box.members) {
          if (n == t->a) qty = ty;
          else rest.emplace_back(n, ty);
        }
        if (!qty || qty->kind != PropKind::WhyNot) break;
        Context prem = G;
        prem.take(*bi);
        prem.add(e_box(EntryKind::QBox, rest, box.ep, box.ty));
        prem.add_active(t->b, qty->left);
        for (auto& d : go(t->p, prem))
          out.push_back(mk_deriv(Rule::Query, jdg(), {d}, t->a, t->b));
        break;
      }
      case ProcKind::Server: {
        auto i = G.find(t->a);
        if (!i || G.star() || G.entries()[*i].kind != EntryKind::Active ||
            G.entries()[*i].ty->kind != PropKind::OfCourse)
          break;
        std::vector<std::pair<Name, PropPtr>> members;
        bool ok = true;
        for (size_t k2 = 0; k2 < G.size(); ++k2) {
          if (k2 == *i) continue;
          const Entry& g = G.entries()[k2];
          if (g.kind != EntryKind::Active || g.ty->kind != PropKind::WhyNot) ok = false;
          else members.emplace_back(g.ep, g.ty);
        }
        if (!ok) break;
        Context prem;
        prem.add(e_box(EntryKind::QBox, members, t->b, G.entries()[*i].ty->left));
        for (auto& d : go(t->p, prem))
          out.push_back(mk_deriv(Rule::Bang, jdg(), {d}, t->a, t->b));
        break;
      }
      default:
        break; // cuts are not part of the searched system
    }
    return out;
  }
};

struct CllSearch {
  std::map<std::string, std::vector<DerivPtr>> memo;

  std::vector<DerivPtr> go(const ProcPtr& t, const Context& G) {
    std::string k = print_process(t) + " |- " + print_context(G);
    if (auto it = memo.find(k); it != memo.end()) return it->second;
    std::vector<DerivPtr> out = enumerate(t, G);
    memo[k] = out;
    return out;
  }

  std::vector<DerivPtr> enumerate(const ProcPtr& t, const Context& G) {
    std::vector<DerivPtr> out;
    auto jdg = [&] { return j_cll(t, G); };
    auto active_at = [&](Name x, PropKind pk) -> std::optional<size_t> {
      auto i = G.find(x);
      if (!i || G.entries()[*i].ty->kind != pk) return std::nullopt;
      return i;
    };
    switch (t->kind) {
      case ProcKind::Link: {
        if (G.size() != 2) break;
        auto i = G.find(t->a);
        auto j = G.find(t->b);
        if (i && j && prop_eq(G.entries()[*i].ty, dual(G.entries()[*j].ty)))
          out.push_back(mk_deriv(Rule::CllAx, jdg(), {}, t->a));
        break;
      }
      case ProcKind::Close:
        if (G.size() == 1 && active_at(t->a, PropKind::One))
          out.push_back(mk_deriv(Rule::CllOne, jdg(), {}, t->a));
        break;
      case ProcKind::Wait: {
        auto i = active_at(t->a, PropKind::Bot);
        if (!i) break;
        Context prem = G;
        prem.take(*i);
        for (auto& d : go(t->p, prem))
          out.push_back(mk_deriv(Rule::CllBot, jdg(), {d}, t->a));
        break;
      }
      case ProcKind::Recv: {
        auto i = active_at(t->a, PropKind::Par);
        if (!i) break;
        const Entry e = G.entries()[*i];
        Context prem = G;
        prem.take(*i);
        prem.add_active(t->b, e.ty->left);
        prem.add_active(t->a, e.ty->right);
        for (auto& d : go(t->p, prem))
          out.push_back(mk_deriv(Rule::CllPar, jdg(), {d}, t->a, t->b));
        break;
      }
      case ProcKind::Send: {
        auto i = active_at(t->a, PropKind::Tensor);
        if (!i) break;
        const Entry e = G.entries()[*i];
        std::vector<size_t> others;
        for (size_t k2 = 0; k2 < G.size(); ++k2)
          if (k2 != *i) others.push_back(k2);
        size_t total = size_t{1} << others.size();
        for (size_t mask = 0; mask < total; ++mask) {
          Context left, right;
          for (size_t b = 0; b < others.size(); ++b) {
            const Entry& g = G.entries()[others[b]];
            if (mask & (size_t{1} << b)) left.add(g);
            else right.add(g);
          }
          left.add_active(t->b, e.ty->left);
          right.add_active(t->a, e.ty->right);
          product2(go(t->p, left), go(t->q, right), [&](auto& dl, auto& dr) {
            out.push_back(mk_deriv(Rule::CllTensor, jdg(), {dl, dr}, t->a, t->b));
          });
        }
        break;
      }
      case ProcKind::InL:
      case ProcKind::InR: {
        bool l = t->kind == ProcKind::InL;
        auto i = active_at(t->a, PropKind::Plus);
        if (!i) break;
        Context prem = G;
        const Entry e = G.entries()[*i];
        prem.take(*i);
        prem.add_active(t->a, l ? e.ty->left : e.ty->right);
        for (auto& d : go(t->p, prem))
          out.push_back(mk_deriv(l ? Rule::CllPlusL : Rule::CllPlusR, jdg(), {d}, t->a));
        break;
      }
      case ProcKind::Case: {
        auto i = active_at(t->a, PropKind::With);
        if (!i) break;
        const Entry e = G.entries()[*i];
        Context pl = G;
        pl.take(*i);
        Context pr = pl;
        pl.add_active(t->a, e.ty->left);
        pr.add_active(t->a, e.ty->right);
        product2(go(t->p, pl), go(t->q, pr), [&](auto& dl, auto& dr) {
          out.push_back(mk_deriv(Rule::CllWith, jdg(), {dl, dr}, t->a));
        });
        break;
      }
      case ProcKind::Client: {
        auto i = active_at(t->a, PropKind::WhyNot);
        if (!i) break;
        const Entry e = G.entries()[*i];
        Context prem = G;
        prem.take(*i);
        prem.add_active(t->b, e.ty->left);
        for (auto& d : go(t->p, prem))
          out.push_back(mk_deriv(Rule::CllQuery, jdg(), {d}, t->a, t->b));
        break;
      }
      case ProcKind::Server: {
        auto i = active_at(t->a, PropKind::OfCourse);
        if (!i) break;
        bool ok = true;
        for (size_t k2 = 0; k2 < G.size(); ++k2)
          if (k2 != *i && G.entries()[k2].ty->kind != PropKind::WhyNot) ok = false;
        if (!ok) break;
        const Entry e = G.entries()[*i];
        Context prem = G;
        prem.take(*i);
        prem.add_active(t->b, e.ty->left);
        for (auto& d : go(t->p, prem))
          out.push_back(mk_deriv(Rule::CllBang, jdg(), {d}, t->a, t->b));
        break;
      }
      case ProcKind::Cut: {
        std::vector<size_t> others;
        for (size_t k2 = 0; k2 < G.size(); ++k2) others.push_back(k2);
        size_t total = size_t{1} << others.size();
        for (size_t mask = 0; mask < total; ++mask) {
          Context left, right;
          for (size_t b = 0; b < others.size(); ++b) {
            const Entry& g = G.entries()[others[b]];
            if (mask & (size_t{1} << b)) left.add(g);
            else right.add(g);
          }
          left.add_active(t->a, t->ty);
          right.add_active(t->b, dual(t->ty));
          product2(go(t->p, left), go(t->q, right), [&](auto& dl, auto& dr) {
            out.push_back(mk_deriv(Rule::CllCut, jdg(), {dl, dr}, t->a, t->b));
          });
        }
        break;
      }
      default:
        break;
    }
    return out;
  }
};

} // namespace

std::vector<DerivPtr> search_sync(const ProcPtr& p, const Context& gamma, size_t bound) {
  if (p->size() > bound)
    throw CheckError("BoundExceeded", "process size exceeds the search bound");
  SyncSearch s;
  return s.go(p, gamma);
}

std::vector<DerivPtr> search_cll(const ProcPtr& p, const Context& delta, size_t bound) {
  if (p->size() > bound)
    throw CheckError("BoundExceeded", "process size exceeds the search bound");
  CllSearch s;
  return s.go(p, delta);
}

namespace {

struct Gen {
  std::mt19937_64 rng;

  size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); }

  PropPtr rand_prop(size_t depth) {
    static const char* atoms[] = {"a", "b", "c", "d"};
    if (depth == 0 || pick(3) == 0) return p_atom(atoms[pick(4)], pick(2) == 0);
    switch (pick(6)) {
      case 0: return p_one();
      case 1: return p_bot();
      case 2: return p_tensor(rand_prop(depth - 1), rand_prop(depth - 1));
      case 3: return p_par(rand_prop(depth - 1), rand_prop(depth - 1));
      case 4: return p_plus(rand_prop(depth - 1), rand_prop(depth - 1));
      default: return p_with(rand_prop(depth - 1), rand_prop(depth - 1));
    }
  }

  // Rename the pair (G, ctx) so its endpoints become `targets` (position-wise).
  static std::pair<GlobalPtr, Context> retarget(std::pair<GlobalPtr, Context> in,
                                                const std::vector<Name>& targets) {
    std::map<Name, Name> m;
    const auto& es = in.second.entries();
    for (size_t i = 0; i < es.size(); ++i) m[es[i].ep] = targets[i];
    std::function<GlobalPtr(const GlobalPtr&)> rn = [&](const GlobalPtr& g) -> GlobalPtr {
      auto r = [&](Name n) {
        auto it = m.find(n);
        return it == m.end() ? n : it->second;
      };
      std::vector<Name> many;
      for (auto n : g->many) many.push_back(r(n));
      switch (g->kind) {
        case GlobalKind::CloseAll: return g_close_all(many, r(g->one));
        case GlobalKind::Gather: return g_gather(many, r(g->one), rn(g->g), rn(g->h));
        case GlobalKind::Branch: return g_branch(r(g->one), many, rn(g->g), rn(g->h));
        case GlobalKind::Serve: return g_serve(r(g->one), many, rn(g->g));
        case GlobalKind::GAxiom: return g_axiom(r(g->one), g->ty, r(g->other));
      }
      return g;
    };
    Context ctx;
    for (size_t i = 0; i < es.size(); ++i) ctx.add_active(targets[i], es[i].ty);
    return {rn(in.first), std::move(ctx)};
  }

  std::pair<GlobalPtr, Context> leaf(size_t m) {
    if (m == 2 && pick(2) == 0) {
      Name x = fresh("e"), y = fresh("e");
      PropPtr a = rand_prop(2);
      Context ctx;
      ctx.add_active(x, a);
      ctx.add_active(y, dual(a));
      return {g_axiom(x, a, y), std::move(ctx)};
    }
    std::vector<Name> xs;
    Context ctx;
    for (size_t i = 0; i + 1 < m; ++i) {
      Name x = fresh("e");
      xs.push_back(x);
      ctx.add_active(x, p_one());
    }
    Name y = fresh("e");
    ctx.add_active(y, p_bot());
    return {g_close_all(std::move(xs), y), std::move(ctx)};
  }

  std::pair<GlobalPtr, Context> gen(size_t m, size_t budget) {
    if (budget <= 1 || m < 2) return leaf(m);
    switch (pick(10)) {
      case 0:
        return leaf(m);
      case 1:
      case 2:
      case 3:
      case 4: { // gather
        size_t n = 1 + pick(std::min<size_t>(m - 1, 2));
        auto left = gen(n + 1, budget / 2);
        auto right = gen(m, budget - budget / 2 - 1);
        // left context order: first n are senders, last is the collector
        std::vector<Name> lxs;
        for (const auto& e : left.second.entries()) lxs.push_back(e.ep);
        Name ly = lxs.back();
        lxs.pop_back();
        // choose n senders and the collector among right's endpoints
        std::vector<Name> rnames;
        for (const auto& e : right.second.entries()) rnames.push_back(e.ep);
        // retarget right so its chosen endpoints carry the left names
        std::vector<size_t> ids(rnames.size());
        for (size_t i = 0; i < ids.size(); ++i) ids[i] = i;
        for (size_t i = 0; i < ids.size(); ++i) std::swap(ids[i], ids[pick(ids.size())]);
        std::vector<Name> targets = rnames;
        for (size_t i = 0; i < n; ++i) targets[ids[i]] = lxs[i];
        targets[ids[n]] = ly;
        auto rt = retarget(std::move(right), targets);
        Context ctx;
        for (const auto& e : rt.second.entries()) {
          if (std::find(lxs.begin(), lxs.end(), e.ep) != lxs.end()) {
            auto li = left.second.find(e.ep);
            ctx.add_active(e.ep, p_tensor(left.second.entries()[*li].ty, e.ty));
          } else if (e.ep == ly) {
            auto li = left.second.find(ly);
            ctx.add_active(ly, p_par(left.second.entries()[*li].ty, e.ty));
          } else {
            ctx.add_active(e.ep, e.ty);
          }
        }
        return {g_gather(lxs, ly, left.first, rt.first), std::move(ctx)};
      }
      case 5:
      case 6: { // branch over the whole context
        auto left = gen(m, budget / 2);
        auto right = gen(m, budget - budget / 2 - 1);
        std::vector<Name> names;
        for (const auto& e : left.second.entries()) names.push_back(e.ep);
        auto rt = retarget(std::move(right), names);
        size_t xi = pick(m);
        Name x = names[xi];
        std::vector<Name> ys;
        for (size_t i = 0; i < m; ++i)
          if (i != xi) ys.push_back(names[i]);
        Context ctx;
        for (size_t i = 0; i < m; ++i) {
          PropPtr a = left.second.entries()[i].ty;
          PropPtr b = rt.second.entries()[i].ty;
          ctx.add_active(names[i], i == xi ? p_plus(a, b) : p_with(a, b));
        }
        return {g_branch(x, std::move(ys), left.first, rt.first), std::move(ctx)};
      }
      case 7:
      case 8: { // serve over the whole context
        auto body = gen(m, budget - 1);
        std::vector<Name> names;
        for (const auto& e : body.second.entries()) names.push_back(e.ep);
        size_t xi = pick(m);
        Name x = names[xi];
        std::vector<Name> ys;
        for (size_t i = 0; i < m; ++i)
          if (i != xi) ys.push_back(names[i]);
        Context ctx;
        for (size_t i = 0; i < m; ++i) {
          PropPtr a = body.second.entries()[i].ty;
          ctx.add_active(names[i], i == xi ? p_whynot(a) : p_ofcourse(a));
        }
        return {g_serve(x, std::move(ys), body.first), std::move(ctx)};
      }
      default: { // axiom, only at width two
        if (m == 2) return leaf(2);
        return gen(m, budget - 1);
      }
    }
  }
};

} // namespace

std::pair<GlobalPtr, Context> random_global_type(uint64_t seed, size_t size) {
  Gen g;
  g.rng.seed(seed);
  if (size < 1) size = 1;
  size_t m = size <= 2 ? 2 : 2 + g.pick(3);
  if (size == 1) {
    // a single axiom node
    Name x = fresh("e"), y = fresh("e");
    PropPtr a = g.rand_prop(1);
    Context ctx;
    ctx.add_active(x, a);
    ctx.add_active(y, dual(a));
    return {g_axiom(x, a, y), std::move(ctx)};
  }
  return g.gen(m, size);
}

} // namespace fwdlab
