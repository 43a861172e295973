#include "fwdlab/logic_sync.hpp"

#include "check_util.hpp"
#include "fwdlab/logic_cll.hpp"
#include "fwdlab/surface.hpp"

#include <functional>
#include <map>
#include <sstream>

namespace fwdlab {

namespace {

// First action performed on endpoint e (DFS, left branch first).
std::optional<ProcKind> first_action(const ProcPtr& t, Name e) {
  if (!contains(t->fn, e)) return std::nullopt;
  if (t->a == e && t->kind != ProcKind::Cut && t->kind != ProcKind::CutHalf &&
      t->kind != ProcKind::CutMsg)
    return t->kind;
  if (t->kind == ProcKind::Link && t->b == e) return t->kind;
  if (t->p)
    if (auto k = first_action(t->p, e)) return k;
  if (t->q)
    if (auto k = first_action(t->q, e)) return k;
  return std::nullopt;
}

struct Failure {
  std::string kind;
  std::string msg;
  std::string residual;
};

struct SyncChecker {
  bool runtime = false;
  SyncOptions opt;
  std::map<std::string, Failure> failed; // memoized rejections

  [[noreturn]] void fail(const std::string& kind, const std::string& msg,
                         const Context& ctx) {
    throw CheckError(kind, msg, print_context(ctx));
  }

  static std::string key(const ProcPtr& t, const Context& G) {
    return print_process(t) + " |- " + print_context(G);
  }

  DerivPtr check(const ProcPtr& t, const Context& G) {
    std::string k = key(t, G);
    if (auto it = failed.find(k); it != failed.end())
      throw CheckError(it->second.kind, it->second.msg, it->second.residual);
    try {
      return check_uncached(t, G);
    } catch (const CheckError& e) {
      failed.emplace(std::move(k), Failure{e.kind, e.what(), e.residual});
      throw;
    }
  }

  // Active entry lookup with the box/buffer diagnostics of the spec.
  size_t need_active(const ProcPtr& t, const Context& G, Name x) {
    if (auto i = G.find(x)) {
      if (G.entries()[*i].kind == EntryKind::Active) return *i;
      fail("OrderViolation",
           "endpoint '" + x.str() + "' is blocked by a pending message", G);
    }
    if (G.box_of(x))
      fail("OrderViolation",
           "endpoint '" + x.str() + "' is inside a box and must forward its choice first",
           G);
    if (G.buffer_of_msg(x))
      fail("NotAForwarder",
           "message '" + x.str() + "' must be forwarded with a send, not used", G);
    fail("UnknownEndpoint", "endpoint '" + x.str() + "' not in context", G);
  }

  void expect_kind(const Context& G, const Entry& e, PropKind k, const char* what) {
    if (e.ty->kind != k)
      fail("TypeMismatch", "endpoint '" + e.ep.str() + "' expected " + what + ", found " +
                               print_prop(e.ty, true), G);
  }

  DerivPtr check_uncached(const ProcPtr& t, const Context& G) {
    auto jdg = [&] { return j_sync(t, G); };
    switch (t->kind) {
      case ProcKind::Link: {
        size_t i = need_active(t, G, t->a);
        size_t j = need_active(t, G, t->b);
        if (G.size() != 2 || G.star())
          fail("UnusedEndpoint", "a link consumes exactly two endpoints and no close flag",
               G);
        if (!prop_eq(G.entries()[i].ty, dual(G.entries()[j].ty)))
          fail("TypeMismatch", "link endpoints are not dual", G);
        return mk_deriv(Rule::Ax, jdg(), {}, t->a);
      }
      case ProcKind::Close: {
        size_t i = need_active(t, G, t->a);
        expect_kind(G, G.entries()[i], PropKind::One, "1");
        if (!G.star())
          fail("StarMissing", "close requires a pending close flag (a prior wait)", G);
        if (G.size() != 1)
          fail("UnusedEndpoint", "close must be the last action of this forwarder", G);
        return mk_deriv(Rule::One, jdg(), {}, t->a);
      }
      case ProcKind::Wait: {
        size_t i = need_active(t, G, t->a);
        expect_kind(G, G.entries()[i], PropKind::Bot, "bot");
        Context prem = G;
        prem.take(i);
        prem.set_star(true);
        return mk_deriv(Rule::Bot, jdg(), {check(t->p, prem)}, t->a);
      }
      case ProcKind::Recv: {
        size_t i = need_active(t, G, t->a);
        const Entry e = G.entries()[i];
        expect_kind(G, e, PropKind::Par, "par");
        Context prem = G;
        prem.take(i);
        prem.add(e_buffer(t->b, e.ty->left, t->a, e.ty->right));
        return mk_deriv(Rule::Par, jdg(), {check(t->p, prem)}, t->a, t->b);
      }
      case ProcKind::Send: {
        size_t i = need_active(t, G, t->a);
        const Entry e = G.entries()[i];
        expect_kind(G, e, PropKind::Tensor, "*");
        // the payload may use buffered messages and the fresh endpoint only
        Context left;
        Context right = G;
        right.take(*right.find(t->a));
        for (size_t k2 = 0; k2 < right.size();) {
          const Entry& g = right.entries()[k2];
          if (g.kind == EntryKind::Buffer && contains(t->p->fn, g.msg)) {
            Entry buf = right.take(k2);
            left.add_active(buf.msg, buf.msgTy);
            right.add_active(buf.ep, buf.ty);
          } else {
            ++k2;
          }
        }
        for (Name n : t->p->fn)
          if (n != t->b && !left.find(n))
            fail("NotAForwarder",
                 "endpoint '" + n.str() +
                     "' is used by the send payload but is not a buffered message",
                 G);
        left.add_active(t->b, e.ty->left);
        right.add_active(t->a, e.ty->right);
        auto dl = check(t->p, left);
        auto dr = check(t->q, right);
        return mk_deriv(Rule::Tensor, jdg(), {std::move(dl), std::move(dr)}, t->a, t->b);
      }
      case ProcKind::InL:
      case ProcKind::InR: {
        bool l = t->kind == ProcKind::InL;
        auto bi = G.box_of(t->a);
        if (!bi) {
          if (G.find(t->a))
            fail("NotAForwarder",
                 "select on '" + t->a.str() +
                     "' does not forward a received choice (endpoint not boxed)",
                 G);
          fail("UnknownEndpoint", "endpoint '" + t->a.str() + "' not in context", G);
        }
        const Entry box = G.entries()[*bi];
        if (box.kind != (l ? EntryKind::LBox : EntryKind::RBox))
          fail("TypeMismatch",
               std::string("select side does not match the pending choice on '") +
                   t->a.str() + "'",
               G);
        PropPtr sel;
        std::vector<std::pair<Name, PropPtr>> rest;
        for (const auto& [n, ty] : box.members) {
          if (n == t->a) sel = ty;
          else rest.emplace_back(n, ty);
        }
        if (sel->kind != PropKind::Plus)
          fail("NonPlusInWithSelection", "boxed endpoint must carry a + type", G);
        Context prem = G;
        prem.take(*bi);
        prem.add(e_box(box.kind, rest, box.ep, box.ty));
        prem.add_active(t->a, l ? sel->left : sel->right);
        return mk_deriv(l ? Rule::PlusL : Rule::PlusR, jdg(), {check(t->p, prem)}, t->a);
      }
      case ProcKind::Case:
        return check_with(t, G);
      case ProcKind::Client: {
        auto bi = G.box_of(t->a);
        if (!bi || G.entries()[*bi].kind != EntryKind::QBox) {
          if (G.find(t->a))
            fail("NotAForwarder",
                 "client request on '" + t->a.str() +
                     "' does not forward a received request (endpoint not boxed)",
                 G);
          fail("UnknownEndpoint", "endpoint '" + t->a.str() + "' not in context", G);
        }
        const Entry box = G.entries()[*bi];
        PropPtr qty;
        std::vector<std::pair<Name, PropPtr>> rest;
        for (const auto& [n, ty] : box.members) {
          if (n == t->a) qty = ty;
          else rest.emplace_back(n, ty);
        }
        expect_kind(G, e_active(t->a, qty), PropKind::WhyNot, "?");
        Context prem = G;
        prem.take(*bi);
        prem.add(e_box(EntryKind::QBox, rest, box.ep, box.ty));
        prem.add_active(t->b, qty->left);
        return mk_deriv(Rule::Query, jdg(), {check(t->p, prem)}, t->a, t->b);
      }
      case ProcKind::Server: {
        size_t i = need_active(t, G, t->a);
        const Entry e = G.entries()[i];
        expect_kind(G, e, PropKind::OfCourse, "!");
        if (G.star())
          fail("NonExponentialContextUnderServer", "server context cannot hold the close flag",
               G);
        std::vector<std::pair<Name, PropPtr>> members;
        for (size_t k2 = 0; k2 < G.size(); ++k2) {
          if (k2 == i) continue;
          const Entry& g = G.entries()[k2];
          if (g.kind != EntryKind::Active || g.ty->kind != PropKind::WhyNot)
            fail("NonExponentialContextUnderServer",
                 "server context must be all ?-typed actives", G);
          members.emplace_back(g.ep, g.ty);
        }
        Context prem;
        prem.add(e_box(EntryKind::QBox, members, t->b, e.ty->left));
        return mk_deriv(Rule::Bang, jdg(), {check(t->p, prem)}, t->a, t->b);
      }
      case ProcKind::Cut:
        if (!runtime)
          fail("RuntimeForm", "cuts are not part of the forwarder surface language", G);
        return check_cut(t, G);
      case ProcKind::CutHalf:
        if (!runtime)
          fail("RuntimeForm", "runtime cuts only appear in configurations", G);
        return check_cut_tensorpar(t, G);
      case ProcKind::CutMsg:
        fail("RuntimeForm", "a message cut only appears under its blocked cut", G);
    }
    fail("Internal", "unreachable process kind", G);
  }

  // ----- With rule with the selection strategy -----

  DerivPtr check_with(const ProcPtr& t, const Context& G) {
    size_t i = need_active(t, G, t->a);
    const Entry e = G.entries()[i];
    expect_kind(G, e, PropKind::With, "&");

    std::vector<std::pair<Name, PropPtr>> candidates;
    for (const auto& g : G.entries())
      if (g.kind == EntryKind::Active && g.ty->kind == PropKind::Plus && g.ep != t->a)
        candidates.emplace_back(g.ep, g.ty);

    // S0: candidates whose earliest action in both branches is the
    // matching select.
    std::vector<size_t> s0;
    for (size_t c = 0; c < candidates.size(); ++c) {
      auto al = first_action(t->p, candidates[c].first);
      auto ar = first_action(t->q, candidates[c].first);
      if (al == ProcKind::InL && ar == ProcKind::InR) s0.push_back(c);
    }

    auto attempt = [&](const std::vector<size_t>& sel) -> DerivPtr {
      std::vector<std::pair<Name, PropPtr>> chosen;
      for (auto c : sel) chosen.push_back(candidates[c]);
      Context base = G;
      base.take(*base.find(t->a));
      for (auto& [n, ty] : chosen) base.take(*base.find(n));
      Context pl = base;
      pl.add(e_box(EntryKind::LBox, chosen, t->a, e.ty->left));
      Context pr = base;
      pr.add(e_box(EntryKind::RBox, chosen, t->a, e.ty->right));
      auto dl = check(t->p, pl);
      auto dr = check(t->q, pr);
      return mk_deriv(Rule::With, j_sync(t, G), {std::move(dl), std::move(dr)}, t->a);
    };

    std::optional<CheckError> first_err;
    auto try_sel = [&](const std::vector<size_t>& sel) -> DerivPtr {
      try {
        return attempt(sel);
      } catch (const CheckError& err2) {
        if (!first_err) first_err = err2;
        return nullptr;
      }
    };

    if (!s0.empty() || opt.allow_empty_with) {
      if (auto d = try_sel(s0)) return d;
    }
    if (candidates.empty() && !opt.allow_empty_with)
      fail("NonPlusInWithSelection",
           "the with rule needs a nonempty selection of +-typed endpoints", G);
    // decreasing-size backtracking over all nonempty subsets
    size_t n = candidates.size();
    for (size_t size = n; size >= 1; --size) {
      std::vector<size_t> idx;
      std::function<DerivPtr(size_t)> go = [&](size_t start) -> DerivPtr {
        if (idx.size() == size) {
          if (idx == s0) return nullptr; // already tried
          return try_sel(idx);
        }
        for (size_t c = start; c < n; ++c) {
          idx.push_back(c);
          if (auto d = go(c + 1)) return d;
          idx.pop_back();
        }
        return nullptr;
      };
      if (auto d = go(0)) return d;
    }
    if (opt.allow_empty_with && !s0.empty()) {
      if (auto d = try_sel({})) return d;
    }
    if (first_err) throw *first_err;
    fail("NonPlusInWithSelection", "no selection of +-typed endpoints works here", G);
  }

  // ----- runtime cut schemas -----

  // Split the plain entries of G by the free names of the two sides.
  // Entries whose names straddle the split make the plain split fail.
  std::optional<std::pair<Context, Context>> split_plain(const Context& G,
                                                         const NameSet& fl,
                                                         const NameSet& fr,
                                                         bool star_left) {
    Context L, R;
    for (const auto& e : G.entries()) {
      NameSet mine;
      insert_name(mine, e.ep);
      if (e.kind == EntryKind::Buffer) insert_name(mine, e.msg);
      for (const auto& [n, ty] : e.members) insert_name(mine, n);
      bool anyl = false, anyr = false;
      for (auto nm : mine) {
        if (contains(fl, nm)) anyl = true;
        if (contains(fr, nm)) anyr = true;
      }
      if (anyl && anyr) return std::nullopt;
      if (anyl) L.add(e);
      else if (anyr) R.add(e);
      else return std::nullopt; // unused endpoint: neither side can consume it
    }
    L.set_star(G.star() && star_left);
    R.set_star(G.star() && !star_left);
    return std::make_pair(std::move(L), std::move(R));
  }

  DerivPtr check_cut(const ProcPtr& t, const Context& G) {
    std::optional<CheckError> first_err;
    auto attempt = [&](auto&& fn) -> DerivPtr {
      try {
        return fn();
      } catch (const CheckError& e) {
        if (!first_err) first_err = e;
        return nullptr;
      }
    };

    // plain cut, star on either side
    for (bool star_left : {true, false}) {
      if (!G.star() && !star_left) continue;
      auto sp = split_plain(G, set_minus(t->p->fn, t->a), set_minus(t->q->fn, t->b),
                            star_left);
      if (!sp) continue;
      auto d = attempt([&] {
        Context L = sp->first;
        L.add_active(t->a, t->ty);
        Context R = sp->second;
        R.add_active(t->b, dual(t->ty));
        auto dl = check(t->p, L);
        auto dr = check(t->q, R);
        return mk_deriv(Rule::Cut, j_sync(t, G), {std::move(dl), std::move(dr)}, t->a,
                        t->b);
      });
      if (d) return d;
    }

    // oriented runtime schemas; try both orientations
    if (auto d = attempt([&] { return check_cut_oriented(t, G); })) return d;
    {
      ProcPtr flipped = mk_cut(t->b, dual(t->ty), t->a, t->q, t->p);
      if (auto d = attempt([&] { return check_cut_oriented(flipped, G); })) return d;
    }
    if (first_err) throw *first_err;
    fail("StuckConfiguration", "no cut rule applies to this configuration", G);
  }

  // Schemas with the selector/client on the left and the case/server on
  // the right, as printed.
  DerivPtr check_cut_oriented(const ProcPtr& t, const Context& G) {
    NameSet fl = set_minus(t->p->fn, t->a);
    NameSet fr = set_minus(t->q->fn, t->b);

    std::optional<CheckError> first_err;
    auto attempt = [&](auto&& fn) -> DerivPtr {
      try {
        return fn();
      } catch (const CheckError& e) {
        if (!first_err) first_err = e;
        return nullptr;
      }
    };

    // locate a box whose pivot belongs to the left side and whose
    // members split across the cut
    for (size_t bi = 0; bi < G.size(); ++bi) {
      const Entry box = G.entries()[bi];
      if (box.kind != EntryKind::LBox && box.kind != EntryKind::RBox &&
          box.kind != EntryKind::QBox)
        continue;
      if (!contains(fl, box.ep)) continue;
      std::vector<std::pair<Name, PropPtr>> d1, d2;
      bool ok = true;
      for (const auto& [n, ty] : box.members) {
        if (contains(fl, n)) d1.emplace_back(n, ty);
        else if (contains(fr, n)) d2.emplace_back(n, ty);
        else ok = false;
      }
      if (!ok) continue;
      Context rest = G;
      rest.take(bi);
      // split the remaining entries
      for (bool star_left : {true, false}) {
        if (!G.star() && !star_left) continue;
        auto sp = split_plain(rest, fl, fr, star_left);
        if (!sp) continue;
        Context G1 = sp->first;
        Context G2 = sp->second;

        if (box.kind == EntryKind::QBox) {
          if (t->q->kind == ProcKind::Server && t->q->a == t->b &&
              t->ty->kind == PropKind::WhyNot) {
            // Cut!?1: x:?A joins the Q box; server premise is its own box
            auto d = attempt([&] {
              if (!G2.empty())
                fail("StuckConfiguration", "server premise context must be one Q box", G);
              Context L = G1;
              auto mem = d1;
              mem.emplace_back(t->a, t->ty);
              L.add(e_box(EntryKind::QBox, mem, box.ep, box.ty));
              Context R;
              R.add(e_box(EntryKind::QBox, d2, t->q->b, dual(t->ty->left)));
              auto dl = check(t->p, L);
              auto dr = check(t->q->p, R);
              return mk_deriv(Rule::CutBangQuery1, j_sync(t, G),
                              {std::move(dl), std::move(dr)}, t->a, t->q->b);
            });
            if (d) return d;
          }
          // Cut!?2: left endpoint active, right endpoint is a box pivot
          auto d = attempt([&] {
            Context L = G1;
            L.add(e_box(EntryKind::QBox, d1, box.ep, box.ty));
            L.add_active(t->a, t->ty);
            Context R = G2;
            R.add(e_box(EntryKind::QBox, d2, t->b, dual(t->ty)));
            auto dl = check(t->p, L);
            auto dr = check(t->q, R);
            return mk_deriv(Rule::CutBangQuery2, j_sync(t, G),
                            {std::move(dl), std::move(dr)}, t->a, t->b);
          });
          if (d) return d;
          continue;
        }

        // additive boxes
        bool lbox = box.kind == EntryKind::LBox;
        if (t->q->kind == ProcKind::Case && t->q->a == t->b &&
            t->ty->kind == PropKind::Plus) {
          // Cut+&1#: x still inside the box, right side is the case
          auto d = attempt([&] {
            Context L = G1;
            auto mem = d1;
            mem.emplace_back(t->a, t->ty);
            L.add(e_box(box.kind, mem, box.ep, box.ty));
            Context R1 = G2;
            R1.add(e_box(EntryKind::LBox, d2, t->b, dual(t->ty->left)));
            Context R2 = G2;
            R2.add(e_box(EntryKind::RBox, d2, t->b, dual(t->ty->right)));
            auto dl = check(t->p, L);
            auto dr1 = check(t->q->p, R1);
            auto dr2 = check(t->q->q, R2);
            return mk_deriv(lbox ? Rule::CutPlusWith1L : Rule::CutPlusWith1R, j_sync(t, G),
                            {std::move(dl), std::move(dr1), std::move(dr2)}, t->a, t->b);
          });
          if (d) return d;
        }
        // Cut+&2#: left endpoint active, right endpoint is a box pivot
        auto d = attempt([&] {
          Context L = G1;
          L.add(e_box(box.kind, d1, box.ep, box.ty));
          L.add_active(t->a, t->ty);
          Context R = G2;
          R.add(e_box(box.kind, d2, t->b, dual(t->ty)));
          auto dl = check(t->p, L);
          auto dr = check(t->q, R);
          return mk_deriv(lbox ? Rule::CutPlusWith2L : Rule::CutPlusWith2R, j_sync(t, G),
                          {std::move(dl), std::move(dr)}, t->a, t->b);
        });
        if (d) return d;
      }
    }

    // Cut!?1 with an empty residual box on the left: the left premise box
    // is created fresh around x. New pivots cannot appear from nothing in
    // well-typed traces, so reaching this point means no schema applies.
    if (first_err) throw *first_err;
    fail("StuckConfiguration", "no runtime cut schema matches this configuration", G);
  }

  DerivPtr check_cut_tensorpar(const ProcPtr& t, const Context& G) {
    // new (x:B)([]y) (Q | new (u:A)([v]) (P | R))
    if (t->q->kind != ProcKind::CutMsg)
      fail("StuckConfiguration", "a blocked cut must wrap a message cut", G);
    const ProcPtr& inner = t->q;
    PropPtr B = t->ty;
    PropPtr A = inner->ty;
    const ProcPtr& P = inner->p;
    const ProcPtr& Q = t->p;
    const ProcPtr& R = inner->q;
    NameSet fp = set_minus(P->fn, inner->a);
    NameSet fq = set_minus(Q->fn, t->a);
    NameSet fr = set_minus(set_minus(R->fn, inner->b), t->b);

    // buffers of the conclusion whose message feeds P and whose blocked
    // endpoint feeds Q are the split ones
    Context rest;
    Context msgs;
    std::vector<Entry> split_buffers;
    for (const auto& e : G.entries()) {
      if (e.kind == EntryKind::Buffer && contains(fp, e.msg) && contains(fq, e.ep)) {
        split_buffers.push_back(e);
        continue;
      }
      rest.add(e);
    }
    rest.set_star(G.star());
    for (bool star_left : {true, false}) {
      if (!G.star() && !star_left) continue;
      auto sp = split_plain(rest, fq, fr, star_left);
      if (!sp) continue;
      Context PL; // Delta1, u:A
      for (const auto& b : split_buffers) PL.add_active(b.msg, b.msgTy);
      PL.add_active(inner->a, A);
      Context QL = sp->first; // Delta2, Gamma1, x:B
      for (const auto& b : split_buffers) QL.add_active(b.ep, b.ty);
      QL.add_active(t->a, B);
      Context RL = sp->second; // Gamma2, [v:~A]y:~B
      RL.add(e_buffer(inner->b, dual(A), t->b, dual(B)));
      try {
        auto dp = check(P, PL);
        auto dq = check(Q, QL);
        auto dr = check(R, RL);
        return mk_deriv(Rule::CutTensorPar, j_sync(t, G),
                        {std::move(dp), std::move(dq), std::move(dr)}, t->a, t->b,
                        {{inner->a, inner->b}});
      } catch (const CheckError&) {
        continue;
      }
    }
    fail("StuckConfiguration", "blocked cut does not match the tensor-par schema", G);
  }
};

DerivPtr run_check(const ProcPtr& p, const Context& gamma, bool runtime, SyncOptions opt) {
  if (!runtime && has_cut(p))
    throw CheckError("RuntimeForm",
                     "process contains cuts; use the runtime checker for configurations");
  ProcPtr q = barendregt(p, gamma.names());
  SyncChecker c;
  c.runtime = runtime;
  c.opt = opt;
  return c.check(q, gamma);
}

} // namespace

DerivPtr check_sync(const ProcPtr& p, const Context& gamma, SyncOptions opt) {
  return run_check(p, gamma, false, opt);
}

DerivPtr check_sync_runtime(const ProcPtr& p, const Context& gamma, SyncOptions opt) {
  return run_check(p, gamma, true, opt);
}

std::optional<DerivPtr> try_check_sync(const ProcPtr& p, const Context& gamma,
                                       std::string* why, SyncOptions opt) {
  try {
    return check_sync(p, gamma, opt);
  } catch (const CheckError& e) {
    if (why) *why = e.what();
    return std::nullopt;
  }
}

std::optional<DerivPtr> try_check_sync_runtime(const ProcPtr& p, const Context& gamma,
                                               std::string* why, SyncOptions opt) {
  try {
    return check_sync_runtime(p, gamma, opt);
  } catch (const CheckError& e) {
    if (why) *why = e.what();
    return std::nullopt;
  }
}

namespace {

void explain_walk(const DerivPtr& d, size_t depth, std::ostream& os) {
  os << std::string(depth * 2, ' ');
  const ProcPtr& t = d->concl.proc;
  const GlobalPtr& g = d->concl.gt;
  os << rule_name(d->rule);
  switch (d->rule) {
    case Rule::Ax:
    case Rule::CllAx: {
      const auto& G = d->concl.ctx;
      os << " " << t->a.str() << ":" << print_prop(G.entries()[*G.find(t->a)].ty, true)
         << " <-> " << t->b.str() << ":"
         << print_prop(G.entries()[*G.find(t->b)].ty, true);
      break;
    }
    case Rule::One:
    case Rule::CllOne:
      os << " " << t->a.str() << " (* consumed)";
      break;
    case Rule::CohAxiom:
      os << " " << g->one.str() << " = " << g->other.str();
      break;
    default:
      if (d->principal.valid()) os << " " << d->principal.str();
      else if (t) os << " " << t->a.str();
      break;
  }
  os << "\n";
  for (const auto& p : d->premises) explain_walk(p, depth + 1, os);
}

} // namespace

std::string explain(const DerivPtr& d) {
  std::ostringstream os;
  explain_walk(d, 0, os);
  return os.str();
}

} // namespace fwdlab
