#include "fwdlab/logic_cll.hpp"

#include "check_util.hpp"
#include "fwdlab/surface.hpp"

namespace fwdlab {

PropPtr dual(const PropPtr& a) {
  switch (a->kind) {
    case PropKind::Atom: return p_atom(a->atom, !a->positive);
    case PropKind::One: return p_bot();
    case PropKind::Bot: return p_one();
    case PropKind::Tensor: return p_par(dual(a->left), dual(a->right));
    case PropKind::Par: return p_tensor(dual(a->left), dual(a->right));
    case PropKind::Plus: return p_with(dual(a->left), dual(a->right));
    case PropKind::With: return p_plus(dual(a->left), dual(a->right));
    case PropKind::OfCourse: return p_whynot(dual(a->left));
    case PropKind::WhyNot: return p_ofcourse(dual(a->left));
  }
  return a;
}

Context dual_context(const Context& ctx) {
  Context out;
  for (const auto& e : ctx.entries()) {
    if (e.kind != EntryKind::Active)
      throw ContextError("dual_context expects a basic context");
    out.add_active(e.ep, dual(e.ty));
  }
  out.set_star(ctx.star());
  return out;
}

Context erase_context(const Context& gamma) {
  Context out;
  for (const auto& e : gamma.entries()) {
    switch (e.kind) {
      case EntryKind::Active:
        out.add_active(e.ep, e.ty);
        break;
      case EntryKind::Buffer:
        out.add_active(e.msg, e.msgTy);
        out.add_active(e.ep, e.ty);
        break;
      default:
        for (const auto& [n, ty] : e.members) out.add_active(n, ty);
        out.add_active(e.ep, e.ty);
        break;
    }
  }
  return out; // the close flag is dropped
}

namespace {

struct CllChecker {
  [[noreturn]] void fail(const std::string& kind, const std::string& msg,
                         const Context& ctx) {
    throw CheckError(kind, msg, print_context(ctx));
  }

  DerivPtr check(const ProcPtr& t, const Context& G) {
    auto active = [&](Name x) -> const Entry& {
      auto i = G.find(x);
      if (!i) fail("UnknownEndpoint", "endpoint '" + x.str() + "' not in context", G);
      return G.entries()[*i];
    };
    auto expect_kind = [&](const Entry& e, PropKind k, const char* what) {
      if (e.ty->kind != k)
        fail("TypeMismatch", "endpoint '" + e.ep.str() + "' expected " + what +
                                 ", found " + print_prop(e.ty, true), G);
    };
    auto done = [&](Rule r, std::vector<DerivPtr> prem, Name principal) {
      return mk_deriv(r, j_cll(t, G), std::move(prem), principal);
    };

    switch (t->kind) {
      case ProcKind::Link: {
        if (G.size() != 2)
          fail("UnusedEndpoint", "a link consumes exactly two endpoints", G);
        const Entry& ex = active(t->a);
        const Entry& ey = active(t->b);
        if (!prop_eq(ex.ty, dual(ey.ty)))
          fail("TypeMismatch", "link endpoints are not dual", G);
        return done(Rule::CllAx, {}, t->a);
      }
      case ProcKind::Close: {
        const Entry& ex = active(t->a);
        expect_kind(ex, PropKind::One, "1");
        if (G.size() != 1) fail("UnusedEndpoint", "close leaves endpoints unused", G);
        return done(Rule::CllOne, {}, t->a);
      }
      case ProcKind::Wait: {
        auto i = G.find(t->a);
        if (!i) fail("UnknownEndpoint", "endpoint '" + t->a.str() + "' not in context", G);
        expect_kind(G.entries()[*i], PropKind::Bot, "bot");
        Context prem = G;
        prem.take(*i);
        return done(Rule::CllBot, {check(t->p, prem)}, t->a);
      }
      case ProcKind::Recv: {
        auto i = G.find(t->a);
        if (!i) fail("UnknownEndpoint", "endpoint '" + t->a.str() + "' not in context", G);
        const Entry e = G.entries()[*i];
        expect_kind(e, PropKind::Par, "par");
        Context prem = G;
        prem.take(*i);
        prem.add_active(t->b, e.ty->left);
        prem.add_active(t->a, e.ty->right);
        return done(Rule::CllPar, {check(t->p, prem)}, t->a);
      }
      case ProcKind::Send: {
        auto i = G.find(t->a);
        if (!i) fail("UnknownEndpoint", "endpoint '" + t->a.str() + "' not in context", G);
        const Entry e = G.entries()[*i];
        expect_kind(e, PropKind::Tensor, "*");
        Context left;
        Context right;
        for (size_t k = 0; k < G.size(); ++k) {
          if (k == *i) continue;
          const Entry& g = G.entries()[k];
          if (contains(t->p->fn, g.ep))
            left.add(g);
          else
            right.add(g);
        }
        left.add_active(t->b, e.ty->left);
        right.add_active(t->a, e.ty->right);
        auto dl = check(t->p, left);
        auto dr = check(t->q, right);
        return done(Rule::CllTensor, {std::move(dl), std::move(dr)}, t->a);
      }
      case ProcKind::InL:
      case ProcKind::InR: {
        bool l = t->kind == ProcKind::InL;
        auto i = G.find(t->a);
        if (!i) fail("UnknownEndpoint", "endpoint '" + t->a.str() + "' not in context", G);
        const Entry e = G.entries()[*i];
        expect_kind(e, PropKind::Plus, "+");
        Context prem = G;
        prem.take(*i);
        prem.add_active(t->a, l ? e.ty->left : e.ty->right);
        return done(l ? Rule::CllPlusL : Rule::CllPlusR, {check(t->p, prem)}, t->a);
      }
      case ProcKind::Case: {
        auto i = G.find(t->a);
        if (!i) fail("UnknownEndpoint", "endpoint '" + t->a.str() + "' not in context", G);
        const Entry e = G.entries()[*i];
        expect_kind(e, PropKind::With, "&");
        Context pl = G;
        pl.take(*i);
        Context pr = pl;
        pl.add_active(t->a, e.ty->left);
        pr.add_active(t->a, e.ty->right);
        auto dl = check(t->p, pl);
        auto dr = check(t->q, pr);
        return done(Rule::CllWith, {std::move(dl), std::move(dr)}, t->a);
      }
      case ProcKind::Client: {
        auto i = G.find(t->a);
        if (!i) fail("UnknownEndpoint", "endpoint '" + t->a.str() + "' not in context", G);
        const Entry e = G.entries()[*i];
        expect_kind(e, PropKind::WhyNot, "?");
        Context prem = G;
        prem.take(*i);
        prem.add_active(t->b, e.ty->left);
        return done(Rule::CllQuery, {check(t->p, prem)}, t->a);
      }
      case ProcKind::Server: {
        auto i = G.find(t->a);
        if (!i) fail("UnknownEndpoint", "endpoint '" + t->a.str() + "' not in context", G);
        const Entry e = G.entries()[*i];
        expect_kind(e, PropKind::OfCourse, "!");
        for (size_t k = 0; k < G.size(); ++k)
          if (k != *i && G.entries()[k].ty->kind != PropKind::WhyNot)
            fail("NonExponentialContextUnderServer",
                 "server context must be ?-typed, found " +
                     print_prop(G.entries()[k].ty, true) + " at '" +
                     G.entries()[k].ep.str() + "'",
                 G);
        Context prem = G;
        prem.take(*i);
        prem.add_active(t->b, e.ty->left);
        return done(Rule::CllBang, {check(t->p, prem)}, t->a);
      }
      case ProcKind::Cut: {
        Context left;
        Context right;
        for (const auto& g : G.entries()) {
          if (contains(t->p->fn, g.ep))
            left.add(g);
          else
            right.add(g);
        }
        left.add_active(t->a, t->ty);
        right.add_active(t->b, dual(t->ty));
        auto dl = check(t->p, left);
        auto dr = check(t->q, right);
        auto d = mk_deriv(Rule::CllCut, j_cll(t, G), {std::move(dl), std::move(dr)}, t->a,
                          t->b);
        return d;
      }
      default:
        fail("RuntimeForm", "runtime cut forms are not CLL-checkable", G);
    }
  }
};

} // namespace

DerivPtr check_cll(const ProcPtr& p, const Context& delta) {
  if (!delta.is_basic()) throw CheckError("NonBasicContext", "CLL expects a basic context");
  ProcPtr q = barendregt(p, delta.names());
  CllChecker c;
  return c.check(q, delta);
}

std::optional<DerivPtr> try_check_cll(const ProcPtr& p, const Context& delta,
                                      std::string* why) {
  try {
    return check_cll(p, delta);
  } catch (const CheckError& e) {
    if (why) *why = e.what();
    return std::nullopt;
  }
}

} // namespace fwdlab
