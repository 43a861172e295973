#include "fwdlab/coherence.hpp"

#include "fwdlab/logic_cll.hpp"
#include "fwdlab/surface.hpp"

namespace fwdlab {

namespace {

struct CohChecker {
  [[noreturn]] void fail(const std::string& kind, const std::string& msg,
                         const Context& ctx) {
    throw CheckError(kind, msg, print_context(ctx));
  }

  size_t need(const GlobalPtr& g, const Context& D, Name x) {
    if (auto i = D.find(x)) return *i;
    fail("UnknownEndpoint", "endpoint '" + x.str() + "' not in context", D);
  }

  void role(const Context& D, const Entry& e, PropKind k, const char* what) {
    if (e.ty->kind != k)
      fail("EndpointRoleMismatch", "endpoint '" + e.ep.str() + "' must have a " + what +
                                       " type, found " + print_prop(e.ty, true), D);
  }

  DerivPtr check(const GlobalPtr& g, const Context& D) {
    auto jdg = [&] { return j_coh(g, D); };
    switch (g->kind) {
      case GlobalKind::GAxiom: {
        size_t i = need(g, D, g->one);
        size_t j = need(g, D, g->other);
        if (D.size() != 2)
          fail("ResidualContext", "axiom requires exactly two endpoints", D);
        if (!prop_eq(D.entries()[i].ty, g->ty))
          fail("EndpointRoleMismatch",
               "axiom annotation does not match the context type of '" + g->one.str() + "'",
               D);
        if (!prop_eq(D.entries()[j].ty, dual(g->ty)))
          fail("EndpointRoleMismatch", "axiom endpoints are not dual", D);
        return mk_deriv(Rule::CohAxiom, jdg(), {}, g->one);
      }
      case GlobalKind::CloseAll: {
        if (D.size() != g->many.size() + 1)
          fail("ResidualContext", "close must consume the whole context", D);
        for (auto x : g->many) role(D, D.entries()[need(g, D, x)], PropKind::One, "1");
        role(D, D.entries()[need(g, D, g->one)], PropKind::Bot, "bot");
        return mk_deriv(Rule::CohOneBot, jdg(), {}, g->one);
      }
      case GlobalKind::Gather: {
        size_t yi = need(g, D, g->one);
        role(D, D.entries()[yi], PropKind::Par, "par");
        Context left;
        Context right = D;
        right.take(*right.find(g->one));
        for (auto x : g->many) {
          auto i = right.find(x);
          if (!i) fail("UnknownEndpoint", "endpoint '" + x.str() + "' not in context", D);
          role(D, right.entries()[*i], PropKind::Tensor, "*");
          Entry e = right.take(*i);
          left.add_active(x, e.ty->left);
          right.add_active(x, e.ty->right);
        }
        left.add_active(g->one, D.entries()[yi].ty->left);
        right.add_active(g->one, D.entries()[yi].ty->right);
        auto dl = check(g->g, left);
        auto dr = check(g->h, right);
        return mk_deriv(Rule::CohTensorPar, jdg(), {std::move(dl), std::move(dr)}, g->one);
      }
      case GlobalKind::Branch: {
        size_t xi = need(g, D, g->one);
        role(D, D.entries()[xi], PropKind::Plus, "+");
        Context pl = D;
        pl.take(*pl.find(g->one));
        Context pr = pl;
        for (auto y : g->many) {
          auto i = pl.find(y);
          if (!i) fail("UnknownEndpoint", "endpoint '" + y.str() + "' not in context", D);
          role(D, pl.entries()[*i], PropKind::With, "&");
          Entry e = pl.take(*i);
          pl.add_active(y, e.ty->left);
          auto j = pr.find(y);
          Entry e2 = pr.take(*j);
          pr.add_active(y, e2.ty->right);
        }
        pl.add_active(g->one, D.entries()[xi].ty->left);
        pr.add_active(g->one, D.entries()[xi].ty->right);
        auto dl = check(g->g, pl);
        auto dr = check(g->h, pr);
        return mk_deriv(Rule::CohPlusWith, jdg(), {std::move(dl), std::move(dr)}, g->one);
      }
      case GlobalKind::Serve: {
        if (D.size() != g->many.size() + 1)
          fail("ResidualContext", "serve must consume the whole context", D);
        size_t xi = need(g, D, g->one);
        role(D, D.entries()[xi], PropKind::WhyNot, "?");
        Context prem;
        prem.add_active(g->one, D.entries()[xi].ty->left);
        for (auto y : g->many) {
          size_t i = need(g, D, y);
          role(D, D.entries()[i], PropKind::OfCourse, "!");
          prem.add_active(y, D.entries()[i].ty->left);
        }
        return mk_deriv(Rule::CohQueryBang, jdg(), {check(g->g, prem)}, g->one);
      }
    }
    fail("Internal", "unreachable global type kind", D);
  }
};

} // namespace

DerivPtr check_coherence(const GlobalPtr& g, const Context& delta) {
  if (!delta.is_basic())
    throw CheckError("NonBasicContext", "coherence is defined over basic contexts only");
  CohChecker c;
  return c.check(g, delta);
}

std::optional<DerivPtr> try_check_coherence(const GlobalPtr& g, const Context& delta,
                                            std::string* why) {
  try {
    return check_coherence(g, delta);
  } catch (const CheckError& e) {
    if (why) *why = e.what();
    return std::nullopt;
  }
}

} // namespace fwdlab
