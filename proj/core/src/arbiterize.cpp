#include "fwdlab/arbiterize.hpp"

#include "fwdlab/coherence.hpp"
#include "fwdlab/logic_cll.hpp"
#include "fwdlab/logic_sync.hpp"
#include "fwdlab/surface.hpp"

#include <map>

namespace fwdlab {

namespace {

using Ren = std::map<Name, Name>;

Name look(const Ren& ren, Name x) {
  auto it = ren.find(x);
  return it == ren.end() ? x : it->second;
}

ProcPtr arb(const GlobalPtr& g, const Ren& ren) {
  switch (g->kind) {
    case GlobalKind::GAxiom:
      return mk_link(look(ren, g->one), look(ren, g->other));
    case GlobalKind::CloseAll: {
      ProcPtr body = mk_close(look(ren, g->one));
      for (auto it = g->many.rbegin(); it != g->many.rend(); ++it)
        body = mk_wait(look(ren, *it), std::move(body));
      return body;
    }
    case GlobalKind::Gather: {
      // recv x1' u1 ... recv xn' un . y'[v].( [[G]]{u/x',v/y'} | [[H]] )
      Ren inner;
      std::vector<Name> us;
      for (auto x : g->many) {
        Name u = fresh("u");
        inner[x] = u;
        us.push_back(u);
      }
      Name v = fresh("v");
      inner[g->one] = v;
      ProcPtr payload = arb(g->g, inner);
      ProcPtr cont = arb(g->h, ren);
      ProcPtr body = mk_send(look(ren, g->one), v, std::move(payload), std::move(cont));
      for (size_t i = g->many.size(); i-- > 0;)
        body = mk_recv(look(ren, g->many[i]), us[i], std::move(body));
      return body;
    }
    case GlobalKind::Branch: {
      ProcPtr l = arb(g->g, ren);
      ProcPtr r = arb(g->h, ren);
      for (auto it = g->many.rbegin(); it != g->many.rend(); ++it) {
        l = mk_inl(look(ren, *it), std::move(l));
        r = mk_inr(look(ren, *it), std::move(r));
      }
      return mk_case(look(ren, g->one), std::move(l), std::move(r));
    }
    case GlobalKind::Serve: {
      // !x'(u). ?y1'[v1]. ... ?yn'[vn]. [[G]]{u/x', v/y'}
      Ren inner;
      Name u = fresh("u");
      inner[g->one] = u;
      std::vector<Name> vs;
      for (auto y : g->many) {
        Name v = fresh("v");
        inner[y] = v;
        vs.push_back(v);
      }
      ProcPtr body = arb(g->g, inner);
      for (size_t i = g->many.size(); i-- > 0;)
        body = mk_client(look(ren, g->many[i]), vs[i], std::move(body));
      return mk_server(look(ren, g->one), u, std::move(body));
    }
  }
  return nullptr;
}

} // namespace

ProcPtr arbiterize(const GlobalPtr& g) {
  Ren ren;
  for (auto x : global_free_names(g)) ren[x] = primed(x);
  return arb(g, ren);
}

Context arbiter_context(const Context& delta) {
  Context out;
  for (const auto& e : delta.entries()) {
    if (e.kind != EntryKind::Active)
      throw ContextError("arbiter_context expects a basic context");
    out.add_active(primed(e.ep), dual(e.ty));
  }
  return out;
}

std::pair<ProcPtr, DerivPtr> soundness_certificate(const GlobalPtr& g,
                                                   const Context& delta) {
  check_coherence(g, delta);
  ProcPtr p = arbiterize(g);
  try {
    DerivPtr d = check_sync(p, arbiter_context(delta));
    return {std::move(p), std::move(d)};
  } catch (const CheckError& e) {
    throw InternalError(std::string("soundness violation: the arbiter of a coherent "
                                    "global type failed to type: ") +
                        e.what());
  }
}

namespace {

bool shape(const ProcPtr& p);

// A gather block: receives strictly before the send, payload and
// continuation again arbiter-shaped.
bool gather_block(const ProcPtr& p) {
  ProcPtr cur = p;
  while (cur->kind == ProcKind::Recv) cur = cur->p;
  if (cur->kind != ProcKind::Send) return false;
  return shape(cur->p) && shape(cur->q);
}

bool select_chain(const ProcPtr& p, ProcKind k) {
  ProcPtr cur = p;
  size_t n = 0;
  while (cur->kind == k) {
    cur = cur->p;
    ++n;
  }
  return n > 0 && shape(cur);
}

bool client_chain(const ProcPtr& p) {
  ProcPtr cur = p;
  size_t n = 0;
  while (cur->kind == ProcKind::Client) {
    cur = cur->p;
    ++n;
  }
  return n > 0 && shape(cur);
}

bool shape(const ProcPtr& p) {
  switch (p->kind) {
    case ProcKind::Link:
      return true;
    case ProcKind::Close:
      return true;
    case ProcKind::Wait:
      return shape(p->p);
    case ProcKind::Recv:
      return gather_block(p);
    case ProcKind::Case:
      return select_chain(p->p, ProcKind::InL) && select_chain(p->q, ProcKind::InR);
    case ProcKind::Server:
      return client_chain(p->p);
    default:
      return false;
  }
}

} // namespace

bool is_arbiter_shape(const ProcPtr& p) { return shape(p); }

} // namespace fwdlab
