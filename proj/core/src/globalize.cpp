#include "fwdlab/globalize.hpp"

#include "fwdlab/coherence.hpp"
#include "fwdlab/logic_cll.hpp"
#include "fwdlab/logic_sync.hpp"
#include "fwdlab/surface.hpp"

#include <map>

namespace fwdlab {

namespace {

[[noreturn]] void malformed(const std::string& msg) {
  throw CheckError("MalformedDerivation", msg);
}

ProcPtr chain_inl(const std::vector<std::pair<Name, Name>>& chain, ProcPtr body) {
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    body = mk_inl(it->first, std::move(body));
  return body;
}

ProcPtr chain_inr(const std::vector<std::pair<Name, Name>>& chain, ProcPtr body) {
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    body = mk_inr(it->first, std::move(body));
  return body;
}

ProcPtr chain_client(const std::vector<std::pair<Name, Name>>& chain, ProcPtr body) {
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    body = mk_client(it->first, it->second, std::move(body));
  return body;
}

ProcPtr chain_recv(const std::vector<std::pair<Name, Name>>& chain, ProcPtr body) {
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    body = mk_recv(it->first, it->second, std::move(body));
  return body;
}

ProcPtr chain_wait(const std::vector<std::pair<Name, Name>>& chain, ProcPtr body) {
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    body = mk_wait(it->first, std::move(body));
  return body;
}

// The witness of a node recomputed from its rule and premise witnesses.
ProcPtr node_process(const Derivation& d, const std::vector<DerivPtr>& prem) {
  auto p0 = [&] { return prem[0]->concl.proc; };
  auto p1 = [&] { return prem[1]->concl.proc; };
  switch (d.rule) {
    case Rule::Ax:
    case Rule::One:
    case Rule::OneBotPartial:
    case Rule::OneBotFull:
      return d.concl.proc;
    case Rule::Bot: return mk_wait(d.principal, p0());
    case Rule::Par: return mk_recv(d.principal, d.principal_binder, p0());
    case Rule::Tensor: return mk_send(d.principal, d.principal_binder, p0(), p1());
    case Rule::With: return mk_case(d.principal, p0(), p1());
    case Rule::PlusL: return mk_inl(d.principal, p0());
    case Rule::PlusR: return mk_inr(d.principal, p0());
    case Rule::Query: return mk_client(d.principal, d.principal_binder, p0());
    case Rule::Bang: return mk_server(d.principal, d.principal_binder, p0());
    case Rule::PlusWithPartial:
    case Rule::PlusWithFull:
      return mk_case(d.principal, chain_inl(d.chain, p0()), chain_inr(d.chain, p1()));
    case Rule::QueryBangPartial:
    case Rule::QueryBangFull:
      return mk_server(d.principal, d.principal_binder, chain_client(d.chain, p0()));
    case Rule::TensorParPartial:
    case Rule::TensorParFull:
      return chain_recv(d.chain, mk_send(d.principal, d.principal_binder, p0(), p1()));
    default:
      malformed(std::string("node_process: unsupported rule ") + rule_name(d.rule));
  }
}

DerivPtr rebuilt(const Derivation& d, std::vector<DerivPtr> prem, Context ctx) {
  Judgement j = d.concl;
  j.ctx = std::move(ctx);
  Derivation shell = d;
  shell.premises = prem;
  j.proc = node_process(shell, prem);
  return mk_deriv(d.rule, std::move(j), std::move(prem), d.principal, d.principal_binder,
                  d.chain);
}

// Rename a free endpoint throughout a derivation (contexts and witnesses).
Context rename_ctx(const Context& c, Name from, Name to) {
  Context out;
  auto rn = [&](Name n) { return n == from ? to : n; };
  for (const auto& e : c.entries()) {
    switch (e.kind) {
      case EntryKind::Active:
        out.add(e_active(rn(e.ep), e.ty));
        break;
      case EntryKind::Buffer:
        out.add(e_buffer(rn(e.msg), e.msgTy, rn(e.ep), e.ty));
        break;
      default: {
        std::vector<std::pair<Name, PropPtr>> mem;
        for (const auto& [n, ty] : e.members) mem.emplace_back(rn(n), ty);
        out.add(e_box(e.kind, std::move(mem), rn(e.ep), e.ty));
      }
    }
  }
  out.set_star(c.star());
  return out;
}

DerivPtr rename_deriv(const DerivPtr& d, Name from, Name to) {
  std::vector<DerivPtr> prem;
  prem.reserve(d->premises.size());
  for (const auto& p : d->premises) prem.push_back(rename_deriv(p, from, to));
  Judgement j = d->concl;
  j.ctx = rename_ctx(j.ctx, from, to);
  if (j.proc) j.proc = substitute(j.proc, from, to);
  auto rn = [&](Name n) { return n == from ? to : n; };
  std::vector<std::pair<Name, Name>> chain;
  for (auto [a, b] : d->chain) chain.emplace_back(rn(a), rn(b));
  return mk_deriv(d->rule, std::move(j), std::move(prem), rn(d->principal),
                  rn(d->principal_binder), std::move(chain));
}

// Does this conclusion context hold x as a member of a box?
std::optional<EntryKind> boxed_side(const Context& c, Name x) {
  if (auto i = c.box_of(x)) return c.entries()[*i].kind;
  return std::nullopt;
}

struct HoistTarget {
  Name x;
  EntryKind side;          // which box kind x sits in
  Rule select_rule;        // PlusL / PlusR / Query
  Name binder;             // unified fresh binder for Query hoists
  PropPtr opened_ty;       // type of the freed endpoint in the premise
};

// Move x (or its fresh binder) out of its box in a conclusion context.
Context open_box(const Context& c, const HoistTarget& t) {
  auto bi = c.box_of(t.x);
  if (!bi) malformed("hoist: endpoint left its box unexpectedly");
  const Entry box = c.entries()[*bi];
  std::vector<std::pair<Name, PropPtr>> rest;
  for (const auto& [n, ty] : box.members)
    if (n != t.x) rest.emplace_back(n, ty);
  Context out = c;
  out.take(*bi);
  out.add(e_box(box.kind, rest, box.ep, box.ty));
  Name freed = t.select_rule == Rule::Query ? t.binder : t.x;
  out.add_active(freed, t.opened_ty);
  return out;
}

// Lemma "+#/? invertibility": re-root the derivation at the select/client
// rule on t.x, preserving the structure otherwise. Returns the derivation
// of the *premise* of that rule (the caller re-wraps when it wants the
// rule at the root).
DerivPtr hoist_select(const DerivPtr& d, const HoistTarget& t) {
  // base case: d is already the matching rule on x
  if (d->rule == t.select_rule && d->principal == t.x) {
    if (t.select_rule == Rule::Query && d->principal_binder != t.binder)
      return rename_deriv(d->premises[0], d->principal_binder, t.binder);
    return d->premises[0];
  }
  if (d->premises.empty())
    malformed("hoist: reached a leaf without meeting the select");
  std::vector<DerivPtr> prem;
  for (const auto& p : d->premises) {
    if (boxed_side(p->concl.ctx, t.x))
      prem.push_back(hoist_select(p, t));
    else
      prem.push_back(p);
  }
  return rebuilt(*d, std::move(prem), open_box(d->concl.ctx, t));
}

HoistTarget make_target(const DerivPtr& d, Name x) {
  auto bi = d->concl.ctx.box_of(x);
  if (!bi) throw CheckError("NotInBox", "endpoint '" + x.str() + "' is not boxed here");
  const Entry& box = d->concl.ctx.entries()[*bi];
  PropPtr mty;
  for (const auto& [n, ty] : box.members)
    if (n == x) mty = ty;
  HoistTarget t;
  t.x = x;
  t.side = box.kind;
  switch (box.kind) {
    case EntryKind::LBox:
      t.select_rule = Rule::PlusL;
      t.opened_ty = mty->left;
      break;
    case EntryKind::RBox:
      t.select_rule = Rule::PlusR;
      t.opened_ty = mty->right;
      break;
    default:
      t.select_rule = Rule::Query;
      t.binder = fresh("h");
      t.opened_ty = mty->left;
      break;
  }
  return t;
}

} // namespace

DerivPtr permute_select_down(const DerivPtr& d, Name x) {
  HoistTarget t = make_target(d, x);
  // short-circuit: already rooted there
  if (d->rule == t.select_rule && d->principal == x) return d;
  DerivPtr inner = hoist_select(d, t);
  Judgement j = d->concl;
  Name freed = t.select_rule == Rule::Query ? t.binder : x;
  switch (t.select_rule) {
    case Rule::PlusL: j.proc = mk_inl(x, inner->concl.proc); break;
    case Rule::PlusR: j.proc = mk_inr(x, inner->concl.proc); break;
    default: j.proc = mk_client(x, freed, inner->concl.proc); break;
  }
  return mk_deriv(t.select_rule, std::move(j), {inner}, x,
                  t.select_rule == Rule::Query ? freed : Name{});
}

namespace {

// ----- |-2: replace With/Bang by +&/?! compounds and grow them full -----

DerivPtr to_sys2(const DerivPtr& d) {
  std::vector<DerivPtr> prem;
  for (const auto& p : d->premises) prem.push_back(to_sys2(p));
  Judgement j = d->concl;
  j.sys = System::Compound2;
  Rule r = d->rule;
  if (r == Rule::With) r = Rule::PlusWithPartial;
  if (r == Rule::Bang) r = Rule::QueryBangPartial;
  return mk_deriv(r, std::move(j), std::move(prem), d->principal, d->principal_binder,
                  d->chain);
}

std::vector<std::pair<Name, PropPtr>> residual_of(const DerivPtr& d) {
  // what the first premise still boxes with the node's pivot
  Name pivot = d->rule == Rule::PlusWithPartial || d->rule == Rule::PlusWithFull
                   ? d->principal
                   : d->principal_binder;
  const Context& c = d->premises[0]->concl.ctx;
  if (auto i = c.find(pivot)) {
    const auto& e = c.entries()[*i];
    if (e.kind != EntryKind::Active) return e.members;
  }
  return {};
}

DerivPtr grow_once(const DerivPtr& d) {
  auto residual = residual_of(d);
  if (residual.empty()) malformed("grow: nothing to grow");
  Name w = residual.front().first;

  if (d->rule == Rule::PlusWithPartial) {
    DerivPtr hl = permute_select_down(d->premises[0], w);
    DerivPtr hr = permute_select_down(d->premises[1], w);
    if (hl->rule != Rule::PlusL || hr->rule != Rule::PlusR)
      malformed("grow: premises did not hoist to matching selects");
    auto chain = d->chain;
    chain.emplace_back(w, Name{});
    std::vector<DerivPtr> prem{hl->premises[0], hr->premises[0]};
    auto next = residual;
    next.erase(next.begin());
    Rule r = next.empty() ? Rule::PlusWithFull : Rule::PlusWithPartial;
    Judgement j = d->concl;
    Derivation shell = *d;
    shell.chain = chain;
    shell.premises = prem;
    j.proc = node_process(shell, prem);
    return mk_deriv(r, std::move(j), std::move(prem), d->principal, d->principal_binder,
                    std::move(chain));
  }
  if (d->rule == Rule::QueryBangPartial) {
    DerivPtr h = permute_select_down(d->premises[0], w);
    if (h->rule != Rule::Query) malformed("grow: premise did not hoist to a client");
    auto chain = d->chain;
    chain.emplace_back(w, h->principal_binder);
    std::vector<DerivPtr> prem{h->premises[0]};
    auto next = residual;
    next.erase(next.begin());
    Rule r = next.empty() ? Rule::QueryBangFull : Rule::QueryBangPartial;
    Judgement j = d->concl;
    Derivation shell = *d;
    shell.chain = chain;
    shell.premises = prem;
    j.proc = node_process(shell, prem);
    return mk_deriv(r, std::move(j), std::move(prem), d->principal, d->principal_binder,
                    std::move(chain));
  }
  malformed("grow: not a growable compound");
}

DerivPtr grow_all(const DerivPtr& d) {
  std::vector<DerivPtr> prem;
  for (const auto& p : d->premises) prem.push_back(grow_all(p));
  DerivPtr cur = rebuilt(*d, std::move(prem), d->concl.ctx);
  while ((cur->rule == Rule::PlusWithPartial || cur->rule == Rule::QueryBangPartial) &&
         !residual_of(cur).empty())
    cur = grow_once(cur);
  // relabel a partial whose residual was empty from the start
  if (cur->rule == Rule::PlusWithPartial && residual_of(cur).empty())
    cur = mk_deriv(Rule::PlusWithFull, cur->concl, cur->premises, cur->principal,
                   cur->principal_binder, cur->chain);
  if (cur->rule == Rule::QueryBangPartial && residual_of(cur).empty())
    cur = mk_deriv(Rule::QueryBangFull, cur->concl, cur->premises, cur->principal,
                   cur->principal_binder, cur->chain);
  return cur;
}

bool has_rule(const DerivPtr& d, std::initializer_list<Rule> rs) {
  for (auto r : rs)
    if (d->rule == r) return true;
  for (const auto& p : d->premises)
    if (has_rule(p, rs)) return true;
  return false;
}

} // namespace

DerivPtr eliminate_with_bang(const DerivPtr& d) {
  for (const auto& e : d->concl.ctx.entries())
    if (e.kind == EntryKind::LBox || e.kind == EntryKind::RBox ||
        e.kind == EntryKind::QBox)
      throw CheckError("BoxedConclusion",
                       "the conclusion context must be free of L/R/Q boxes");
  DerivPtr out = grow_all(to_sys2(d));
  if (has_rule(out, {Rule::With, Rule::Bang, Rule::PlusL, Rule::PlusR, Rule::Query}))
    throw InternalError("with/bang elimination left base additive or exponential rules");
  return out;
}

namespace {

// ----- |-3: fold Par/Bot into the */1 compounds that consume them -----

size_t buffer_count(const Context& c) {
  size_t n = 0;
  for (const auto& e : c.entries())
    if (e.kind == EntryKind::Buffer) ++n;
  return n;
}

DerivPtr to_sys3(const DerivPtr& d) {
  std::vector<DerivPtr> prem;
  for (const auto& p : d->premises) prem.push_back(to_sys3(p));
  Judgement j = d->concl;
  j.sys = System::Compound3;
  Rule r = d->rule;
  if (r == Rule::Tensor)
    r = buffer_count(j.ctx) ? Rule::TensorParPartial : Rule::TensorParFull;
  if (r == Rule::One) r = j.ctx.star() ? Rule::OneBotPartial : Rule::OneBotFull;
  std::vector<std::pair<Name, Name>> chain = d->chain;
  if (d->rule == Rule::Tensor) chain.clear();
  if (d->rule == Rule::One) chain.clear();
  return mk_deriv(r, std::move(j), std::move(prem), d->principal, d->principal_binder,
                  std::move(chain));
}

// Fold `recv x msg` into every compound that consumes the buffered
// message; the conclusion trades the buffer for x at the par type.
DerivPtr hoist_recv(const DerivPtr& d, Name msg, Name blocked, PropPtr parTy) {
  bool consumed_here = false;
  if (d->rule == Rule::TensorParPartial || d->rule == Rule::TensorParFull)
    consumed_here = d->premises[0]->concl.ctx.mentions(msg);
  if (consumed_here) {
    auto chain = d->chain;
    chain.insert(chain.begin(), {blocked, msg});
    Context ctx = d->concl.ctx;
    auto bi = ctx.buffer_of_msg(msg);
    if (!bi) malformed("recv fold: buffer missing at the consuming node");
    ctx.take(*bi);
    ctx.add_active(blocked, parTy);
    Rule r = buffer_count(ctx) ? Rule::TensorParPartial : Rule::TensorParFull;
    Judgement j = d->concl;
    j.ctx = ctx;
    Derivation shell = *d;
    shell.chain = chain;
    j.proc = node_process(shell, d->premises);
    return mk_deriv(r, std::move(j), d->premises, d->principal, d->principal_binder,
                    std::move(chain));
  }
  if (d->premises.empty()) malformed("recv fold: buffer reached a leaf");
  std::vector<DerivPtr> prem;
  for (const auto& p : d->premises) {
    if (p->concl.ctx.buffer_of_msg(msg))
      prem.push_back(hoist_recv(p, msg, blocked, parTy));
    else
      prem.push_back(p);
  }
  Context ctx = d->concl.ctx;
  auto bi = ctx.buffer_of_msg(msg);
  if (!bi) malformed("recv fold: buffer missing on the path");
  ctx.take(*bi);
  ctx.add_active(blocked, parTy);
  // a tensor-par node may change partiality when the buffer leaves it
  Rule r = d->rule;
  if (r == Rule::TensorParPartial && buffer_count(ctx) == 0) r = Rule::TensorParFull;
  Derivation shell = *d;
  shell.rule = r;
  shell.premises = prem;
  Judgement j = d->concl;
  j.ctx = ctx;
  j.proc = node_process(shell, prem);
  return mk_deriv(r, std::move(j), std::move(prem), d->principal, d->principal_binder,
                  d->chain);
}

// Fold `wait x` into every 1-compound that holds the close flag.
DerivPtr hoist_wait(const DerivPtr& d, Name x, PropPtr botTy, bool keep_star) {
  if (d->rule == Rule::OneBotPartial) {
    auto chain = d->chain;
    chain.insert(chain.begin(), {x, Name{}});
    Context ctx = d->concl.ctx;
    ctx.add_active(x, botTy);
    ctx.set_star(keep_star);
    Rule r = keep_star ? Rule::OneBotPartial : Rule::OneBotFull;
    Judgement j = d->concl;
    j.ctx = ctx;
    j.proc = mk_wait(x, d->concl.proc);
    return mk_deriv(r, std::move(j), {}, d->principal, d->principal_binder,
                    std::move(chain));
  }
  if (d->premises.empty()) malformed("wait fold: close flag reached a non-1 leaf");
  std::vector<DerivPtr> prem;
  for (const auto& p : d->premises) {
    if (p->concl.ctx.star())
      prem.push_back(hoist_wait(p, x, botTy, keep_star));
    else
      prem.push_back(p);
  }
  Context ctx = d->concl.ctx;
  ctx.set_star(keep_star);
  ctx.add_active(x, botTy);
  Derivation shell = *d;
  shell.premises = prem;
  Judgement j = d->concl;
  j.ctx = ctx;
  j.proc = node_process(shell, prem);
  return mk_deriv(d->rule, std::move(j), std::move(prem), d->principal,
                  d->principal_binder, d->chain);
}

bool find_topmost(const DerivPtr& d, std::vector<int>& path) {
  // returns true when d's subtree contains a Par/Bot node; fills path to
  // a topmost one (no Par/Bot strictly above it)
  for (size_t i = 0; i < d->premises.size(); ++i) {
    path.push_back(static_cast<int>(i));
    if (find_topmost(d->premises[i], path)) return true;
    path.pop_back();
  }
  if (d->rule == Rule::Par || d->rule == Rule::Bot) return true;
  return false;
}

DerivPtr get_at(const DerivPtr& d, const std::vector<int>& path, size_t idx) {
  if (idx == path.size()) return d;
  return get_at(d->premises[static_cast<size_t>(path[idx])], path, idx + 1);
}

DerivPtr replace_at(const DerivPtr& d, const std::vector<int>& path, size_t idx,
                    const DerivPtr& repl) {
  if (idx == path.size()) return repl;
  std::vector<DerivPtr> prem = d->premises;
  size_t i = static_cast<size_t>(path[idx]);
  prem[i] = replace_at(prem[i], path, idx + 1, repl);
  Derivation shell = *d;
  shell.premises = prem;
  Judgement j = d->concl;
  j.proc = node_process(shell, prem);
  return mk_deriv(d->rule, std::move(j), std::move(prem), d->principal,
                  d->principal_binder, d->chain);
}

} // namespace

DerivPtr eliminate_tensor_one(const DerivPtr& d) {
  DerivPtr cur = to_sys3(d);
  for (;;) {
    std::vector<int> path;
    if (!find_topmost(cur, path)) break;
    DerivPtr node = get_at(cur, path, 0);
    DerivPtr repl;
    if (node->rule == Rule::Par) {
      // premise concludes ..., [msg:A] x:B; replace by ..., x:A par B
      const Context& pctx = node->premises[0]->concl.ctx;
      auto bi = pctx.find(node->principal);
      if (!bi || pctx.entries()[*bi].kind != EntryKind::Buffer)
        malformed("par elimination: premise does not buffer the subject");
      PropPtr parTy = p_par(pctx.entries()[*bi].msgTy, pctx.entries()[*bi].ty);
      repl = hoist_recv(node->premises[0], node->principal_binder, node->principal, parTy);
    } else {
      bool keep = node->concl.ctx.star();
      repl = hoist_wait(node->premises[0], node->principal, p_bot(), keep);
    }
    if (!(repl->concl.ctx == node->concl.ctx))
      throw InternalError("mult/unit elimination changed a conclusion context");
    cur = replace_at(cur, path, 0, repl);
  }
  if (has_rule(cur, {Rule::Par, Rule::Bot, Rule::Tensor, Rule::One}))
    throw InternalError("tensor/one elimination left base multiplicative or unit rules");
  return cur;
}

namespace {

GlobalPtr rename_global(const GlobalPtr& g, const std::map<Name, Name>& m) {
  auto rn = [&](Name n) {
    auto it = m.find(n);
    return it == m.end() ? n : it->second;
  };
  std::vector<Name> many;
  for (auto n : g->many) many.push_back(rn(n));
  switch (g->kind) {
    case GlobalKind::CloseAll: return g_close_all(std::move(many), rn(g->one));
    case GlobalKind::Gather:
      return g_gather(std::move(many), rn(g->one), rename_global(g->g, m),
                      rename_global(g->h, m));
    case GlobalKind::Branch:
      return g_branch(rn(g->one), std::move(many), rename_global(g->g, m),
                      rename_global(g->h, m));
    case GlobalKind::Serve:
      return g_serve(rn(g->one), std::move(many), rename_global(g->g, m));
    case GlobalKind::GAxiom: return g_axiom(rn(g->one), g->ty, rn(g->other));
  }
  return g;
}

} // namespace

GlobalPtr read_off_global(const DerivPtr& d) {
  switch (d->rule) {
    case Rule::Ax: {
      const ProcPtr& t = d->concl.proc;
      const Context& G = d->concl.ctx;
      PropPtr a_ty = G.entries()[*G.find(t->a)].ty;
      return g_axiom(t->a, dual(a_ty), t->b);
    }
    case Rule::OneBotFull: {
      std::vector<Name> xs;
      for (auto [n, b] : d->chain) xs.push_back(n);
      // chains are recorded during folding; a leaf converted straight
      // from the base rules reads its waits off the witness
      if (xs.empty()) {
        ProcPtr cur = d->concl.proc;
        while (cur->kind == ProcKind::Wait) {
          xs.push_back(cur->a);
          cur = cur->p;
        }
      }
      return g_close_all(std::move(xs), d->principal);
    }
    case Rule::TensorParFull: {
      std::vector<Name> xs;
      std::map<Name, Name> m;
      for (auto [x, u] : d->chain) {
        xs.push_back(x);
        m[u] = x;
      }
      m[d->principal_binder] = d->principal;
      GlobalPtr left = rename_global(read_off_global(d->premises[0]), m);
      GlobalPtr right = read_off_global(d->premises[1]);
      return g_gather(std::move(xs), d->principal, std::move(left), std::move(right));
    }
    case Rule::PlusWithFull: {
      std::vector<Name> ys;
      for (auto [y, b] : d->chain) ys.push_back(y);
      return g_branch(d->principal, std::move(ys), read_off_global(d->premises[0]),
                      read_off_global(d->premises[1]));
    }
    case Rule::QueryBangFull: {
      std::vector<Name> ys;
      std::map<Name, Name> m;
      for (auto [y, v] : d->chain) {
        ys.push_back(y);
        m[v] = y;
      }
      m[d->principal_binder] = d->principal;
      GlobalPtr body = rename_global(read_off_global(d->premises[0]), m);
      return g_serve(d->principal, std::move(ys), std::move(body));
    }
    default:
      throw InternalError(std::string("read_off_global: non-full rule ") +
                          rule_name(d->rule));
  }
}

GlobalPtr extract_global(const ProcPtr& p, const Context& delta) {
  if (!delta.is_basic())
    throw CheckError("NonBasicContext", "extraction requires a basic context");
  DerivPtr d;
  try {
    d = check_sync(p, delta);
  } catch (const CheckError& e) {
    throw CheckError("NotTypable", std::string("extraction needs a typable forwarder: ") +
                                       e.what());
  }
  DerivPtr d2 = eliminate_with_bang(d);
  DerivPtr d3 = eliminate_tensor_one(d2);
  if (auto why = validate(d3))
    throw InternalError("completeness pipeline produced an invalid derivation: " + *why);
  GlobalPtr g = read_off_global(d3);
  std::string why;
  if (!try_check_coherence(g, dual_context(delta), &why))
    throw InternalError("extracted global type is not coherent: " + why);
  return g;
}

} // namespace fwdlab
