#include "fwdlab/derivation.hpp"

#include "fwdlab/logic_cll.hpp"
#include "fwdlab/surface.hpp"

#include <algorithm>

namespace fwdlab {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Ax: return "Ax";
    case Rule::One: return "1";
    case Rule::Bot: return "bot";
    case Rule::Tensor: return "*";
    case Rule::Par: return "par";
    case Rule::With: return "&";
    case Rule::PlusL: return "+l";
    case Rule::PlusR: return "+r";
    case Rule::Bang: return "!";
    case Rule::Query: return "?";
    case Rule::Cut: return "cut";
    case Rule::CutTensorPar: return "cut*par";
    case Rule::CutPlusWith1L: return "cut+&1l";
    case Rule::CutPlusWith1R: return "cut+&1r";
    case Rule::CutPlusWith2L: return "cut+&2l";
    case Rule::CutPlusWith2R: return "cut+&2r";
    case Rule::CutBangQuery1: return "cut!?1";
    case Rule::CutBangQuery2: return "cut!?2";
    case Rule::CllAx: return "cll-Ax";
    case Rule::CllOne: return "cll-1";
    case Rule::CllBot: return "cll-bot";
    case Rule::CllTensor: return "cll-*";
    case Rule::CllPar: return "cll-par";
    case Rule::CllPlusL: return "cll-+l";
    case Rule::CllPlusR: return "cll-+r";
    case Rule::CllWith: return "cll-&";
    case Rule::CllQuery: return "cll-?";
    case Rule::CllBang: return "cll-!";
    case Rule::CllCut: return "cll-cut";
    case Rule::CohAxiom: return "Axiom";
    case Rule::CohOneBot: return "1bot";
    case Rule::CohTensorPar: return "*par";
    case Rule::CohPlusWith: return "+&";
    case Rule::CohQueryBang: return "?!";
    case Rule::PlusWithPartial: return "+&p";
    case Rule::PlusWithFull: return "+&f";
    case Rule::QueryBangPartial: return "?!p";
    case Rule::QueryBangFull: return "?!f";
    case Rule::TensorParPartial: return "*par-p";
    case Rule::TensorParFull: return "*par-f";
    case Rule::OneBotPartial: return "1bot-p";
    case Rule::OneBotFull: return "1bot-f";
  }
  return "?";
}

Judgement j_sync(ProcPtr p, Context ctx) { return Judgement{System::Sync, std::move(p), nullptr, std::move(ctx)}; }
Judgement j_cll(ProcPtr p, Context ctx) { return Judgement{System::Cll, std::move(p), nullptr, std::move(ctx)}; }
Judgement j_coh(GlobalPtr g, Context ctx) { return Judgement{System::Coh, nullptr, std::move(g), std::move(ctx)}; }
Judgement j_compound(System sys, ProcPtr p, Context ctx) {
  return Judgement{sys, std::move(p), nullptr, std::move(ctx)};
}

DerivPtr mk_deriv(Rule r, Judgement concl, std::vector<DerivPtr> premises, Name principal,
                  Name principal_binder, std::vector<std::pair<Name, Name>> chain) {
  auto d = std::make_shared<Derivation>();
  d->rule = r;
  d->concl = std::move(concl);
  d->premises = std::move(premises);
  d->principal = principal;
  d->principal_binder = principal_binder;
  d->chain = std::move(chain);
  return d;
}

size_t deriv_height(const DerivPtr& d) {
  size_t h = 0;
  for (const auto& p : d->premises) h = std::max(h, deriv_height(p));
  return h + 1;
}

size_t deriv_count(const DerivPtr& d) {
  size_t n = 1;
  for (const auto& p : d->premises) n += deriv_count(p);
  return n;
}

namespace {

using VR = std::optional<std::string>;

VR err(const Derivation& d, const std::string& msg) {
  return std::string(rule_name(d.rule)) + ": " + msg + "  [" +
         print_context(d.concl.ctx) + "]";
}

bool rule_allowed(System sys, Rule r) {
  auto base_sync = [](Rule x) {
    return x == Rule::Ax || x == Rule::One || x == Rule::Bot || x == Rule::Tensor ||
           x == Rule::Par || x == Rule::With || x == Rule::PlusL || x == Rule::PlusR ||
           x == Rule::Bang || x == Rule::Query;
  };
  auto cut_rules = [](Rule x) {
    return x == Rule::Cut || x == Rule::CutTensorPar || x == Rule::CutPlusWith1L ||
           x == Rule::CutPlusWith1R || x == Rule::CutPlusWith2L ||
           x == Rule::CutPlusWith2R || x == Rule::CutBangQuery1 ||
           x == Rule::CutBangQuery2;
  };
  auto pw_qb = [](Rule x) {
    return x == Rule::PlusWithPartial || x == Rule::PlusWithFull ||
           x == Rule::QueryBangPartial || x == Rule::QueryBangFull;
  };
  switch (sys) {
    case System::Sync:
      return base_sync(r) || cut_rules(r);
    case System::Cll:
      return r >= Rule::CllAx && r <= Rule::CllCut;
    case System::Coh:
      return r >= Rule::CohAxiom && r <= Rule::CohQueryBang;
    case System::Compound2:
      return base_sync(r) || pw_qb(r);
    case System::Compound3:
      return r == Rule::Ax || r == Rule::One || r == Rule::Bot || r == Rule::Tensor ||
             r == Rule::Par || pw_qb(r) || r == Rule::TensorParPartial ||
             r == Rule::TensorParFull || r == Rule::OneBotPartial ||
             r == Rule::OneBotFull;
  }
  return false;
}

Context ctx_remove(const Context& c, size_t i) {
  Context out = c;
  out.take(i);
  return out;
}

Context merge_ctx(const Context& a, const Context& b) {
  Context out = a;
  for (const auto& e : b.entries()) out.add(e);
  out.set_star(a.star() || b.star());
  return out;
}

VR validate_sync(const Derivation& d);
VR validate_cll(const Derivation& d);
VR validate_coh(const Derivation& d);
VR validate_compound(const Derivation& d);
VR validate_runtime_cut(const Derivation& d);

VR validate_sync(const Derivation& d) {
  const ProcPtr& t = d.concl.proc;
  const Context& G = d.concl.ctx;
  auto np = d.premises.size();

  auto premise_ok = [&](size_t i, const ProcPtr& proc, const Context& ctx) -> VR {
    if (!alpha_eq(d.premises[i]->concl.proc, proc)) return err(d, "premise process mismatch");
    if (!(d.premises[i]->concl.ctx == ctx)) return err(d, "premise context mismatch");
    return std::nullopt;
  };

  switch (d.rule) {
    case Rule::Ax: {
      if (np != 0 || t->kind != ProcKind::Link) return err(d, "malformed axiom");
      if (G.star() || G.size() != 2) return err(d, "axiom needs exactly two endpoints");
      auto i = G.find(t->a);
      auto j = G.find(t->b);
      if (!i || !j) return err(d, "link endpoints not in context");
      const auto& ei = G.entries()[*i];
      const auto& ej = G.entries()[*j];
      if (ei.kind != EntryKind::Active || ej.kind != EntryKind::Active)
        return err(d, "axiom endpoints must be active");
      if (!prop_eq(ei.ty, dual(ej.ty))) return err(d, "axiom types are not dual");
      return std::nullopt;
    }
    case Rule::One: {
      if (np != 0 || t->kind != ProcKind::Close) return err(d, "malformed one");
      if (!G.star()) return err(d, "one rule requires the close flag");
      if (G.size() != 1) return err(d, "one rule requires exactly x:1 and the flag");
      const auto& e = G.entries()[0];
      if (e.kind != EntryKind::Active || e.ep != t->a || e.ty->kind != PropKind::One)
        return err(d, "one rule conclusion must be x:1");
      return std::nullopt;
    }
    case Rule::Bot: {
      if (np != 1 || t->kind != ProcKind::Wait) return err(d, "malformed bot");
      auto i = G.find(t->a);
      if (!i || G.entries()[*i].kind != EntryKind::Active ||
          G.entries()[*i].ty->kind != PropKind::Bot)
        return err(d, "wait subject must be active at bot");
      Context prem = ctx_remove(G, *i);
      prem.set_star(true);
      return premise_ok(0, t->p, prem);
    }
    case Rule::Par: {
      if (np != 1 || t->kind != ProcKind::Recv) return err(d, "malformed par");
      auto i = G.find(t->a);
      if (!i || G.entries()[*i].kind != EntryKind::Active ||
          G.entries()[*i].ty->kind != PropKind::Par)
        return err(d, "receive subject must be active at a par type");
      Context prem = ctx_remove(G, *i);
      prem.add(e_buffer(t->b, G.entries()[*i].ty->left, t->a, G.entries()[*i].ty->right));
      return premise_ok(0, t->p, prem);
    }
    case Rule::Tensor: {
      if (np != 2 || t->kind != ProcKind::Send) return err(d, "malformed tensor");
      auto i = G.find(t->a);
      if (!i || G.entries()[*i].kind != EntryKind::Active ||
          G.entries()[*i].ty->kind != PropKind::Tensor)
        return err(d, "send subject must be active at a tensor type");
      // buffers whose message appears free in the payload are consumed
      Context left;
      Context right = ctx_remove(G, *i);
      const NameSet& pf = t->p->fn;
      for (size_t k = 0; k < right.size();) {
        const Entry& e = right.entries()[k];
        if (e.kind == EntryKind::Buffer && contains(pf, e.msg)) {
          Entry buf = right.take(k);
          left.add_active(buf.msg, buf.msgTy);
          right.add_active(buf.ep, buf.ty); // blocked endpoint wakes up
        } else {
          ++k;
        }
      }
      left.add_active(t->b, G.entries()[*i].ty->left);
      right.add_active(t->a, G.entries()[*i].ty->right);
      if (auto e = premise_ok(0, t->p, left)) return e;
      return premise_ok(1, t->q, right);
    }
    case Rule::With: {
      if (np != 2 || t->kind != ProcKind::Case) return err(d, "malformed with");
      auto i = G.find(t->a);
      if (!i || G.entries()[*i].kind != EntryKind::Active ||
          G.entries()[*i].ty->kind != PropKind::With)
        return err(d, "case subject must be active at a with type");
      // the selection is whatever the left premise boxed with this pivot
      const Context& lc = d.premises.empty() ? G : d.premises[0]->concl.ctx;
      std::vector<std::pair<Name, PropPtr>> sel;
      if (auto li = lc.find(t->a)) {
        const auto& e = lc.entries()[*li];
        if (e.kind == EntryKind::LBox) sel = e.members;
        else if (e.kind != EntryKind::Active) return err(d, "pivot boxed with the wrong side");
      } else {
        return err(d, "left premise lost the case subject");
      }
      Context base = ctx_remove(G, *i);
      for (const auto& [n, ty] : sel) {
        auto j = base.find(n);
        if (!j || base.entries()[*j].kind != EntryKind::Active ||
            base.entries()[*j].ty->kind != PropKind::Plus)
          return err(d, "selected endpoint is not an active plus");
        if (!prop_eq(base.entries()[*j].ty, ty)) return err(d, "selection type mismatch");
        base.take(*j);
      }
      Context pl = base;
      pl.add(e_box(EntryKind::LBox, sel, t->a, G.entries()[*i].ty->left));
      Context pr = base;
      pr.add(e_box(EntryKind::RBox, sel, t->a, G.entries()[*i].ty->right));
      if (auto e = premise_ok(0, t->p, pl)) return e;
      return premise_ok(1, t->q, pr);
    }
    case Rule::PlusL:
    case Rule::PlusR: {
      bool left = d.rule == Rule::PlusL;
      if (np != 1 || t->kind != (left ? ProcKind::InL : ProcKind::InR))
        return err(d, "malformed select");
      auto bi = G.box_of(t->a);
      if (!bi) return err(d, "select subject is not inside a box");
      const Entry box = G.entries()[*bi];
      if (box.kind != (left ? EntryKind::LBox : EntryKind::RBox))
        return err(d, "select side does not match the box");
      PropPtr sel_ty;
      std::vector<std::pair<Name, PropPtr>> rest;
      for (const auto& [n, ty] : box.members) {
        if (n == t->a) sel_ty = ty;
        else rest.emplace_back(n, ty);
      }
      if (!sel_ty || sel_ty->kind != PropKind::Plus)
        return err(d, "selected member must have a plus type");
      Context prem = ctx_remove(G, *bi);
      prem.add(e_box(box.kind, rest, box.ep, box.ty));
      prem.add_active(t->a, left ? sel_ty->left : sel_ty->right);
      return premise_ok(0, t->p, prem);
    }
    case Rule::Query: {
      if (np != 1 || t->kind != ProcKind::Client) return err(d, "malformed query");
      auto bi = G.box_of(t->a);
      if (!bi || G.entries()[*bi].kind != EntryKind::QBox)
        return err(d, "client subject is not inside a Q box");
      const Entry box = G.entries()[*bi];
      PropPtr q_ty;
      std::vector<std::pair<Name, PropPtr>> rest;
      for (const auto& [n, ty] : box.members) {
        if (n == t->a) q_ty = ty;
        else rest.emplace_back(n, ty);
      }
      if (!q_ty || q_ty->kind != PropKind::WhyNot)
        return err(d, "client member must have a ? type");
      Context prem = ctx_remove(G, *bi);
      prem.add(e_box(EntryKind::QBox, rest, box.ep, box.ty));
      prem.add_active(t->b, q_ty->left);
      return premise_ok(0, t->p, prem);
    }
    case Rule::Bang: {
      if (np != 1 || t->kind != ProcKind::Server) return err(d, "malformed bang");
      if (G.star()) return err(d, "bang conclusion cannot hold the close flag");
      auto i = G.find(t->a);
      if (!i || G.entries()[*i].kind != EntryKind::Active ||
          G.entries()[*i].ty->kind != PropKind::OfCourse)
        return err(d, "server subject must be active at a ! type");
      std::vector<std::pair<Name, PropPtr>> members;
      for (size_t k = 0; k < G.size(); ++k) {
        if (k == *i) continue;
        const auto& e = G.entries()[k];
        if (e.kind != EntryKind::Active || e.ty->kind != PropKind::WhyNot)
          return err(d, "server context must be all ?-typed");
        members.emplace_back(e.ep, e.ty);
      }
      Context prem;
      prem.add(e_box(EntryKind::QBox, members, t->b, G.entries()[*i].ty->left));
      return premise_ok(0, t->p, prem);
    }
    case Rule::Cut: {
      if (np != 2 || t->kind != ProcKind::Cut) return err(d, "malformed cut");
      const Context& lc = d.premises[0]->concl.ctx;
      const Context& rc = d.premises[1]->concl.ctx;
      auto li = lc.find(t->a);
      auto ri = rc.find(t->b);
      if (!li || lc.entries()[*li].kind != EntryKind::Active)
        return err(d, "left cut endpoint not active in left premise");
      if (!ri || rc.entries()[*ri].kind != EntryKind::Active)
        return err(d, "right cut endpoint not active in right premise");
      if (!prop_eq(lc.entries()[*li].ty, t->ty) ||
          !prop_eq(rc.entries()[*ri].ty, dual(t->ty)))
        return err(d, "cut endpoints are not dual at the annotated type");
      Context merged = merge_ctx(ctx_remove(lc, *li), ctx_remove(rc, *ri));
      if (!(merged == G)) return err(d, "cut conclusion is not the merge of the premises");
      if (!alpha_eq(d.premises[0]->concl.proc, t->p))
        return err(d, "left premise process mismatch");
      if (!alpha_eq(d.premises[1]->concl.proc, t->q))
        return err(d, "right premise process mismatch");
      return std::nullopt;
    }
    default:
      return validate_runtime_cut(d);
  }
}

VR validate_runtime_cut(const Derivation& d) {
  const ProcPtr& t = d.concl.proc;
  const Context& G = d.concl.ctx;

  auto proc_ok = [&](size_t i, const ProcPtr& expect) -> VR {
    if (!alpha_eq(d.premises[i]->concl.proc, expect))
      return err(d, "premise process mismatch");
    return std::nullopt;
  };

  switch (d.rule) {
    case Rule::CutTensorPar: {
      // new (x:B)([]y) (Q | new (u:A)([v]) (P | R)); premises P, Q, R
      if (d.premises.size() != 3 || t->kind != ProcKind::CutHalf ||
          t->q->kind != ProcKind::CutMsg)
        return err(d, "malformed tensor-par cut");
      const ProcPtr& inner = t->q;
      PropPtr B = t->ty;
      PropPtr A = inner->ty;
      const Context& pc = d.premises[0]->concl.ctx;
      const Context& qc = d.premises[1]->concl.ctx;
      const Context& rc = d.premises[2]->concl.ctx;
      if (pc.star()) return err(d, "message premise cannot hold the close flag");
      auto ui = pc.find(inner->a);
      if (!ui || pc.entries()[*ui].kind != EntryKind::Active ||
          !prop_eq(pc.entries()[*ui].ty, A))
        return err(d, "message cut endpoint not active at the annotated type");
      auto xi = qc.find(t->a);
      if (!xi || qc.entries()[*xi].kind != EntryKind::Active ||
          !prop_eq(qc.entries()[*xi].ty, B))
        return err(d, "blocked cut endpoint not active at the annotated type");
      auto yi = rc.find(t->b);
      if (!yi || rc.entries()[*yi].kind != EntryKind::Buffer ||
          rc.entries()[*yi].msg != inner->b ||
          !prop_eq(rc.entries()[*yi].msgTy, dual(A)) ||
          !prop_eq(rc.entries()[*yi].ty, dual(B)))
        return err(d, "receiver premise must buffer [v:~A]y:~B");
      Context msgs = ctx_remove(pc, *ui);
      Context expect = merge_ctx(ctx_remove(qc, *xi), ctx_remove(rc, *yi));
      for (const auto& e : msgs.entries()) {
        if (e.kind != EntryKind::Active) return err(d, "message premise must be basic");
        auto bi = G.buffer_of_msg(e.ep);
        if (!bi) return err(d, "message endpoint is not buffered in the conclusion");
        const Entry& buf = G.entries()[*bi];
        if (!prop_eq(buf.msgTy, e.ty)) return err(d, "buffered message type mismatch");
        auto ei = expect.find(buf.ep);
        if (!ei || expect.entries()[*ei].kind != EntryKind::Active ||
            !prop_eq(expect.entries()[*ei].ty, buf.ty))
          return err(d, "buffer partner missing from blocked premise");
        expect.take(*ei);
        expect.add(buf);
      }
      if (!(expect == G)) return err(d, "conclusion context mismatch");
      if (auto e = proc_ok(0, inner->p)) return e;
      if (auto e = proc_ok(1, t->p)) return e;
      return proc_ok(2, inner->q);
    }

    case Rule::CutPlusWith1L:
    case Rule::CutPlusWith1R: {
      bool left = d.rule == Rule::CutPlusWith1L;
      if (d.premises.size() != 3 || t->kind != ProcKind::Cut ||
          t->q->kind != ProcKind::Case || t->q->a != t->b)
        return err(d, "malformed plus-with cut (select pending)");
      EntryKind side = left ? EntryKind::LBox : EntryKind::RBox;
      const Context& pc = d.premises[0]->concl.ctx;
      auto bi = pc.box_of(t->a);
      if (!bi || pc.entries()[*bi].kind != side)
        return err(d, "pending cut endpoint must sit inside the matching box");
      const Entry pbox = pc.entries()[*bi];
      PropPtr xty;
      std::vector<std::pair<Name, PropPtr>> d1;
      for (const auto& [n, ty] : pbox.members) {
        if (n == t->a) xty = ty;
        else d1.emplace_back(n, ty);
      }
      if (!xty || xty->kind != PropKind::Plus || !prop_eq(xty, t->ty))
        return err(d, "cut annotation must match the boxed plus type");
      const Context& q1c = d.premises[1]->concl.ctx;
      const Context& q2c = d.premises[2]->concl.ctx;
      auto l1 = q1c.find(t->b);
      auto l2 = q2c.find(t->b);
      if (!l1 || !l2) return err(d, "case premises lost the cut endpoint");
      const Entry e1 = q1c.entries()[*l1];
      const Entry e2 = q2c.entries()[*l2];
      if (!(e1.kind == EntryKind::LBox || e1.kind == EntryKind::Active) ||
          !(e2.kind == EntryKind::RBox || e2.kind == EntryKind::Active))
        return err(d, "case premises must box the cut pivot L/R");
      if (!prop_eq(e1.ty, dual(xty->left)) || !prop_eq(e2.ty, dual(xty->right)))
        return err(d, "case premise pivot types must be the dual summands");
      auto d2 = e1.kind == EntryKind::LBox ? e1.members
                                           : std::vector<std::pair<Name, PropPtr>>{};
      Context g2a = ctx_remove(q1c, *l1);
      Context g2b = ctx_remove(q2c, *l2);
      if (!(g2a == g2b)) return err(d, "case premises disagree on the shared context");
      Context expect = merge_ctx(ctx_remove(pc, *bi), g2a);
      auto all = d1;
      for (auto& m : d2) all.push_back(m);
      expect.add(e_box(side, all, pbox.ep, pbox.ty));
      if (!(expect == G)) return err(d, "conclusion context mismatch");
      if (auto e = proc_ok(0, t->p)) return e;
      if (auto e = proc_ok(1, t->q->p)) return e;
      return proc_ok(2, t->q->q);
    }

    case Rule::CutPlusWith2L:
    case Rule::CutPlusWith2R:
    case Rule::CutBangQuery2: {
      EntryKind side = d.rule == Rule::CutPlusWith2L   ? EntryKind::LBox
                       : d.rule == Rule::CutPlusWith2R ? EntryKind::RBox
                                                       : EntryKind::QBox;
      if (d.premises.size() != 2 || t->kind != ProcKind::Cut)
        return err(d, "malformed boxed cut");
      const Context& pc = d.premises[0]->concl.ctx;
      const Context& qc = d.premises[1]->concl.ctx;
      auto xi = pc.find(t->a);
      if (!xi || pc.entries()[*xi].kind != EntryKind::Active ||
          !prop_eq(pc.entries()[*xi].ty, t->ty))
        return err(d, "left cut endpoint must be active at the annotation");
      auto yi = qc.find(t->b);
      if (!yi || qc.entries()[*yi].kind != side ||
          !prop_eq(qc.entries()[*yi].ty, dual(t->ty)))
        return err(d, "right cut endpoint must be the pivot of the matching box");
      const Entry ybox = qc.entries()[*yi];
      // the surviving pivot is the conclusion box pivot that lives in the
      // left premise (boxed there, or active once its residual emptied)
      std::optional<Entry> cbox;
      for (const auto& e : G.entries())
        if (e.kind == side && pc.mentions(e.ep)) cbox = e;
      if (!cbox) return err(d, "conclusion lacks the merged box");
      auto zi = pc.find(cbox->ep);
      if (!zi) return err(d, "left premise lost the box pivot");
      const Entry zent = pc.entries()[*zi];
      std::vector<std::pair<Name, PropPtr>> d1;
      if (zent.kind == side) d1 = zent.members;
      else if (zent.kind != EntryKind::Active)
        return err(d, "left premise pivot in the wrong state");
      if (!prop_eq(zent.ty, cbox->ty)) return err(d, "pivot type mismatch");
      Context g1 = ctx_remove(pc, std::max(*xi, *zi));
      g1.take(std::min(*xi, *zi));
      Context expect = merge_ctx(g1, ctx_remove(qc, *yi));
      auto all = d1;
      for (const auto& m : ybox.members) all.push_back(m);
      expect.add(e_box(side, all, cbox->ep, cbox->ty));
      if (!(expect == G)) return err(d, "conclusion context mismatch");
      if (auto e = proc_ok(0, t->p)) return e;
      return proc_ok(1, t->q);
    }

    case Rule::CutBangQuery1: {
      if (d.premises.size() != 2 || t->kind != ProcKind::Cut ||
          t->q->kind != ProcKind::Server || t->q->a != t->b)
        return err(d, "malformed bang-query cut");
      const Context& pc = d.premises[0]->concl.ctx;
      const Context& qc = d.premises[1]->concl.ctx;
      auto bi = pc.box_of(t->a);
      if (!bi || pc.entries()[*bi].kind != EntryKind::QBox)
        return err(d, "client cut endpoint must sit inside a Q box");
      const Entry pbox = pc.entries()[*bi];
      PropPtr xty;
      std::vector<std::pair<Name, PropPtr>> d1;
      for (const auto& [n, ty] : pbox.members) {
        if (n == t->a) xty = ty;
        else d1.emplace_back(n, ty);
      }
      if (!xty || xty->kind != PropKind::WhyNot || !prop_eq(xty, t->ty))
        return err(d, "cut annotation must match the boxed ? type");
      if (qc.star() || qc.size() != 1) return err(d, "server premise must be one Q box");
      const Entry sbox = qc.entries()[0];
      if (sbox.kind != EntryKind::QBox && sbox.kind != EntryKind::Active)
        return err(d, "server premise must be one Q box");
      if (sbox.ep != t->q->b || !prop_eq(sbox.ty, dual(xty->left)))
        return err(d, "server premise pivot must be v:~A");
      Context expect = ctx_remove(pc, *bi);
      auto all = d1;
      for (const auto& m : sbox.members) all.push_back(m);
      expect.add(e_box(EntryKind::QBox, all, pbox.ep, pbox.ty));
      if (!(expect == G)) return err(d, "conclusion context mismatch");
      if (auto e = proc_ok(0, t->p)) return e;
      return proc_ok(1, t->q->p);
    }

    default:
      return err(d, "rule does not apply to a sync judgement");
  }
}

VR validate_cll(const Derivation& d) {
  const ProcPtr& t = d.concl.proc;
  const Context& G = d.concl.ctx;
  if (G.star()) return err(d, "CLL contexts carry no close flag");

  auto premise_ok = [&](size_t i, const ProcPtr& proc, const Context& ctx) -> VR {
    if (!alpha_eq(d.premises[i]->concl.proc, proc)) return err(d, "premise process mismatch");
    if (!(d.premises[i]->concl.ctx == ctx)) return err(d, "premise context mismatch");
    return std::nullopt;
  };
  auto active_at = [&](Name x, PropKind k) -> std::optional<size_t> {
    auto i = G.find(x);
    if (!i) return std::nullopt;
    if (G.entries()[*i].kind != EntryKind::Active) return std::nullopt;
    if (G.entries()[*i].ty->kind != k) return std::nullopt;
    return i;
  };

  switch (d.rule) {
    case Rule::CllAx: {
      if (t->kind != ProcKind::Link || G.size() != 2) return err(d, "malformed axiom");
      auto i = G.find(t->a);
      auto j = G.find(t->b);
      if (!i || !j || !prop_eq(G.entries()[*i].ty, dual(G.entries()[*j].ty)))
        return err(d, "axiom types are not dual");
      return std::nullopt;
    }
    case Rule::CllOne: {
      if (t->kind != ProcKind::Close || G.size() != 1 || !active_at(t->a, PropKind::One))
        return err(d, "conclusion must be exactly x:1");
      return std::nullopt;
    }
    case Rule::CllBot: {
      auto i = active_at(t->a, PropKind::Bot);
      if (t->kind != ProcKind::Wait || !i) return err(d, "malformed bot");
      return premise_ok(0, t->p, ctx_remove(G, *i));
    }
    case Rule::CllPar: {
      auto i = active_at(t->a, PropKind::Par);
      if (t->kind != ProcKind::Recv || !i) return err(d, "malformed par");
      Context prem = ctx_remove(G, *i);
      prem.add_active(t->b, G.entries()[*i].ty->left);
      prem.add_active(t->a, G.entries()[*i].ty->right);
      return premise_ok(0, t->p, prem);
    }
    case Rule::CllTensor: {
      auto i = active_at(t->a, PropKind::Tensor);
      if (t->kind != ProcKind::Send || !i) return err(d, "malformed tensor");
      Context left;
      Context right;
      const NameSet& pf = t->p->fn;
      for (size_t k = 0; k < G.size(); ++k) {
        if (k == *i) continue;
        const Entry& e = G.entries()[k];
        if (contains(pf, e.ep))
          left.add(e);
        else
          right.add(e);
      }
      left.add_active(t->b, G.entries()[*i].ty->left);
      right.add_active(t->a, G.entries()[*i].ty->right);
      if (auto e = premise_ok(0, t->p, left)) return e;
      return premise_ok(1, t->q, right);
    }
    case Rule::CllPlusL:
    case Rule::CllPlusR: {
      bool left = d.rule == Rule::CllPlusL;
      auto i = active_at(t->a, PropKind::Plus);
      if (t->kind != (left ? ProcKind::InL : ProcKind::InR) || !i)
        return err(d, "malformed select");
      Context prem = ctx_remove(G, *i);
      prem.add_active(t->a, left ? G.entries()[*i].ty->left : G.entries()[*i].ty->right);
      return premise_ok(0, t->p, prem);
    }
    case Rule::CllWith: {
      auto i = active_at(t->a, PropKind::With);
      if (t->kind != ProcKind::Case || !i) return err(d, "malformed with");
      Context pl = ctx_remove(G, *i);
      Context pr = pl;
      pl.add_active(t->a, G.entries()[*i].ty->left);
      pr.add_active(t->a, G.entries()[*i].ty->right);
      if (auto e = premise_ok(0, t->p, pl)) return e;
      return premise_ok(1, t->q, pr);
    }
    case Rule::CllQuery: {
      auto i = active_at(t->a, PropKind::WhyNot);
      if (t->kind != ProcKind::Client || !i) return err(d, "malformed query");
      Context prem = ctx_remove(G, *i);
      prem.add_active(t->b, G.entries()[*i].ty->left);
      return premise_ok(0, t->p, prem);
    }
    case Rule::CllBang: {
      auto i = active_at(t->a, PropKind::OfCourse);
      if (t->kind != ProcKind::Server || !i) return err(d, "malformed bang");
      for (size_t k = 0; k < G.size(); ++k)
        if (k != *i && G.entries()[k].ty->kind != PropKind::WhyNot)
          return err(d, "server context must be all ?-typed");
      Context prem = ctx_remove(G, *i);
      prem.add_active(t->b, G.entries()[*i].ty->left);
      return premise_ok(0, t->p, prem);
    }
    case Rule::CllCut: {
      if (t->kind != ProcKind::Cut) return err(d, "malformed cut");
      const Context& lc = d.premises[0]->concl.ctx;
      const Context& rc = d.premises[1]->concl.ctx;
      auto li = lc.find(t->a);
      auto ri = rc.find(t->b);
      if (!li || !ri) return err(d, "cut endpoints missing from premises");
      if (!prop_eq(lc.entries()[*li].ty, t->ty) ||
          !prop_eq(rc.entries()[*ri].ty, dual(t->ty)))
        return err(d, "cut endpoints are not dual at the annotated type");
      Context merged = merge_ctx(ctx_remove(lc, *li), ctx_remove(rc, *ri));
      if (!(merged == G)) return err(d, "cut conclusion is not the merge of the premises");
      if (auto e = premise_ok(0, t->p, lc)) return e;
      return premise_ok(1, t->q, rc);
    }
    default:
      return err(d, "rule does not apply to a CLL judgement");
  }
}

VR validate_coh(const Derivation& d) {
  const GlobalPtr& g = d.concl.gt;
  const Context& D = d.concl.ctx;
  if (!D.is_basic()) return err(d, "coherence requires a basic context");

  auto premise_ok = [&](size_t i, const GlobalPtr& gt, const Context& ctx) -> VR {
    if (!global_eq(d.premises[i]->concl.gt, gt)) return err(d, "premise global type mismatch");
    if (!(d.premises[i]->concl.ctx == ctx)) return err(d, "premise context mismatch");
    return std::nullopt;
  };

  switch (d.rule) {
    case Rule::CohAxiom: {
      if (g->kind != GlobalKind::GAxiom || D.size() != 2) return err(d, "malformed axiom");
      auto i = D.find(g->one);
      auto j = D.find(g->other);
      if (!i || !j) return err(d, "axiom endpoints missing");
      if (!prop_eq(D.entries()[*i].ty, g->ty) ||
          !prop_eq(D.entries()[*j].ty, dual(g->ty)))
        return err(d, "axiom context must be x:A, y:~A");
      return std::nullopt;
    }
    case Rule::CohOneBot: {
      if (g->kind != GlobalKind::CloseAll) return err(d, "malformed 1bot");
      if (D.size() != g->many.size() + 1) return err(d, "close context must be exact");
      for (auto x : g->many) {
        auto i = D.find(x);
        if (!i || D.entries()[*i].ty->kind != PropKind::One)
          return err(d, "every gathered endpoint must have type 1");
      }
      auto j = D.find(g->one);
      if (!j || D.entries()[*j].ty->kind != PropKind::Bot)
        return err(d, "collector endpoint must have type bot");
      return std::nullopt;
    }
    case Rule::CohTensorPar: {
      if (g->kind != GlobalKind::Gather || d.premises.size() != 2)
        return err(d, "malformed gather");
      auto yi = D.find(g->one);
      if (!yi || D.entries()[*yi].ty->kind != PropKind::Par)
        return err(d, "gather target must have a par type");
      Context left;
      Context right = ctx_remove(D, *yi);
      for (auto x : g->many) {
        auto i = right.find(x);
        if (!i || right.entries()[*i].ty->kind != PropKind::Tensor)
          return err(d, "gathered endpoint must have a tensor type");
        Entry e = right.take(*i);
        left.add_active(x, e.ty->left);
        right.add_active(x, e.ty->right);
      }
      left.add_active(g->one, D.entries()[*yi].ty->left);
      right.add_active(g->one, D.entries()[*yi].ty->right);
      if (auto e = premise_ok(0, g->g, left)) return e;
      return premise_ok(1, g->h, right);
    }
    case Rule::CohPlusWith: {
      if (g->kind != GlobalKind::Branch || d.premises.size() != 2)
        return err(d, "malformed branch");
      auto xi = D.find(g->one);
      if (!xi || D.entries()[*xi].ty->kind != PropKind::Plus)
        return err(d, "branch source must have a plus type");
      Context pl = ctx_remove(D, *xi);
      Context pr = pl;
      for (auto y : g->many) {
        auto i = pl.find(y);
        if (!i || pl.entries()[*i].ty->kind != PropKind::With)
          return err(d, "branch target must have a with type");
        Entry e = pl.take(*i);
        pl.add_active(y, e.ty->left);
        auto j = pr.find(y);
        Entry e2 = pr.take(*j);
        pr.add_active(y, e2.ty->right);
      }
      pl.add_active(g->one, D.entries()[*xi].ty->left);
      pr.add_active(g->one, D.entries()[*xi].ty->right);
      if (auto e = premise_ok(0, g->g, pl)) return e;
      return premise_ok(1, g->h, pr);
    }
    case Rule::CohQueryBang: {
      if (g->kind != GlobalKind::Serve || d.premises.size() != 1)
        return err(d, "malformed serve");
      if (D.size() != g->many.size() + 1) return err(d, "serve context must be exact");
      auto xi = D.find(g->one);
      if (!xi || D.entries()[*xi].ty->kind != PropKind::WhyNot)
        return err(d, "serve source must have a ? type");
      Context prem;
      prem.add_active(g->one, D.entries()[*xi].ty->left);
      for (auto y : g->many) {
        auto i = D.find(y);
        if (!i || D.entries()[*i].ty->kind != PropKind::OfCourse)
          return err(d, "serve target must have a ! type");
        prem.add_active(y, D.entries()[*i].ty->left);
      }
      return premise_ok(0, g->g, prem);
    }
    default:
      return err(d, "rule does not apply to a coherence judgement");
  }
}

VR validate_compound(const Derivation& d) {
  const ProcPtr& t = d.concl.proc;
  const Context& G = d.concl.ctx;

  auto premise_ok = [&](size_t i, const ProcPtr& proc, const Context& ctx) -> VR {
    if (!alpha_eq(d.premises[i]->concl.proc, proc)) return err(d, "premise process mismatch");
    if (!(d.premises[i]->concl.ctx == ctx)) return err(d, "premise context mismatch");
    return std::nullopt;
  };

  switch (d.rule) {
    case Rule::OneBotPartial:
    case Rule::OneBotFull: {
      bool partial = d.rule == Rule::OneBotPartial;
      if (!d.premises.empty()) return err(d, "1bot compound is a leaf");
      if (G.star() != partial) return err(d, "partiality must match the close flag");
      ProcPtr cur = t;
      size_t waits = 0;
      for (; cur->kind == ProcKind::Wait; cur = cur->p) {
        auto i = G.find(cur->a);
        if (!i || G.entries()[*i].kind != EntryKind::Active ||
            G.entries()[*i].ty->kind != PropKind::Bot)
          return err(d, "wait subject must be active at bot");
        ++waits;
      }
      if (cur->kind != ProcKind::Close) return err(d, "compound must end in close");
      auto i = G.find(cur->a);
      if (!i || G.entries()[*i].ty->kind != PropKind::One)
        return err(d, "close subject must have type 1");
      if (G.size() != waits + 1) return err(d, "1bot context must be exact");
      return std::nullopt;
    }

    case Rule::TensorParPartial:
    case Rule::TensorParFull: {
      bool partial = d.rule == Rule::TensorParPartial;
      if (d.premises.size() != 2) return err(d, "tensor-par compound needs two premises");
      ProcPtr cur = t;
      std::vector<std::pair<Name, Name>> chain;
      for (; cur->kind == ProcKind::Recv; cur = cur->p) chain.emplace_back(cur->a, cur->b);
      if (cur->kind != ProcKind::Send) return err(d, "compound must end in a send");
      if (chain != d.chain) return err(d, "recorded chain does not match the process");
      auto yi = G.find(cur->a);
      if (!yi || G.entries()[*yi].kind != EntryKind::Active ||
          G.entries()[*yi].ty->kind != PropKind::Tensor)
        return err(d, "send subject must be active at a tensor type");
      size_t buffers = 0;
      for (const auto& e : G.entries())
        if (e.kind == EntryKind::Buffer) ++buffers;
      if (partial != (buffers > 0)) return err(d, "partiality must match residual buffers");
      Context left;
      Context right = ctx_remove(G, *yi);
      for (const auto& [x, u] : chain) {
        auto i = right.find(x);
        if (!i || right.entries()[*i].kind != EntryKind::Active ||
            right.entries()[*i].ty->kind != PropKind::Par)
          return err(d, "receive subject must be active at a par type");
        Entry e = right.take(*i);
        left.add_active(u, e.ty->left);
        right.add_active(x, e.ty->right);
      }
      // residual buffers whose message is used by the payload feed the left
      const NameSet& pf = cur->p->fn;
      for (size_t k = 0; k < right.size();) {
        const Entry& e = right.entries()[k];
        if (e.kind == EntryKind::Buffer && contains(pf, e.msg)) {
          Entry buf = right.take(k);
          left.add_active(buf.msg, buf.msgTy);
          right.add_active(buf.ep, buf.ty);
        } else {
          ++k;
        }
      }
      left.add_active(cur->b, G.entries()[*yi].ty->left);
      right.add_active(cur->a, G.entries()[*yi].ty->right);
      if (auto e = premise_ok(0, cur->p, left)) return e;
      return premise_ok(1, cur->q, right);
    }

    case Rule::PlusWithPartial:
    case Rule::PlusWithFull: {
      bool partial = d.rule == Rule::PlusWithPartial;
      if (d.premises.size() != 2 || t->kind != ProcKind::Case)
        return err(d, "malformed plus-with compound");
      auto xi = G.find(t->a);
      if (!xi || G.entries()[*xi].kind != EntryKind::Active ||
          G.entries()[*xi].ty->kind != PropKind::With)
        return err(d, "case subject must be active at a with type");
      // select chains on both branches must visit the same endpoints
      ProcPtr lcur = t->p;
      ProcPtr rcur = t->q;
      std::vector<Name> ys;
      while (lcur->kind == ProcKind::InL && rcur->kind == ProcKind::InR &&
             lcur->a == rcur->a &&
             std::find_if(d.chain.begin(), d.chain.end(), [&](auto& pr) {
               return pr.first == lcur->a;
             }) != d.chain.end()) {
        ys.push_back(lcur->a);
        lcur = lcur->p;
        rcur = rcur->p;
      }
      if (ys.size() != d.chain.size()) return err(d, "recorded chain does not match the process");
      // residual selection = whatever the left premise still boxes
      const Context& lc = d.premises[0]->concl.ctx;
      std::vector<std::pair<Name, PropPtr>> residual;
      if (auto li = lc.find(t->a)) {
        if (lc.entries()[*li].kind == EntryKind::LBox) residual = lc.entries()[*li].members;
      }
      if (partial != !residual.empty())
        return err(d, "partiality must match the residual selection");
      Context base = ctx_remove(G, *xi);
      for (const auto& [n, ty] : residual) {
        auto j = base.find(n);
        if (!j || base.entries()[*j].ty->kind != PropKind::Plus ||
            !prop_eq(base.entries()[*j].ty, ty))
          return err(d, "residual selection mismatch");
        base.take(*j);
      }
      Context pl = base;
      Context pr = base;
      for (auto y : ys) {
        auto j = pl.find(y);
        if (!j || pl.entries()[*j].ty->kind != PropKind::Plus)
          return err(d, "broadcast target must be an active plus");
        Entry e = pl.take(*j);
        pl.add_active(y, e.ty->left);
        auto k = pr.find(y);
        Entry e2 = pr.take(*k);
        pr.add_active(y, e2.ty->right);
      }
      pl.add(e_box(EntryKind::LBox, residual, t->a, G.entries()[*xi].ty->left));
      pr.add(e_box(EntryKind::RBox, residual, t->a, G.entries()[*xi].ty->right));
      if (auto e = premise_ok(0, lcur, pl)) return e;
      return premise_ok(1, rcur, pr);
    }

    case Rule::QueryBangPartial:
    case Rule::QueryBangFull: {
      bool partial = d.rule == Rule::QueryBangPartial;
      if (d.premises.size() != 1 || t->kind != ProcKind::Server)
        return err(d, "malformed query-bang compound");
      if (G.star()) return err(d, "serve conclusion cannot hold the close flag");
      auto xi = G.find(t->a);
      if (!xi || G.entries()[*xi].kind != EntryKind::Active ||
          G.entries()[*xi].ty->kind != PropKind::OfCourse)
        return err(d, "server subject must be active at a ! type");
      ProcPtr cur = t->p;
      std::vector<std::pair<Name, Name>> chain;
      while (cur->kind == ProcKind::Client &&
             std::find_if(d.chain.begin(), d.chain.end(), [&](auto& pr) {
               return pr.first == cur->a;
             }) != d.chain.end()) {
        chain.emplace_back(cur->a, cur->b);
        cur = cur->p;
      }
      if (chain != d.chain) return err(d, "recorded chain does not match the process");
      // residual = what the premise still boxes
      const Context& pc = d.premises[0]->concl.ctx;
      std::vector<std::pair<Name, PropPtr>> residual;
      if (auto bi = pc.find(t->b)) {
        if (pc.entries()[*bi].kind == EntryKind::QBox) residual = pc.entries()[*bi].members;
      }
      if (partial != !residual.empty())
        return err(d, "partiality must match the residual requests");
      Context prem;
      for (const auto& [yi2, vi] : chain) {
        auto j = G.find(yi2);
        if (!j || G.entries()[*j].ty->kind != PropKind::WhyNot)
          return err(d, "chained client endpoint must have a ? type");
        prem.add_active(vi, G.entries()[*j].ty->left);
      }
      // residual members must be the remaining conclusion entries
      size_t expected = 1 + chain.size() + residual.size();
      if (G.size() != expected) return err(d, "serve context must be exact");
      for (const auto& [n, ty] : residual) {
        auto j = G.find(n);
        if (!j || !prop_eq(G.entries()[*j].ty, ty))
          return err(d, "residual request mismatch");
        if (ty->kind != PropKind::WhyNot) return err(d, "residual request must be ?-typed");
      }
      prem.add(e_box(EntryKind::QBox, residual, t->b, G.entries()[*xi].ty->left));
      return premise_ok(0, cur, prem);
    }

    default:
      return err(d, "not a compound rule");
  }
}

} // namespace

std::optional<std::string> validate_node(const Derivation& d) {
  if (!rule_allowed(d.concl.sys, d.rule)) return err(d, "rule not allowed in this system");
  switch (d.concl.sys) {
    case System::Cll: return validate_cll(d);
    case System::Coh: return validate_coh(d);
    case System::Sync:
    case System::Compound2:
    case System::Compound3:
      switch (d.rule) {
        case Rule::PlusWithPartial:
        case Rule::PlusWithFull:
        case Rule::QueryBangPartial:
        case Rule::QueryBangFull:
        case Rule::TensorParPartial:
        case Rule::TensorParFull:
        case Rule::OneBotPartial:
        case Rule::OneBotFull:
          return validate_compound(d);
        default:
          return validate_sync(d);
      }
  }
  return std::nullopt;
}

std::optional<std::string> validate(const DerivPtr& d) {
  if (auto e = validate_node(*d)) return e;
  for (const auto& p : d->premises) {
    if (p->concl.sys != d->concl.sys)
      return err(*d, "premise system differs from conclusion system");
    if (auto e = validate(p)) return e;
  }
  return std::nullopt;
}

} // namespace fwdlab
