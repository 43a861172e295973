#pragma once

#include "fwdlab/prop.hpp"

#include <memory>

namespace fwdlab {

enum class ProcKind : uint8_t {
  Link,    // x<->y
  Close,   // x[]
  Wait,    // x().P
  Send,    // x[y].(P | Q)        y bound in P
  Recv,    // x(y).P              y bound in P
  InL,     // x.inl; P
  InR,     // x.inr; P
  Case,    // x.case(P, Q)
  Client,  // ?x[y].P             y bound in P
  Server,  // !x(y).P             y bound in P
  Cut,     // new (x:A)(y) (P|Q)  x bound in P, y bound in Q
  CutHalf, // new (x:A)([]y) (P|Q)   runtime: y blocked
  CutMsg,  // new (u)([v]) (P|Q)     runtime: v is a message in transit
};

struct Proc;
using ProcPtr = std::shared_ptr<const Proc>;

// Immutable process term. `a` is the subject endpoint, `b` the second
// endpoint (Link) or the bound name (Send/Recv/Client/Server) or the
// second cut endpoint. Cut forms carry their cut type; CutMsg keeps the
// in-transit message type internally although it is never printed.
struct Proc {
  ProcKind kind;
  Name a;
  Name b;
  PropPtr ty;
  ProcPtr p;
  ProcPtr q;

  NameSet fn; // free names, cached on construction
  NameSet bn; // every binder in the subtree, cached on construction

  size_t size() const;
};

// Factories. Binders are freshened when they would clash with the
// subject or with free names of sibling subterms, so a bound name never
// shadows or captures a live endpoint.
ProcPtr mk_link(Name x, Name y);
ProcPtr mk_close(Name x);
ProcPtr mk_wait(Name x, ProcPtr p);
ProcPtr mk_send(Name x, Name y, ProcPtr p, ProcPtr q);
ProcPtr mk_recv(Name x, Name y, ProcPtr p);
ProcPtr mk_inl(Name x, ProcPtr p);
ProcPtr mk_inr(Name x, ProcPtr p);
ProcPtr mk_case(Name x, ProcPtr p, ProcPtr q);
ProcPtr mk_client(Name x, Name y, ProcPtr p);
ProcPtr mk_server(Name x, Name y, ProcPtr p);
ProcPtr mk_cut(Name x, PropPtr a, Name y, ProcPtr p, ProcPtr q);
ProcPtr mk_cuthalf(Name x, PropPtr a, Name y, ProcPtr p, ProcPtr q);
ProcPtr mk_cutmsg(Name u, PropPtr a, Name v, ProcPtr p, ProcPtr q);

const NameSet& free_names(const ProcPtr& p);

// Capture-avoiding replacement of free occurrences of `target`.
ProcPtr substitute(const ProcPtr& p, Name target, Name replacement);

// Equality up to renaming of bound names; free names compared literally.
bool alpha_eq(const ProcPtr& a, const ProcPtr& b);

// Deterministic renaming of every binder (traversal order); idempotent.
// canon(a) == canon(b) (structurally) iff alpha_eq(a, b).
ProcPtr canon(const ProcPtr& p);

bool struct_eq(const ProcPtr& a, const ProcPtr& b);

bool has_cut(const ProcPtr& p);          // any Cut/CutHalf/CutMsg
bool has_runtime_cut(const ProcPtr& p);  // CutHalf/CutMsg only

} // namespace fwdlab
