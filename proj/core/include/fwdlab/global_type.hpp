#pragma once

#include "fwdlab/prop.hpp"

#include <memory>
#include <vector>

namespace fwdlab {

enum class GlobalKind : uint8_t {
  CloseAll, // close (x1,..,xn) -> y
  Gather,   // gather (x1,..,xn) -> y { G } ; H
  Branch,   // branch x -> (y1,..,yn) { G }{ H }
  Serve,    // serve x -> (y1,..,yn) { G }
  GAxiom,   // axiom x:A = y
};

struct GlobalType;
using GlobalPtr = std::shared_ptr<const GlobalType>;

// Alice-Bob protocol term; the proof term of the coherence judgement.
// `many` is the gathered/broadcast endpoint list, `one` the single
// endpoint on the other side of the interaction.
struct GlobalType {
  GlobalKind kind;
  std::vector<Name> many; // x1..xn (CloseAll/Gather) or y1..yn (Branch/Serve)
  Name one;               // y (CloseAll/Gather), x (Branch/Serve/GAxiom)
  Name other;             // GAxiom second endpoint
  PropPtr ty;             // GAxiom type A
  GlobalPtr g;
  GlobalPtr h;

  size_t size() const;
};

// Constructors reject duplicate endpoints within one constructor.
GlobalPtr g_close_all(std::vector<Name> xs, Name y);
GlobalPtr g_gather(std::vector<Name> xs, Name y, GlobalPtr g, GlobalPtr h);
GlobalPtr g_branch(Name x, std::vector<Name> ys, GlobalPtr g, GlobalPtr h);
GlobalPtr g_serve(Name x, std::vector<Name> ys, GlobalPtr g);
GlobalPtr g_axiom(Name x, PropPtr a, Name y);

NameSet global_free_names(const GlobalPtr& g);

bool global_eq(const GlobalPtr& a, const GlobalPtr& b);
// Equality ignoring the order of endpoint lists inside each constructor.
bool global_eq_mod_order(const GlobalPtr& a, const GlobalPtr& b);

} // namespace fwdlab
