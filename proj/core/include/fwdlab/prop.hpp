#pragma once

#include "fwdlab/names.hpp"

#include <memory>

namespace fwdlab {

enum class PropKind : uint8_t {
  Atom,     // a or ~a
  One,      // 1
  Bot,      // bot
  Tensor,   // A * B
  Par,      // A par B
  Plus,     // A + B
  With,     // A & B
  OfCourse, // !A
  WhyNot,   // ?A
};

struct Prop;
using PropPtr = std::shared_ptr<const Prop>;

// Immutable CLL proposition tree. Built through the factory functions
// below; shared freely across threads.
struct Prop {
  PropKind kind;
  Name atom;          // Atom only
  bool positive = true; // Atom polarity: a vs ~a
  PropPtr left;       // binary left / unary child
  PropPtr right;      // binary right

  size_t size() const; // node count, >= 1
};

PropPtr p_atom(Name a, bool positive = true);
PropPtr p_atom(std::string_view a, bool positive = true);
PropPtr p_one();
PropPtr p_bot();
PropPtr p_tensor(PropPtr a, PropPtr b);
PropPtr p_par(PropPtr a, PropPtr b);
PropPtr p_plus(PropPtr a, PropPtr b);
PropPtr p_with(PropPtr a, PropPtr b);
PropPtr p_ofcourse(PropPtr a);
PropPtr p_whynot(PropPtr a);

bool prop_eq(const PropPtr& a, const PropPtr& b);
bool is_binary(PropKind k);
bool is_unary(PropKind k);

} // namespace fwdlab
