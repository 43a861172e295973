#include "fwdlab/prop.hpp"

namespace fwdlab {

namespace {
PropPtr node(PropKind k, Name atom, bool pos, PropPtr l, PropPtr r) {
  auto p = std::make_shared<Prop>();
  p->kind = k;
  p->atom = atom;
  p->positive = pos;
  p->left = std::move(l);
  p->right = std::move(r);
  return p;
}
} // namespace

size_t Prop::size() const {
  size_t n = 1;
  if (left) n += left->size();
  if (right) n += right->size();
  return n;
}

PropPtr p_atom(Name a, bool positive) { return node(PropKind::Atom, a, positive, nullptr, nullptr); }
PropPtr p_atom(std::string_view a, bool positive) { return p_atom(intern(a), positive); }
PropPtr p_one() { return node(PropKind::One, Name{}, true, nullptr, nullptr); }
PropPtr p_bot() { return node(PropKind::Bot, Name{}, true, nullptr, nullptr); }
PropPtr p_tensor(PropPtr a, PropPtr b) { return node(PropKind::Tensor, Name{}, true, std::move(a), std::move(b)); }
PropPtr p_par(PropPtr a, PropPtr b) { return node(PropKind::Par, Name{}, true, std::move(a), std::move(b)); }
PropPtr p_plus(PropPtr a, PropPtr b) { return node(PropKind::Plus, Name{}, true, std::move(a), std::move(b)); }
PropPtr p_with(PropPtr a, PropPtr b) { return node(PropKind::With, Name{}, true, std::move(a), std::move(b)); }
PropPtr p_ofcourse(PropPtr a) { return node(PropKind::OfCourse, Name{}, true, std::move(a), nullptr); }
PropPtr p_whynot(PropPtr a) { return node(PropKind::WhyNot, Name{}, true, std::move(a), nullptr); }

bool is_binary(PropKind k) {
  return k == PropKind::Tensor || k == PropKind::Par || k == PropKind::Plus ||
         k == PropKind::With;
}

bool is_unary(PropKind k) { return k == PropKind::OfCourse || k == PropKind::WhyNot; }

bool prop_eq(const PropPtr& a, const PropPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case PropKind::Atom:
      return a->atom == b->atom && a->positive == b->positive;
    case PropKind::One:
    case PropKind::Bot:
      return true;
    case PropKind::OfCourse:
    case PropKind::WhyNot:
      return prop_eq(a->left, b->left);
    default:
      return prop_eq(a->left, b->left) && prop_eq(a->right, b->right);
  }
}

} // namespace fwdlab
