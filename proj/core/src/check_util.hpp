#pragma once

#include "fwdlab/context.hpp"
#include "fwdlab/process.hpp"

namespace fwdlab {

// Rename every binder of `p` so binders are pairwise distinct and disjoint
// from `avoid` and from the free names of `p`. Checkers run this once so
// premise contexts can use binder names verbatim.
ProcPtr barendregt(const ProcPtr& p, const NameSet& avoid);

} // namespace fwdlab
