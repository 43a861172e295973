#pragma once

#include "fwdlab/derivation.hpp"
#include "fwdlab/errors.hpp"

namespace fwdlab {

// Completeness pipeline: derivation surgery turning a forwarder proof
// into an all-compound proof, then reading off the global type.

// Re-root `d` at the select/client rule on box member `x`, preserving
// the proof structure otherwise. `d` must conclude a context holding x
// inside an L/R/Q box.
DerivPtr permute_select_down(const DerivPtr& d, Name x);

// Replace With/Bang by the +&/?! compound rules and grow them full by
// hoisting the matching selects/requests. Conclusion context must be
// free of L/R/Q boxes.
DerivPtr eliminate_with_bang(const DerivPtr& d);

// Replace Tensor/One by the */1 compound rules and fold every Par/Bot
// into the compound that consumes it, topmost instances first.
DerivPtr eliminate_tensor_one(const DerivPtr& d);

// check_sync + the two eliminations + read-off. The result is coherent
// for the dualized context (verified; violation is an InternalError).
GlobalPtr extract_global(const ProcPtr& p, const Context& delta);

// Read a global type off an all-full compound derivation.
GlobalPtr read_off_global(const DerivPtr& d);

} // namespace fwdlab
