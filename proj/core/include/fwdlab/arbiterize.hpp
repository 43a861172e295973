#pragma once

#include "fwdlab/derivation.hpp"
#include "fwdlab/global_type.hpp"
#include "fwdlab/process.hpp"

#include <utility>

namespace fwdlab {

// Translation of a global type into its arbiter process. Total; every
// endpoint x of G appears as x' in the output, inner message names are
// drawn from the fresh supply.
ProcPtr arbiterize(const GlobalPtr& g);

// The context the arbiter of G is typed against when G |= delta holds:
// every endpoint primed, every type dualized.
Context arbiter_context(const Context& delta);

// For coherent (G, delta), returns the arbiter and its forwarder typing
// against arbiter_context(delta). A failure here is a bug trap, reported
// as InternalError.
std::pair<ProcPtr, DerivPtr> soundness_certificate(const GlobalPtr& g,
                                                   const Context& delta);

// The syntactic image of the translation: in every gather block the
// receives strictly precede the send, selects and client requests chain
// directly under their case/server head.
bool is_arbiter_shape(const ProcPtr& p);

} // namespace fwdlab
