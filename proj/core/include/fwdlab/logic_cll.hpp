#pragma once

#include "fwdlab/derivation.hpp"
#include "fwdlab/errors.hpp"

#include <optional>

namespace fwdlab {

// Inductive duality on propositions; an involution.
PropPtr dual(const PropPtr& a);

// Dualize every type of a context (basic contexts in practice).
Context dual_context(const Context& ctx);

// Plain CLL type checking (simple exponentials, no weakening or
// contraction, no mix). Context splits for Tensor and Cut are computed
// from the free names of the subterms; the With rule shares the context.
// Throws CheckError on rejection.
DerivPtr check_cll(const ProcPtr& p, const Context& delta);
std::optional<DerivPtr> try_check_cll(const ProcPtr& p, const Context& delta,
                                      std::string* why = nullptr);

// Erasure of a forwarder context into a CLL context: buffers and boxes
// flatten to active entries, the close flag is dropped.
Context erase_context(const Context& gamma);

} // namespace fwdlab
