#pragma once

#include "fwdlab/derivation.hpp"
#include "fwdlab/errors.hpp"

#include <optional>

namespace fwdlab {

// Coherence judgement G |= Delta over basic contexts. Syntax-directed on
// G; throws CheckError on rejection.
DerivPtr check_coherence(const GlobalPtr& g, const Context& delta);
std::optional<DerivPtr> try_check_coherence(const GlobalPtr& g, const Context& delta,
                                            std::string* why = nullptr);

} // namespace fwdlab
