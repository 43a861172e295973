#pragma once

#include "fwdlab/derivation.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace fwdlab {

// Brute-force derivation search, independent of the checkers: every
// applicable rule instance is enumerated at each node, including every
// buffer subset at Tensor and every nonempty selection at With.
// Judgements are memoized. Throws CheckError("BoundExceeded") when the
// process is larger than `bound`.
std::vector<DerivPtr> search_sync(const ProcPtr& p, const Context& gamma, size_t bound);
std::vector<DerivPtr> search_cll(const ProcPtr& p, const Context& delta, size_t bound);

// A random coherent pair, built by growing a coherence derivation with
// randomly chosen rules; check_coherence accepts every output.
std::pair<GlobalPtr, Context> random_global_type(uint64_t seed, size_t size);

} // namespace fwdlab
