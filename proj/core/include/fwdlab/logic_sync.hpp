#pragma once

#include "fwdlab/derivation.hpp"
#include "fwdlab/errors.hpp"

#include <optional>
#include <string>

namespace fwdlab {

struct SyncOptions {
  // Admit an empty selection set in the With rule (deviation switch;
  // the default follows the non-empty reading).
  bool allow_empty_with = false;
};

// Type checking for synchronous forwarders. `p` must be cut-free; the
// runtime variant also accepts the three cut constructors and the six
// runtime cut rule schemas. Throws CheckError on rejection.
DerivPtr check_sync(const ProcPtr& p, const Context& gamma, SyncOptions opt = {});
DerivPtr check_sync_runtime(const ProcPtr& p, const Context& gamma, SyncOptions opt = {});

std::optional<DerivPtr> try_check_sync(const ProcPtr& p, const Context& gamma,
                                       std::string* why = nullptr, SyncOptions opt = {});
std::optional<DerivPtr> try_check_sync_runtime(const ProcPtr& p, const Context& gamma,
                                               std::string* why = nullptr,
                                               SyncOptions opt = {});

// Indented rule-per-line rendering of a derivation.
std::string explain(const DerivPtr& d);

} // namespace fwdlab
