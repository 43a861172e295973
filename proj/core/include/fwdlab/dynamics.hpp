#pragma once

#include "fwdlab/errors.hpp"
#include "fwdlab/process.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fwdlab {

enum class StepKind : uint8_t { Beta, Kappa, Equiv };

// One rewrite: `rule` names the row of the semantics tables, `position`
// is the path (0=left,1=right) to the rewritten cut, before/after are
// whole processes.
struct Step {
  StepKind kind;
  std::string rule;
  std::vector<int> position;
  ProcPtr before;
  ProcPtr after;
};

struct Trace {
  ProcPtr initial;
  std::vector<Step> steps;
  ProcPtr final;
};

std::string step_kind_name(StepKind k);

// Composition along a pair of dual endpoints: new (x:A)(y) (P|Q).
// Throws CheckError (NameClash/EndpointNotFree) on bad inputs.
ProcPtr compose(const ProcPtr& p, Name x, const ProcPtr& q, Name y, PropPtr a);

// One rewrite under the innermost-leftmost-cut strategy: beta when both
// cut endpoints are principal, otherwise the commuting conversion for
// the blocking head (select and client hoists first: those rules are
// invertible). Absent iff the process is cut-free.
std::optional<Step> step(const ProcPtr& p);

// Iterate step() to a cut-free normal form. Asserts the termination
// measure decreases at every step; `max_steps` is a safety net only.
// With `gamma` supplied, candidate conversions that would break typing
// are skipped, so every intermediate configuration retypes against it.
Trace normalize(const ProcPtr& p, size_t max_steps = 10000,
                const Context* gamma = nullptr);

// Canonical representative under link symmetry, cut symmetry and alpha.
ProcPtr struct_canon(const ProcPtr& p);

bool is_restriction_free(const ProcPtr& p);

// Termination measure: sorted multiset of (cut formula size, cut subterm
// size) over all cut nodes. `measure_decreases` is the multiset order
// check used by the per-step assertion.
std::vector<std::pair<size_t, size_t>> cut_measure(const ProcPtr& p);
bool measure_decreases(const std::vector<std::pair<size_t, size_t>>& before,
                       const std::vector<std::pair<size_t, size_t>>& after);

} // namespace fwdlab
