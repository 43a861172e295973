#pragma once

#include "fwdlab/context.hpp"
#include "fwdlab/global_type.hpp"
#include "fwdlab/process.hpp"

#include <memory>
#include <string>
#include <vector>

namespace fwdlab {

enum class Rule : uint8_t {
  // synchronous forwarder logic
  Ax, One, Bot, Tensor, Par, With, PlusL, PlusR, Bang, Query,
  // runtime cut rules
  Cut, CutTensorPar, CutPlusWith1L, CutPlusWith1R, CutPlusWith2L,
  CutPlusWith2R, CutBangQuery1, CutBangQuery2,
  // plain CLL (reference system)
  CllAx, CllOne, CllBot, CllTensor, CllPar, CllPlusL, CllPlusR, CllWith,
  CllQuery, CllBang, CllCut,
  // coherence
  CohAxiom, CohOneBot, CohTensorPar, CohPlusWith, CohQueryBang,
  // compound rules of the completeness pipeline
  PlusWithPartial, PlusWithFull, QueryBangPartial, QueryBangFull,
  TensorParPartial, TensorParFull, OneBotPartial, OneBotFull,
};

const char* rule_name(Rule r);

// Which rule family a judgement admits. Compound2 adds the +&/?!
// compound rules on top of the base forwarder rules; Compound3 replaces
// the remaining base rules by the */1 compounds.
enum class System : uint8_t { Sync, Cll, Coh, Compound2, Compound3 };

struct Judgement {
  System sys = System::Sync;
  ProcPtr proc;  // Sync/Cll/Compound*
  GlobalPtr gt;  // Coh
  Context ctx;
};

Judgement j_sync(ProcPtr p, Context ctx);
Judgement j_cll(ProcPtr p, Context ctx);
Judgement j_coh(GlobalPtr g, Context ctx);
Judgement j_compound(System sys, ProcPtr p, Context ctx);

struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

// Explicit proof tree; the evidence object for every judgement and the
// thing the completeness pipeline rewrites. `chain` records, in order,
// the (subject, binder) pairs folded into a compound rule (binder is
// invalid for selects and waits); `principal` is the rule's principal
// endpoint and `principal_binder` its bound partner where one exists.
struct Derivation {
  Rule rule;
  Judgement concl;
  std::vector<DerivPtr> premises;
  Name principal;
  Name principal_binder;
  std::vector<std::pair<Name, Name>> chain;
};

DerivPtr mk_deriv(Rule r, Judgement concl, std::vector<DerivPtr> premises,
                  Name principal = Name{}, Name principal_binder = Name{},
                  std::vector<std::pair<Name, Name>> chain = {});

// Re-check one node against its rule schema (premise judgements taken
// as given). Returns an explanation on failure.
std::optional<std::string> validate_node(const Derivation& d);
// Recursively validate the whole tree.
std::optional<std::string> validate(const DerivPtr& d);

size_t deriv_height(const DerivPtr& d);
size_t deriv_count(const DerivPtr& d);

} // namespace fwdlab
