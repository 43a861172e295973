#pragma once

#include "fwdlab/context.hpp"
#include "fwdlab/errors.hpp"
#include "fwdlab/global_type.hpp"
#include "fwdlab/process.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace fwdlab {

// Parsers. `file` only labels error spans. Comments run from `#` to end
// of line, except that `#digits` inside an identifier is part of the
// identifier (fresh names print as base#n).
PropPtr parse_proposition(std::string_view text, std::string file = "<input>");
ProcPtr parse_process(std::string_view text, std::string file = "<input>");
GlobalPtr parse_global_type(std::string_view text, std::string file = "<input>");

// One `endpoint : type` binding per line; `---` separates contexts.
std::vector<Context> parse_contexts(std::string_view text, std::string file = "<input>");
Context parse_context(std::string_view text, std::string file = "<input>");

// Printers. Fully parenthesized by default; pretty mode drops the
// parentheses the right-associative precedence makes redundant.
std::string print_prop(const PropPtr& a, bool pretty = false);
std::string print_process(const ProcPtr& p, bool pretty = false);
std::string print_global_type(const GlobalPtr& g, bool pretty = false);
std::string print_context(const Context& ctx, bool pretty = false);
std::string print_entry(const Entry& e, bool pretty = false);

} // namespace fwdlab
