#pragma once

#include <stdexcept>
#include <string>

namespace fwdlab {

struct SourceSpan {
  std::string file;
  int line = 1; // 1-based
  int col = 1;

  std::string str() const;
};

struct ParseError : std::runtime_error {
  ParseError(std::string msg, SourceSpan where)
      : std::runtime_error(where.str() + ": " + msg), span(std::move(where)) {}
  SourceSpan span;
};

// Well-formed rejection by a checker: the judgement does not hold.
// `kind` is a stable machine-readable tag; `residual` the context at the
// point of failure, printed for diagnostics.
struct CheckError : std::runtime_error {
  CheckError(std::string k, std::string msg, std::string residual_ctx = "")
      : std::runtime_error(k + ": " + msg +
                           (residual_ctx.empty() ? "" : "\n  residual: " + residual_ctx)),
        kind(std::move(k)), residual(std::move(residual_ctx)) {}
  std::string kind;
  std::string residual;
};

// A violated internal guarantee (a theorem the implementation relies on).
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

} // namespace fwdlab
