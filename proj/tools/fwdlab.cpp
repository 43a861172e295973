// fwdlab: check forwarders, check coherence, compile global types to
// arbiters and back, compose and normalize forwarder processes.

#include "fwdlab/arbiterize.hpp"
#include "fwdlab/coherence.hpp"
#include "fwdlab/dynamics.hpp"
#include "fwdlab/globalize.hpp"
#include "fwdlab/logic_cll.hpp"
#include "fwdlab/logic_sync.hpp"
#include "fwdlab/surface.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace fwdlab;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kUsage = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file", SourceSpan{path, 1, 1});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << text;
  if (!text.empty() && text.back() != '\n') out << "\n";
}

json deriv_json(const DerivPtr& d) {
  json j;
  j["rule"] = rule_name(d->rule);
  j["conclusion"] =
      (d->concl.proc ? print_process(d->concl.proc) : print_global_type(d->concl.gt)) +
      " |- " + print_context(d->concl.ctx);
  j["premises"] = json::array();
  for (const auto& p : d->premises) j["premises"].push_back(deriv_json(p));
  return j;
}

std::string path_str(const std::vector<int>& path) {
  if (path.empty()) return ".";
  std::string s;
  for (size_t i = 0; i < path.size(); ++i) {
    if (i) s += ".";
    s += std::to_string(path[i]);
  }
  return s;
}

const char* kind_sym(StepKind k) {
  switch (k) {
    case StepKind::Beta: return "β";
    case StepKind::Kappa: return "κ";
    case StepKind::Equiv: return "≡";
  }
  return "?";
}

json trace_json(const Trace& tr) {
  json j;
  j["initial"] = print_process(tr.initial);
  j["steps"] = json::array();
  for (size_t i = 0; i < tr.steps.size(); ++i) {
    const Step& s = tr.steps[i];
    json js;
    js["index"] = i;
    js["kind"] = step_kind_name(s.kind);
    js["rule"] = s.rule;
    js["path"] = s.position;
    js["before"] = print_process(s.before);
    js["after"] = print_process(s.after);
    j["steps"].push_back(std::move(js));
  }
  j["final"] = print_process(tr.final);
  return j;
}

std::string trace_text(const Trace& tr, bool full) {
  std::ostringstream os;
  for (size_t i = 0; i < tr.steps.size(); ++i) {
    const Step& s = tr.steps[i];
    os << "k" << i << " [" << kind_sym(s.kind) << "] " << s.rule << " @ "
       << path_str(s.position) << "\n";
    if (full) {
      os << "    before: " << print_process(s.before) << "\n";
      os << "    after:  " << print_process(s.after) << "\n";
    }
  }
  return os.str();
}

struct Options {
  std::string input;
  std::string ctx_file;
  std::string out;
  bool use_cll = false;
  bool use_sync = false;
  bool json_out = false;
  bool allow_empty_with = false;
  std::string trace_mode; // "", "steps", "full"
  size_t max_steps = 10000;
};

Context load_ctx(const Options& o) {
  return parse_context(slurp(o.ctx_file), o.ctx_file);
}

int cmd_check(const Options& o, bool explain_only) {
  ProcPtr p = parse_process(slurp(o.input), o.input);
  Context ctx = load_ctx(o);
  SyncOptions so;
  so.allow_empty_with = o.allow_empty_with;
  DerivPtr d;
  if (o.use_cll) {
    d = check_cll(p, ctx);
  } else {
    d = has_cut(p) ? check_sync_runtime(p, ctx, so) : check_sync(p, ctx, so);
  }
  if (o.json_out && !explain_only)
    emit(o.out, deriv_json(d).dump(2));
  else
    emit(o.out, explain(d));
  return kOk;
}

int cmd_coherent(const Options& o) {
  GlobalPtr g = parse_global_type(slurp(o.input), o.input);
  Context ctx = load_ctx(o);
  DerivPtr d = check_coherence(g, ctx);
  if (o.json_out)
    emit(o.out, deriv_json(d).dump(2));
  else
    emit(o.out, explain(d));
  return kOk;
}

int cmd_arbiterize(const Options& o) {
  GlobalPtr g = parse_global_type(slurp(o.input), o.input);
  ProcPtr p = arbiterize(g);
  emit(o.out, print_process(p));
  return kOk;
}

int cmd_globalize(const Options& o) {
  ProcPtr p = parse_process(slurp(o.input), o.input);
  Context ctx = load_ctx(o);
  GlobalPtr g = extract_global(p, ctx);
  emit(o.out, print_global_type(g));
  return kOk;
}

int cmd_compose(const Options& o, const std::string& qfile, const std::string& xname,
                const std::string& yname, const std::string& type_text) {
  ProcPtr p = parse_process(slurp(o.input), o.input);
  ProcPtr q = parse_process(slurp(qfile), qfile);
  PropPtr a = parse_proposition(type_text, "<--type>");
  ProcPtr comp = compose(p, intern(xname), q, intern(yname), a);
  emit(o.out, print_process(comp));
  return kOk;
}

int cmd_normalize(const Options& o) {
  ProcPtr p = parse_process(slurp(o.input), o.input);
  std::optional<Context> ctx;
  if (!o.ctx_file.empty()) ctx = parse_context(slurp(o.ctx_file), o.ctx_file);
  Trace tr = normalize(p, o.max_steps);
  if (ctx) {
    SyncOptions so;
    so.allow_empty_with = o.allow_empty_with;
    check_sync_runtime(tr.initial, *ctx, so);
    for (const Step& s : tr.steps) check_sync_runtime(s.after, *ctx, so);
  }
  if (o.json_out) {
    emit(o.out, trace_json(tr).dump(2));
    return kOk;
  }
  std::string body;
  if (!o.trace_mode.empty()) body += trace_text(tr, o.trace_mode == "full");
  body += print_process(tr.final);
  emit(o.out, body);
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"synchronous forwarder toolkit"};
  app.require_subcommand(1);

  Options o;
  std::string qfile, xname, yname, type_text;

  auto add_common = [&](CLI::App* c, bool needs_ctx) {
    c->add_option("input", o.input, "input file")->required();
    auto* ctxo = c->add_option("--ctx", o.ctx_file, "context file (.llp)");
    if (needs_ctx) ctxo->required();
    c->add_option("-o,--out", o.out, "output file (default stdout)");
    c->add_flag("--json", o.json_out, "machine-readable output");
    c->add_flag("--allow-empty-with", o.allow_empty_with,
                "admit an empty selection in the with rule");
  };

  auto* check = app.add_subcommand("check", "type-check a forwarder process");
  add_common(check, true);
  check->add_flag("--sync", o.use_sync, "use the synchronous forwarder logic (default)");
  check->add_flag("--cll", o.use_cll, "use plain CLL");

  auto* coherent = app.add_subcommand("coherent", "check coherence of a global type");
  add_common(coherent, true);

  auto* arbiterize_cmd =
      app.add_subcommand("arbiterize", "translate a global type into its arbiter");
  add_common(arbiterize_cmd, false);

  auto* globalize_cmd =
      app.add_subcommand("globalize", "extract the global type of a forwarder");
  add_common(globalize_cmd, true);

  auto* compose_cmd =
      app.add_subcommand("compose", "compose two forwarders along dual endpoints");
  compose_cmd->add_option("left", o.input, "left process file")->required();
  compose_cmd->add_option("x", xname, "endpoint of the left process")->required();
  compose_cmd->add_option("right", qfile, "right process file")->required();
  compose_cmd->add_option("y", yname, "endpoint of the right process")->required();
  compose_cmd->add_option("--type", type_text, "cut type of the left endpoint")->required();
  compose_cmd->add_option("-o,--out", o.out, "output file (default stdout)");

  auto* normalize_cmd = app.add_subcommand("normalize", "run cut elimination");
  add_common(normalize_cmd, false);
  normalize_cmd
      ->add_option("--trace", o.trace_mode, "print the rewrite trace ('steps' or 'full')")
      ->expected(0, 1);
  normalize_cmd->add_option("--max-steps", o.max_steps, "step budget (default 10000)");

  auto* explain_cmd = app.add_subcommand("explain", "print the typing derivation");
  add_common(explain_cmd, true);
  explain_cmd->add_flag("--sync", o.use_sync, "use the synchronous forwarder logic");
  explain_cmd->add_flag("--cll", o.use_cll, "use plain CLL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  // --trace with no value selects the short format
  if (normalize_cmd->count("--trace") && o.trace_mode.empty()) o.trace_mode = "steps";

  try {
    if (check->parsed()) return cmd_check(o, false);
    if (coherent->parsed()) return cmd_coherent(o);
    if (arbiterize_cmd->parsed()) return cmd_arbiterize(o);
    if (globalize_cmd->parsed()) return cmd_globalize(o);
    if (compose_cmd->parsed()) return cmd_compose(o, qfile, xname, yname, type_text);
    if (normalize_cmd->parsed()) return cmd_normalize(o);
    if (explain_cmd->parsed()) return cmd_check(o, true);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const CheckError& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return kRejected;
  } catch (const ContextError& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return kRejected;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return kUsage;
}
