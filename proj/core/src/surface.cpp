#include "fwdlab/surface.hpp"

#include <cctype>
#include <sstream>

namespace fwdlab {

std::string SourceSpan::str() const {
  return file + ":" + std::to_string(line) + ":" + std::to_string(col);
}

namespace {

enum class Tok : uint8_t {
  Ident, Number, Tilde, Bang, Query, Star, Plus, Amp, LPar, RPar, LBrk, RBrk,
  LBrace, RBrace, Dot, Semi, Comma, Colon, Pipe, Eq, Link, Arrow, Sep, End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_cont(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '\'' || c >= 0x80;
}

struct Lexer {
  std::string_view src;
  std::string file;
  size_t pos = 0;
  int line = 1, col = 1;
  std::vector<Token> toks;

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, SourceSpan{file, line, col});
  }

  char peek(size_t off = 0) const {
    return pos + off < src.size() ? src[pos + off] : '\0';
  }

  void advance() {
    if (src[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void push(Tok k, std::string text, SourceSpan sp) {
    toks.push_back(Token{k, std::move(text), std::move(sp)});
  }

  void run() {
    while (pos < src.size()) {
      char c = peek();
      SourceSpan sp{file, line, col};
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
        continue;
      }
      if (c == '#') { // comment to end of line (identifiers absorb #digits themselves)
        while (pos < src.size() && peek() != '\n') advance();
        continue;
      }
      if (c == '-') {
        if (peek(1) == '-' && peek(2) == '-') {
          advance(); advance(); advance();
          push(Tok::Sep, "---", sp);
          continue;
        }
        if (peek(1) == '>') {
          advance(); advance();
          push(Tok::Arrow, "->", sp);
          continue;
        }
        fail("stray '-'");
      }
      if (c == '<') {
        if (peek(1) == '-' && peek(2) == '>') {
          advance(); advance(); advance();
          push(Tok::Link, "<->", sp);
          continue;
        }
        fail("stray '<'");
      }
      if (ident_start(static_cast<unsigned char>(c))) {
        std::string t;
        while (pos < src.size()) {
          char d = peek();
          if (ident_cont(static_cast<unsigned char>(d))) {
            t += d;
            advance();
          } else if (d == '#' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            t += d;
            advance();
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(peek()))) {
              t += peek();
              advance();
            }
          } else {
            break;
          }
        }
        push(Tok::Ident, std::move(t), sp);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string t;
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(peek()))) {
          t += peek();
          advance();
        }
        push(Tok::Number, std::move(t), sp);
        continue;
      }
      auto simple = [&](Tok k) {
        advance();
        push(k, std::string(1, c), sp);
      };
      switch (c) {
        case '~': simple(Tok::Tilde); break;
        case '!': simple(Tok::Bang); break;
        case '?': simple(Tok::Query); break;
        case '*': simple(Tok::Star); break;
        case '+': simple(Tok::Plus); break;
        case '&': simple(Tok::Amp); break;
        case '(': simple(Tok::LPar); break;
        case ')': simple(Tok::RPar); break;
        case '[': simple(Tok::LBrk); break;
        case ']': simple(Tok::RBrk); break;
        case '{': simple(Tok::LBrace); break;
        case '}': simple(Tok::RBrace); break;
        case '.': simple(Tok::Dot); break;
        case ';': simple(Tok::Semi); break;
        case ',': simple(Tok::Comma); break;
        case ':': simple(Tok::Colon); break;
        case '|': simple(Tok::Pipe); break;
        case '=': simple(Tok::Eq); break;
        default: fail(std::string("unknown token '") + c + "'");
      }
    }
    push(Tok::End, "", SourceSpan{file, line, col});
  }
};

const char* kKeywords[] = {"par", "bot", "new",    "inl",   "inr",   "case",
                           "close", "gather", "branch", "serve", "axiom"};

bool is_keyword(const std::string& t) {
  for (auto k : kKeywords)
    if (t == k) return true;
  return false;
}

struct Parser {
  std::vector<Token> toks;
  size_t i = 0;
  NameSet scope; // binders live along the current path

  const Token& cur() const { return toks[i]; }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg + (cur().kind == Tok::End ? " (at end of input)"
                                                   : " (at '" + cur().text + "')"),
                     cur().span);
  }

  bool at(Tok k) const { return cur().kind == k; }

  Token eat(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return toks[i++];
  }

  bool opt(Tok k) {
    if (at(k)) {
      ++i;
      return true;
    }
    return false;
  }

  Name ident(const char* what) {
    if (!at(Tok::Ident)) fail(std::string("expected ") + what);
    if (is_keyword(cur().text)) fail("keyword '" + cur().text + "' used as a name");
    return intern(toks[i++].text);
  }

  Name binder(const char* what) {
    SourceSpan sp = cur().span;
    Name n = ident(what);
    if (contains(scope, n))
      throw ParseError("rebinding of live name '" + n.str() + "'", sp);
    return n;
  }

  // ----- propositions -----

  PropPtr prop() {
    PropPtr lhs = prop_prefix();
    switch (cur().kind) {
      case Tok::Star: ++i; return p_tensor(std::move(lhs), prop());
      case Tok::Plus: ++i; return p_plus(std::move(lhs), prop());
      case Tok::Amp: ++i; return p_with(std::move(lhs), prop());
      case Tok::Ident:
        if (cur().text == "par") {
          ++i;
          return p_par(std::move(lhs), prop());
        }
        return lhs;
      default: return lhs;
    }
  }

  PropPtr prop_prefix() {
    switch (cur().kind) {
      case Tok::Bang: ++i; return p_ofcourse(prop_prefix());
      case Tok::Query: ++i; return p_whynot(prop_prefix());
      case Tok::Tilde: {
        ++i;
        return p_atom(ident("atom name after '~'"), false);
      }
      case Tok::Number:
        if (cur().text == "1") {
          ++i;
          return p_one();
        }
        fail("unexpected number in type");
      case Tok::LPar: {
        ++i;
        PropPtr a = prop();
        eat(Tok::RPar, "')'");
        return a;
      }
      case Tok::Ident:
        if (cur().text == "bot") {
          ++i;
          return p_bot();
        }
        if (is_keyword(cur().text)) fail("keyword '" + cur().text + "' used as an atom");
        return p_atom(intern(toks[i++].text), true);
      default:
        fail("expected a type");
    }
  }

  // ----- processes -----

  ProcPtr process() {
    if (at(Tok::Query)) { // ?x[y].P
      ++i;
      Name x = ident("endpoint after '?'");
      eat(Tok::LBrk, "'['");
      Name y = binder("bound name");
      eat(Tok::RBrk, "']'");
      eat(Tok::Dot, "'.'");
      insert_name(scope, y);
      ProcPtr p = process();
      scope = set_minus(scope, y);
      return mk_client(x, y, std::move(p));
    }
    if (at(Tok::Bang)) { // !x(y).P
      ++i;
      Name x = ident("endpoint after '!'");
      eat(Tok::LPar, "'('");
      Name y = binder("bound name");
      eat(Tok::RPar, "')'");
      eat(Tok::Dot, "'.'");
      insert_name(scope, y);
      ProcPtr p = process();
      scope = set_minus(scope, y);
      return mk_server(x, y, std::move(p));
    }
    if (at(Tok::Ident) && cur().text == "new") return parse_cut();

    Name x = ident("a process");
    switch (cur().kind) {
      case Tok::Link: {
        ++i;
        return mk_link(x, ident("endpoint"));
      }
      case Tok::LBrk: { // x[] or x[y].(P|Q)
        ++i;
        if (opt(Tok::RBrk)) return mk_close(x);
        Name y = binder("bound name");
        eat(Tok::RBrk, "']'");
        eat(Tok::Dot, "'.'");
        eat(Tok::LPar, "'('");
        insert_name(scope, y);
        ProcPtr p = process();
        scope = set_minus(scope, y);
        eat(Tok::Pipe, "'|'");
        ProcPtr q = process();
        eat(Tok::RPar, "')'");
        if (contains(q->fn, y))
          fail("'" + y.str() + "' is bound in the send payload and may not occur in the continuation");
        return mk_send(x, y, std::move(p), std::move(q));
      }
      case Tok::LPar: { // x().P or x(y).P
        ++i;
        if (opt(Tok::RPar)) {
          eat(Tok::Dot, "'.'");
          return mk_wait(x, process());
        }
        Name y = binder("bound name");
        eat(Tok::RPar, "')'");
        eat(Tok::Dot, "'.'");
        insert_name(scope, y);
        ProcPtr p = process();
        scope = set_minus(scope, y);
        return mk_recv(x, y, std::move(p));
      }
      case Tok::Dot: {
        ++i;
        if (at(Tok::Ident) && cur().text == "inl") {
          ++i;
          eat(Tok::Semi, "';'");
          return mk_inl(x, process());
        }
        if (at(Tok::Ident) && cur().text == "inr") {
          ++i;
          eat(Tok::Semi, "';'");
          return mk_inr(x, process());
        }
        if (at(Tok::Ident) && cur().text == "case") {
          ++i;
          eat(Tok::LPar, "'('");
          ProcPtr p = process();
          eat(Tok::Comma, "','");
          ProcPtr q = process();
          eat(Tok::RPar, "')'");
          return mk_case(x, std::move(p), std::move(q));
        }
        fail("expected inl, inr or case after '.'");
      }
      default:
        fail("expected a process action");
    }
  }

  ProcPtr parse_cut() {
    ++i; // new
    eat(Tok::LPar, "'('");
    Name x = binder("bound name");
    if (!opt(Tok::Colon)) {
      // `new (u)([v])` is runtime-only syntax
      fail("runtime cut form is not accepted in surface input (missing ':type')");
    }
    PropPtr a = prop();
    eat(Tok::RPar, "')'");
    eat(Tok::LPar, "'('");
    if (at(Tok::LBrk))
      fail("runtime cut form 'new (x:A)([]y)' is not accepted in surface input");
    Name y = binder("bound name");
    eat(Tok::RPar, "')'");
    eat(Tok::LPar, "'('");
    insert_name(scope, x);
    insert_name(scope, y);
    ProcPtr p = process();
    eat(Tok::Pipe, "'|'");
    ProcPtr q = process();
    eat(Tok::RPar, "')'");
    scope = set_minus(scope, x);
    scope = set_minus(scope, y);
    if (contains(q->fn, x))
      fail("rebinding: '" + x.str() + "' is bound in the left branch but used in the right");
    if (contains(p->fn, y))
      fail("rebinding: '" + y.str() + "' is bound in the right branch but used in the left");
    return mk_cut(x, std::move(a), y, std::move(p), std::move(q));
  }

  // ----- global types -----

  std::vector<Name> ident_list() {
    std::vector<Name> out;
    out.push_back(ident("endpoint"));
    while (opt(Tok::Comma)) out.push_back(ident("endpoint"));
    return out;
  }

  GlobalPtr global() {
    if (!at(Tok::Ident)) fail("expected a global type");
    const std::string& kw = cur().text;
    if (kw == "close") {
      ++i;
      eat(Tok::LPar, "'('");
      auto xs = ident_list();
      eat(Tok::RPar, "')'");
      eat(Tok::Arrow, "'->'");
      return g_close_all(std::move(xs), ident("endpoint"));
    }
    if (kw == "gather") {
      ++i;
      eat(Tok::LPar, "'('");
      auto xs = ident_list();
      eat(Tok::RPar, "')'");
      eat(Tok::Arrow, "'->'");
      Name y = ident("endpoint");
      eat(Tok::LBrace, "'{'");
      GlobalPtr g = global();
      eat(Tok::RBrace, "'}'");
      eat(Tok::Semi, "';'");
      GlobalPtr h = global();
      return g_gather(std::move(xs), y, std::move(g), std::move(h));
    }
    if (kw == "branch") {
      ++i;
      Name x = ident("endpoint");
      eat(Tok::Arrow, "'->'");
      eat(Tok::LPar, "'('");
      auto ys = ident_list();
      eat(Tok::RPar, "')'");
      eat(Tok::LBrace, "'{'");
      GlobalPtr g = global();
      eat(Tok::RBrace, "'}'");
      eat(Tok::LBrace, "'{'");
      GlobalPtr h = global();
      eat(Tok::RBrace, "'}'");
      return g_branch(x, std::move(ys), std::move(g), std::move(h));
    }
    if (kw == "serve") {
      ++i;
      Name x = ident("endpoint");
      eat(Tok::Arrow, "'->'");
      eat(Tok::LPar, "'('");
      auto ys = ident_list();
      eat(Tok::RPar, "')'");
      eat(Tok::LBrace, "'{'");
      GlobalPtr g = global();
      eat(Tok::RBrace, "'}'");
      return g_serve(x, std::move(ys), std::move(g));
    }
    if (kw == "axiom") {
      ++i;
      Name x = ident("endpoint");
      eat(Tok::Colon, "':'");
      PropPtr a = prop();
      eat(Tok::Eq, "'='");
      return g_axiom(x, std::move(a), ident("endpoint"));
    }
    fail("expected close, gather, branch, serve or axiom");
  }

  // ----- contexts -----

  std::vector<Context> contexts() {
    std::vector<Context> out;
    Context cur_ctx;
    bool any = false;
    while (!at(Tok::End)) {
      if (opt(Tok::Sep)) {
        out.push_back(std::move(cur_ctx));
        cur_ctx = Context{};
        any = true;
        continue;
      }
      Name x = ident("endpoint");
      eat(Tok::Colon, "':'");
      PropPtr a = prop();
      try {
        cur_ctx.add_active(x, std::move(a));
      } catch (const ContextError& e) {
        fail(e.what());
      }
      any = true;
      opt(Tok::Comma); // commas are accepted as binding separators too
    }
    if (any || out.empty()) out.push_back(std::move(cur_ctx));
    return out;
  }
};

Parser make_parser(std::string_view text, std::string file) {
  Lexer lx{text, std::move(file)};
  lx.run();
  Parser p;
  p.toks = std::move(lx.toks);
  return p;
}

} // namespace

PropPtr parse_proposition(std::string_view text, std::string file) {
  Parser p = make_parser(text, std::move(file));
  PropPtr a = p.prop();
  p.eat(Tok::End, "end of input");
  return a;
}

ProcPtr parse_process(std::string_view text, std::string file) {
  Parser p = make_parser(text, std::move(file));
  ProcPtr t = p.process();
  p.eat(Tok::End, "end of input");
  return t;
}

GlobalPtr parse_global_type(std::string_view text, std::string file) {
  Parser p = make_parser(text, std::move(file));
  GlobalPtr g = p.global();
  p.eat(Tok::End, "end of input");
  return g;
}

std::vector<Context> parse_contexts(std::string_view text, std::string file) {
  Parser p = make_parser(text, std::move(file));
  return p.contexts();
}

Context parse_context(std::string_view text, std::string file) {
  auto all = parse_contexts(text, std::move(file));
  if (all.size() != 1)
    throw ParseError("expected exactly one context", SourceSpan{text.empty() ? "<input>" : "", 1, 1});
  return all[0];
}

// ----- printers -----

namespace {

void pp(const PropPtr& a, bool pretty, bool parenthesize_binary, std::string& out) {
  switch (a->kind) {
    case PropKind::Atom:
      if (!a->positive) out += '~';
      out += a->atom.str();
      return;
    case PropKind::One: out += '1'; return;
    case PropKind::Bot: out += "bot"; return;
    case PropKind::OfCourse:
    case PropKind::WhyNot: {
      out += a->kind == PropKind::OfCourse ? '!' : '?';
      bool wrap = is_binary(a->left->kind);
      if (wrap) out += '(';
      pp(a->left, pretty, false, out);
      if (wrap) out += ')';
      return;
    }
    default: {
      const char* op = a->kind == PropKind::Tensor ? " * "
                       : a->kind == PropKind::Par  ? " par "
                       : a->kind == PropKind::Plus ? " + "
                                                   : " & ";
      bool wrap = parenthesize_binary;
      if (wrap) out += '(';
      // a binary left child always needs parentheses under right-associativity
      pp(a->left, pretty, true, out);
      out += op;
      pp(a->right, pretty, !pretty, out);
      if (wrap) out += ')';
      return;
    }
  }
}

} // namespace

std::string print_prop(const PropPtr& a, bool pretty) {
  std::string out;
  pp(a, pretty, false, out);
  return out;
}

std::string print_process(const ProcPtr& p, bool pretty) {
  std::string out;
  switch (p->kind) {
    case ProcKind::Link:
      return p->a.str() + "<->" + p->b.str();
    case ProcKind::Close:
      return p->a.str() + "[]";
    case ProcKind::Wait:
      return p->a.str() + "()." + print_process(p->p, pretty);
    case ProcKind::Send:
      return p->a.str() + "[" + p->b.str() + "].(" + print_process(p->p, pretty) +
             " | " + print_process(p->q, pretty) + ")";
    case ProcKind::Recv:
      return p->a.str() + "(" + p->b.str() + ")." + print_process(p->p, pretty);
    case ProcKind::InL:
      return p->a.str() + ".inl; " + print_process(p->p, pretty);
    case ProcKind::InR:
      return p->a.str() + ".inr; " + print_process(p->p, pretty);
    case ProcKind::Case:
      return p->a.str() + ".case(" + print_process(p->p, pretty) + ", " +
             print_process(p->q, pretty) + ")";
    case ProcKind::Client:
      return "?" + p->a.str() + "[" + p->b.str() + "]." + print_process(p->p, pretty);
    case ProcKind::Server:
      return "!" + p->a.str() + "(" + p->b.str() + ")." + print_process(p->p, pretty);
    case ProcKind::Cut:
      return "new (" + p->a.str() + ":" + print_prop(p->ty, pretty) + ")(" + p->b.str() +
             ") (" + print_process(p->p, pretty) + " | " + print_process(p->q, pretty) + ")";
    case ProcKind::CutHalf:
      return "new (" + p->a.str() + ":" + print_prop(p->ty, pretty) + ")([]" + p->b.str() +
             ") (" + print_process(p->p, pretty) + " | " + print_process(p->q, pretty) + ")";
    case ProcKind::CutMsg:
      return "new (" + p->a.str() + ")([" + p->b.str() + "]) (" +
             print_process(p->p, pretty) + " | " + print_process(p->q, pretty) + ")";
  }
  return out;
}

namespace {
std::string join_names(const std::vector<Name>& ns) {
  std::string out;
  for (size_t i = 0; i < ns.size(); ++i) {
    if (i) out += ",";
    out += ns[i].str();
  }
  return out;
}
} // namespace

std::string print_global_type(const GlobalPtr& g, bool pretty) {
  switch (g->kind) {
    case GlobalKind::CloseAll:
      return "close (" + join_names(g->many) + ") -> " + g->one.str();
    case GlobalKind::Gather:
      return "gather (" + join_names(g->many) + ") -> " + g->one.str() + " { " +
             print_global_type(g->g, pretty) + " } ;" + (pretty ? "\n" : " ") +
             print_global_type(g->h, pretty);
    case GlobalKind::Branch:
      return "branch " + g->one.str() + " -> (" + join_names(g->many) + ") { " +
             print_global_type(g->g, pretty) + " }{ " + print_global_type(g->h, pretty) +
             " }";
    case GlobalKind::Serve:
      return "serve " + g->one.str() + " -> (" + join_names(g->many) + ") { " +
             print_global_type(g->g, pretty) + " }";
    case GlobalKind::GAxiom:
      return "axiom " + g->one.str() + ":" + print_prop(g->ty, pretty) + " = " +
             g->other.str();
  }
  return "";
}

std::string print_entry(const Entry& e, bool pretty) {
  switch (e.kind) {
    case EntryKind::Active:
      return e.ep.str() + " : " + print_prop(e.ty, pretty);
    case EntryKind::Buffer:
      return "[" + e.msg.str() + " : " + print_prop(e.msgTy, pretty) + "] " + e.ep.str() +
             " : " + print_prop(e.ty, pretty);
    default: {
      std::string head = e.kind == EntryKind::LBox   ? "L"
                         : e.kind == EntryKind::RBox ? "R"
                                                     : "Q";
      std::string out = head + "[[";
      for (size_t i = 0; i < e.members.size(); ++i) {
        if (i) out += ", ";
        out += e.members[i].first.str() + " : " + print_prop(e.members[i].second, pretty);
      }
      out += "]] " + e.ep.str() + " : " + print_prop(e.ty, pretty);
      return out;
    }
  }
}

std::string print_context(const Context& ctx, bool pretty) {
  std::string out;
  bool first = true;
  for (const auto& e : ctx.entries()) {
    if (!first) out += ", ";
    first = false;
    out += print_entry(e, pretty);
  }
  if (ctx.star()) {
    if (!first) out += ", ";
    out += "*";
  }
  return out;
}

} // namespace fwdlab
