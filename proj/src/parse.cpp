// SPDX-License-Identifier: Apache-2.0

#include "mpst/parse.hpp"

#include <cctype>
#include <sstream>

namespace mpst {

namespace {

enum class Tok {
  Ident, Int, Arrow, Squiggle, SelectOp, Amp, LBrace, RBrace, LParen, RParen,
  LAngle, RAngle, Dot, Comma, Colon, Bang, Question, Plus, Minus, EqEq,
  Equals, Eof
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Arrow: return "'->'";
    case Tok::Squiggle: return "'~>'";
    case Tok::SelectOp: return "'(+)'";
    case Tok::Amp: return "'&'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LAngle: return "'<'";
    case Tok::RAngle: return "'>'";
    case Tok::Dot: return "'.'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Bang: return "'!'";
    case Tok::Question: return "'?'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::EqEq: return "'=='";
    case Tok::Equals: return "'='";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  long long ival = 0;
  SourceSpan span;
};

class Lexer {
 public:
  Lexer(const std::string& src, std::string file)
      : src_(src), file_(std::move(file)) {
    tokenize();
  }

  const std::vector<Token>& tokens() const { return toks_; }

 private:
  void tokenize() {
    size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&](size_t n) {
      for (size_t j = 0; j < n; ++j) {
        if (src_[i + j] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      i += n;
    };
    while (i < src_.size()) {
      char c = src_[i];
      SourceSpan sp{file_, line, col};
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance(1);
        continue;
      }
      if (c == '/' && i + 1 < src_.size() && src_[i + 1] == '/') {
        while (i < src_.size() && src_[i] != '\n') advance(1);
        continue;
      }
      auto two = src_.substr(i, 2);
      auto three = src_.substr(i, 3);
      if (three == "(+)") {
        push(Tok::SelectOp, three, sp);
        advance(3);
        continue;
      }
      if (two == "->") { push(Tok::Arrow, two, sp); advance(2); continue; }
      if (two == "~>") { push(Tok::Squiggle, two, sp); advance(2); continue; }
      if (two == "==") { push(Tok::EqEq, two, sp); advance(2); continue; }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[j])) ||
                src_[j] == '_' || src_[j] == '\''))
          ++j;
        push(Tok::Ident, src_.substr(i, j - i), sp);
        advance(j - i);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        size_t j = i;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
        Token t{Tok::Int, src_.substr(i, j - i), 0, sp};
        t.ival = std::stoll(t.text);
        toks_.push_back(t);
        advance(j - i);
        continue;
      }
      Tok k;
      switch (c) {
        case '&': k = Tok::Amp; break;
        case '{': k = Tok::LBrace; break;
        case '}': k = Tok::RBrace; break;
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case '<': k = Tok::LAngle; break;
        case '>': k = Tok::RAngle; break;
        case '.': k = Tok::Dot; break;
        case ',': k = Tok::Comma; break;
        case ':': k = Tok::Colon; break;
        case '!': k = Tok::Bang; break;
        case '?': k = Tok::Question; break;
        case '+': k = Tok::Plus; break;
        case '-': k = Tok::Minus; break;
        case '=': k = Tok::Equals; break;
        default:
          throw ParseError(std::string("unexpected character '") + c + "'", sp);
      }
      push(k, std::string(1, c), sp);
      advance(1);
    }
    toks_.push_back(Token{Tok::Eof, "", 0, SourceSpan{file_, line, col}});
  }

  void push(Tok k, std::string text, SourceSpan sp) {
    toks_.push_back(Token{k, std::move(text), 0, std::move(sp)});
  }

  const std::string& src_;
  std::string file_;
  std::vector<Token> toks_;
};

class Parser {
 public:
  Parser(const std::string& src, const std::string& file)
      : lex_(src, file), toks_(lex_.tokens()) {}

  // --- primitives ---------------------------------------------------------

  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }

  Token eat(Tok k, const std::string& what) {
    if (peek().kind != k)
      throw ParseError("expected " + what + " (" + tok_name(k) + "), found '" +
                           peek().text + "'",
                       peek().span);
    return toks_[pos_++];
  }

  bool eat_if(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }

  bool at_keyword(const std::string& kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }

  std::string ident(const std::string& what) {
    return eat(Tok::Ident, what).text;
  }

  void expect_eof() {
    if (peek().kind != Tok::Eof)
      throw ParseError("trailing input after '" + peek().text + "'", peek().span);
  }

  Sort payload_sort() {
    // "( sort )" or omitted, meaning unit.
    if (!eat_if(Tok::LParen)) return Sort::Unit;
    Token t = eat(Tok::Ident, "sort");
    auto s = sort_from_name(t.text);
    if (!s) throw ParseError("unknown sort '" + t.text + "'", t.span);
    eat(Tok::RParen, "')' after sort");
    return *s;
  }

  // --- global types --------------------------------------------------------

  GlobalPtr global_type() {
    const Token& t = peek();
    if (at_keyword("end")) {
      ++pos_;
      auto g = g_end();
      const_cast<GlobalType&>(*g).span = t.span;
      return g;
    }
    if (at_keyword("rec")) {
      ++pos_;
      Token v = eat(Tok::Ident, "recursion variable");
      eat(Tok::Dot, "'.' after recursion variable");
      auto g = g_rec(v.text, global_type());
      const_cast<GlobalType&>(*g).span = t.span;
      return g;
    }
    if (t.kind == Tok::Ident &&
        (peek(1).kind == Tok::Arrow || peek(1).kind == Tok::Squiggle)) {
      Role from{ident("sender role")};
      bool enroute = peek().kind == Tok::Squiggle;
      ++pos_;  // arrow
      Role to{ident("receiver role")};
      eat(Tok::LBrace, "'{' before branches");
      std::vector<GBranch> branches;
      do {
        Token lt = eat(Tok::Ident, "label");
        Sort s = payload_sort();
        eat(Tok::Dot, "'.' after label");
        branches.push_back(GBranch{Label{lt.text}, s, global_type()});
      } while (eat_if(Tok::Comma));
      eat(Tok::RBrace, "'}' after branches");
      if (enroute && branches.size() != 1)
        throw ParseError("en-route transmission carries exactly one message", t.span);
      GlobalPtr g = enroute ? g_enroute(from, to, branches[0].label,
                                        branches[0].sort, branches[0].cont)
                            : g_comm(from, to, std::move(branches));
      const_cast<GlobalType&>(*g).span = t.span;
      return g;
    }
    if (t.kind == Tok::Ident) {
      ++pos_;
      auto g = g_var(t.text);
      const_cast<GlobalType&>(*g).span = t.span;
      return g;
    }
    throw ParseError("expected a global type, found '" + t.text + "'", t.span);
  }

  // --- local types ----------------------------------------------------------

  LocalPtr local_type() {
    const Token& t = peek();
    if (at_keyword("end")) {
      ++pos_;
      auto l = l_end();
      const_cast<LocalType&>(*l).span = t.span;
      return l;
    }
    if (at_keyword("rec")) {
      ++pos_;
      Token v = eat(Tok::Ident, "recursion variable");
      eat(Tok::Dot, "'.' after recursion variable");
      auto l = l_rec(v.text, local_type());
      const_cast<LocalType&>(*l).span = t.span;
      return l;
    }
    if (t.kind == Tok::Ident &&
        (peek(1).kind == Tok::SelectOp || peek(1).kind == Tok::Amp)) {
      Role peer{ident("peer role")};
      bool select = peek().kind == Tok::SelectOp;
      ++pos_;  // operator
      eat(Tok::LBrace, "'{' before branches");
      std::vector<LBranch> branches;
      do {
        Token lt = eat(Tok::Ident, "label");
        Sort s = payload_sort();
        eat(Tok::Dot, "'.' after label");
        branches.push_back(LBranch{Label{lt.text}, s, local_type()});
      } while (eat_if(Tok::Comma));
      eat(Tok::RBrace, "'}' after branches");
      LocalPtr l = select ? l_select(peer, std::move(branches))
                          : l_branch(peer, std::move(branches));
      const_cast<LocalType&>(*l).span = t.span;
      return l;
    }
    if (t.kind == Tok::Ident) {
      ++pos_;
      auto l = l_var(t.text);
      const_cast<LocalType&>(*l).span = t.span;
      return l;
    }
    throw ParseError("expected a local type, found '" + t.text + "'", t.span);
  }

  // --- queues ---------------------------------------------------------------

  QueueType queue_type() {
    QueueType q;
    eat(Tok::LAngle, "'<' opening a queue");
    if (eat_if(Tok::RAngle)) return q;  // <> is the empty queue
    for (;;) {
      Role dest{ident("destination role")};
      eat(Tok::Comma, "',' inside a queue message");
      Token lt = eat(Tok::Ident, "label");
      Sort s = payload_sort();
      eat(Tok::RAngle, "'>' closing a queue message");
      q.push_back(QueueEntry{dest, Label{lt.text}, s});
      if (!eat_if(Tok::Dot)) break;
      eat(Tok::LAngle, "'<' opening a queue message");
    }
    return q;
  }

  // --- contexts ---------------------------------------------------------------

  TypingContext context() {
    TypingContext ctx;
    do {
      Token r = eat(Tok::Ident, "role");
      eat(Tok::Colon, "':' after role");
      eat(Tok::LParen, "'(' before queue");
      QueueType q = queue_type();
      eat(Tok::Comma, "',' between queue and type");
      LocalPtr t = local_type();
      eat(Tok::RParen, "')' after type");
      if (!ctx.entries.emplace(Role{r.text}, TypingContext::Entry{q, t}).second)
        throw ParseError("duplicate context entry for role '" + r.text + "'", r.span);
    } while (eat_if(Tok::Comma));
    return ctx;
  }

  // --- expressions -------------------------------------------------------------

  ExprPtr expr() {
    ExprPtr lhs = additive();
    if (eat_if(Tok::LAngle)) return e_less(lhs, additive());
    if (eat_if(Tok::EqEq)) return e_eq(lhs, additive());
    return lhs;
  }

  ExprPtr additive() {
    ExprPtr lhs = primary();
    for (;;) {
      if (eat_if(Tok::Plus)) lhs = e_add(lhs, primary());
      else if (eat_if(Tok::Minus)) lhs = e_sub(lhs, primary());
      else return lhs;
    }
  }

  ExprPtr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      ++pos_;
      return e_int(t.ival);
    }
    if (at_keyword("true")) { ++pos_; return e_bool(true); }
    if (at_keyword("false")) { ++pos_; return e_bool(false); }
    if (at_keyword("unit")) { ++pos_; return e_unit(); }
    if (at_keyword("nondet")) { ++pos_; return e_nondet(); }
    if (t.kind == Tok::Ident) { ++pos_; return e_var(t.text); }
    if (eat_if(Tok::LParen)) {
      ExprPtr e = expr();
      eat(Tok::RParen, "')' closing expression");
      return e;
    }
    throw ParseError("expected an expression, found '" + t.text + "'", t.span);
  }

  // --- processes ----------------------------------------------------------------

  ProcessPtr process() {
    const Token& t = peek();
    if (t.kind == Tok::Int && t.ival == 0) {
      ++pos_;
      auto p = p_inact();
      const_cast<Process&>(*p).span = t.span;
      return p;
    }
    if (at_keyword("if")) {
      ++pos_;
      ExprPtr cond = expr();
      if (!at_keyword("then"))
        throw ParseError("expected 'then'", peek().span);
      ++pos_;
      ProcessPtr pt = process();
      if (!at_keyword("else"))
        throw ParseError("expected 'else'", peek().span);
      ++pos_;
      ProcessPtr pe = process();
      auto p = p_if(cond, pt, pe);
      const_cast<Process&>(*p).span = t.span;
      return p;
    }
    if (at_keyword("rec")) {
      ++pos_;
      Token v = eat(Tok::Ident, "process variable");
      eat(Tok::Dot, "'.' after process variable");
      auto p = p_rec(v.text, process());
      const_cast<Process&>(*p).span = t.span;
      return p;
    }
    if (at_keyword("sum")) {
      ++pos_;
      eat(Tok::LBrace, "'{' opening sum");
      std::vector<RecvClause> clauses;
      Role peer;
      do {
        RecvClause c = recv_clause_with_peer(&peer, clauses.empty());
        clauses.push_back(std::move(c));
      } while (eat_if(Tok::Comma));
      eat(Tok::RBrace, "'}' closing sum");
      auto p = p_recv(peer, std::move(clauses));
      const_cast<Process&>(*p).span = t.span;
      return p;
    }
    if (t.kind == Tok::Ident && peek(1).kind == Tok::Bang) {
      Role peer{ident("peer role")};
      eat(Tok::Bang, "'!'");
      Token lt = eat(Tok::Ident, "label");
      ExprPtr payload = e_unit();
      if (eat_if(Tok::LAngle)) {
        payload = expr();
        eat(Tok::RAngle, "'>' closing payload");
      }
      eat(Tok::Dot, "'.' after send prefix");
      auto p = p_send(peer, Label{lt.text}, payload, process());
      const_cast<Process&>(*p).span = t.span;
      return p;
    }
    if (t.kind == Tok::Ident && peek(1).kind == Tok::Question) {
      Role peer;
      RecvClause c = recv_clause_with_peer(&peer, true);
      auto p = p_recv(peer, {std::move(c)});
      const_cast<Process&>(*p).span = t.span;
      return p;
    }
    if (t.kind == Tok::Ident) {
      ++pos_;
      auto p = p_pvar(t.text);
      const_cast<Process&>(*p).span = t.span;
      return p;
    }
    throw ParseError("expected a process, found '" + t.text + "'", t.span);
  }

  RecvClause recv_clause_with_peer(Role* peer, bool first) {
    Token r = eat(Tok::Ident, "peer role");
    if (first)
      *peer = Role{r.text};
    else if (peer->name != r.text)
      throw ParseError("sum clauses must share one peer; found '" + r.text +
                           "' after '" + peer->name + "'",
                       r.span);
    eat(Tok::Question, "'?' in receive");
    Token lt = eat(Tok::Ident, "label");
    eat(Tok::LParen, "'(' before bound variable");
    RecvClause c;
    c.label = Label{lt.text};
    if (peek().kind == Tok::RParen) {
      c.bind_var = "_";
      c.bind_sort = Sort::Unit;
    } else {
      c.bind_var = ident("bound variable");
      if (eat_if(Tok::Colon)) {
        Token st = eat(Tok::Ident, "sort");
        auto s = sort_from_name(st.text);
        if (!s) throw ParseError("unknown sort '" + st.text + "'", st.span);
        c.bind_sort = *s;
      } else {
        c.bind_sort = Sort::Unit;
      }
    }
    eat(Tok::RParen, "')' after bound variable");
    eat(Tok::Dot, "'.' after receive prefix");
    c.cont = process();
    return c;
  }

  // --- runtime queues and manifests ----------------------------------------------

  Value value() {
    const Token& t = peek();
    if (t.kind == Tok::Int) { ++pos_; return Value::of_int(t.ival); }
    if (t.kind == Tok::Minus && peek(1).kind == Tok::Int) {
      ++pos_;
      Token n = eat(Tok::Int, "integer");
      return Value::of_int(-n.ival);
    }
    if (at_keyword("true")) { ++pos_; return Value::of_bool(true); }
    if (at_keyword("false")) { ++pos_; return Value::of_bool(false); }
    if (at_keyword("unit")) { ++pos_; return Value::unit(); }
    throw ParseError("expected a value, found '" + t.text + "'", t.span);
  }

  RuntimeQueue runtime_queue() {
    RuntimeQueue q;
    eat(Tok::LAngle, "'<' opening a queue");
    if (eat_if(Tok::RAngle)) return q;
    for (;;) {
      Role dest{ident("destination role")};
      eat(Tok::Comma, "',' inside a queue message");
      Token lt = eat(Tok::Ident, "label");
      Value v = Value::unit();
      if (eat_if(Tok::LParen)) {
        if (peek().kind != Tok::RParen) v = value();
        eat(Tok::RParen, "')' after value");
      }
      eat(Tok::RAngle, "'>' closing a queue message");
      q.push_back(RuntimeMessage{dest, Label{lt.text}, v});
      if (!eat_if(Tok::Dot)) break;
      eat(Tok::LAngle, "'<' opening a queue message");
    }
    return q;
  }

  Manifest manifest() {
    Manifest m;
    bool have_global = false;
    while (peek().kind != Tok::Eof) {
      if (at_keyword("global")) {
        Token kw = toks_[pos_++];
        if (have_global)
          throw ParseError("duplicate 'global' section", kw.span);
        eat(Tok::LBrace, "'{' opening the global type");
        m.global = global_type();
        eat(Tok::RBrace, "'}' closing the global type");
        have_global = true;
        continue;
      }
      if (at_keyword("role")) {
        ++pos_;
        Token r = eat(Tok::Ident, "role");
        eat(Tok::Equals, "'=' after role name");
        Role role{r.text};
        m.session.parts[role].process = process();
        continue;
      }
      if (at_keyword("queue")) {
        ++pos_;
        Token r = eat(Tok::Ident, "role");
        eat(Tok::Equals, "'=' after role name");
        m.session.parts[Role{r.text}].queue = runtime_queue();
        continue;
      }
      throw ParseError("expected 'global', 'role' or 'queue', found '" +
                           peek().text + "'",
                       peek().span);
    }
    if (!have_global)
      throw ParseError("manifest is missing a 'global' section", peek().span);
    for (auto& [role, part] : m.session.parts)
      if (!part.process) part.process = p_inact();
    return m;
  }

 private:
  Lexer lex_;
  const std::vector<Token>& toks_;
  size_t pos_ = 0;
};

}  // namespace

GlobalPtr parse_global(const std::string& src, const std::string& file) {
  Parser p(src, file);
  GlobalPtr g = p.global_type();
  p.expect_eof();
  try {
    validate_global(g);
  } catch (const WellformednessError& e) {
    throw ParseError(e.what(), e.span.line ? e.span : g->span);
  }
  return g;
}

LocalPtr parse_local(const std::string& src, const std::string& file) {
  Parser p(src, file);
  LocalPtr t = p.local_type();
  p.expect_eof();
  try {
    validate_local(t);
  } catch (const WellformednessError& e) {
    throw ParseError(e.what(), e.span.line ? e.span : t->span);
  }
  return t;
}

QueueType parse_queue(const std::string& src, const std::string& file) {
  Parser p(src, file);
  QueueType q = p.queue_type();
  p.expect_eof();
  return q;
}

TypingContext parse_context(const std::string& src, const std::string& file) {
  Parser p(src, file);
  TypingContext ctx = p.context();
  p.expect_eof();
  for (const auto& [role, entry] : ctx.entries) {
    try {
      validate_local(entry.type);
    } catch (const WellformednessError& e) {
      throw ParseError("entry for '" + role.name + "': " + e.what(), e.span);
    }
  }
  return ctx;
}

ProcessPtr parse_process(const std::string& src, const std::string& file) {
  Parser p(src, file);
  ProcessPtr proc = p.process();
  p.expect_eof();
  try {
    validate_process(proc);
  } catch (const WellformednessError& e) {
    throw ParseError(e.what(), e.span.line ? e.span : proc->span);
  }
  return proc;
}

Manifest parse_manifest(const std::string& src, const std::string& file) {
  Parser p(src, file);
  Manifest m = p.manifest();
  p.expect_eof();
  try {
    validate_global(m.global);
    for (const auto& [role, part] : m.session.parts) validate_process(part.process);
  } catch (const WellformednessError& e) {
    throw ParseError(e.what(), e.span);
  }
  return m;
}

}  // namespace mpst
