#include "pasm/surface.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "pasm/errors.hpp"

namespace pasm {

namespace {

enum class Tok {
  Ident,
  Int,
  Atom,     // @label
  RawAtom,  // @#id
  LBrace2,
  RBrace2,
  LParen,
  RParen,
  Comma,
  Semi,
  Colon,
  Pipe,
  Walrus,  // :=
  Eq,
  Neq,
  Lt,
  Arrow,  // ->
  Iff,    // <->
  Plus,
  Minus,
  Star,
  Slash,
  End,
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Atom: return "atom";
    case Tok::RawAtom: return "atom";
    case Tok::LBrace2: return "'{{'";
    case Tok::RBrace2: return "'}}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Pipe: return "'|'";
    case Tok::Walrus: return "':='";
    case Tok::Eq: return "'='";
    case Tok::Neq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Arrow: return "'->'";
    case Tok::Iff: return "'<->'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::End: return "end of input";
  }
  return "token";
}

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t num = 0;
  int line = 1;
  int col = 1;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {
      "machine", "state",  "vocab",   "base",    "carrier",    "fun",    "rule",
      "primary", "secondary", "bridge", "dynamic", "relational", "pairs", "multisets",
      "par",     "endpar", "if",      "then",    "endif",      "forall", "with",
      "do",      "enddo",  "import",  "over",    "critical",   "exists", "not",
      "and",     "or",     "true",    "false",   "undef"};
  return kw;
}

class Lexer {
 public:
  Lexer(const std::string& src, const std::string& origin) : src_(src), origin_(origin) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t = next();
      out.push_back(t);
      if (t.kind == Tok::End) return out;
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(origin_ + ":" + std::to_string(line_) + ":" + std::to_string(col_) + ": " +
                     msg);
  }

  char cur() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  char ahead(std::size_t n) const { return pos_ + n < src_.size() ? src_[pos_ + n] : '\0'; }

  void advance() {
    if (cur() == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (true) {
      char c = cur();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && ahead(1) == '/') {
        while (cur() != '\0' && cur() != '\n') advance();
      } else {
        return;
      }
    }
  }

  Token make(Tok kind, std::string text) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.line = line_;
    t.col = col_;
    return t;
  }

  Token next() {
    char c = cur();
    Token t = make(Tok::End, "");
    if (c == '\0') return t;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string s;
      while (std::isalnum(static_cast<unsigned char>(cur())) || cur() == '_' || cur() == '\'') {
        s += cur();
        advance();
      }
      t.kind = Tok::Ident;
      t.text = s;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string s;
      while (std::isdigit(static_cast<unsigned char>(cur()))) {
        s += cur();
        advance();
      }
      t.kind = Tok::Int;
      t.num = std::stoll(s);
      t.text = s;
      return t;
    }
    if (c == '@') {
      advance();
      if (cur() == '#') {
        advance();
        std::string s;
        while (std::isdigit(static_cast<unsigned char>(cur()))) {
          s += cur();
          advance();
        }
        if (s.empty()) fail("expected digits after '@#'");
        t.kind = Tok::RawAtom;
        t.num = std::stoll(s);
        t.text = s;
        return t;
      }
      std::string s;
      while (std::isalnum(static_cast<unsigned char>(cur())) || cur() == '_') {
        s += cur();
        advance();
      }
      if (s.empty()) fail("expected a label after '@'");
      t.kind = Tok::Atom;
      t.text = s;
      return t;
    }
    auto two = [&](char a, char b) { return c == a && ahead(1) == b; };
    if (two('{', '{')) {
      advance();
      advance();
      t.kind = Tok::LBrace2;
      return t;
    }
    if (two('}', '}')) {
      advance();
      advance();
      t.kind = Tok::RBrace2;
      return t;
    }
    if (two(':', '=')) {
      advance();
      advance();
      t.kind = Tok::Walrus;
      return t;
    }
    if (two('!', '=')) {
      advance();
      advance();
      t.kind = Tok::Neq;
      return t;
    }
    if (c == '<' && ahead(1) == '-' && ahead(2) == '>') {
      advance();
      advance();
      advance();
      t.kind = Tok::Iff;
      return t;
    }
    if (two('-', '>')) {
      advance();
      advance();
      t.kind = Tok::Arrow;
      return t;
    }
    switch (c) {
      case '(': advance(); t.kind = Tok::LParen; return t;
      case ')': advance(); t.kind = Tok::RParen; return t;
      case ',': advance(); t.kind = Tok::Comma; return t;
      case ';': advance(); t.kind = Tok::Semi; return t;
      case ':': advance(); t.kind = Tok::Colon; return t;
      case '|': advance(); t.kind = Tok::Pipe; return t;
      case '=': advance(); t.kind = Tok::Eq; return t;
      case '<': advance(); t.kind = Tok::Lt; return t;
      case '+': advance(); t.kind = Tok::Plus; return t;
      case '-': advance(); t.kind = Tok::Minus; return t;
      case '*': advance(); t.kind = Tok::Star; return t;
      case '/': advance(); t.kind = Tok::Slash; return t;
      default: fail(std::string("unexpected character '") + c + "'");
    }
    return t;
  }

  const std::string& src_;
  std::string origin_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(const std::string& text, std::string origin)
      : origin_(std::move(origin)), tokens_(Lexer(text, origin_).run()) {}

  Machine parse_machine() {
    expect_keyword("machine");
    std::string name = ident("machine name");
    auto vocab = parse_vocab();
    BaseDecls base = parse_base();
    vocab_ = vocab.get();
    expect_keyword("rule");
    Rule r = parse_rule();
    expect(Tok::End);
    return make_machine(name, std::move(vocab), base, r);
  }

  State parse_state() {
    expect_keyword("state");
    ident("state name");
    auto vocab = parse_vocab();
    BaseDecls base = parse_base();
    State s(std::move(vocab));
    s.set_base(base);
    expect_keyword("carrier");
    while (at(Tok::Atom) || at(Tok::RawAtom)) s.add_carrier(parse_atom_value());
    while (accept_keyword("fun")) {
      std::string fn = ident("function symbol");
      std::vector<Value> args;
      if (accept(Tok::LParen)) {
        if (!at(Tok::RParen)) {
          args.push_back(parse_value());
          while (accept(Tok::Comma)) args.push_back(parse_value());
        }
        expect(Tok::RParen);
      }
      expect(Tok::Eq);
      Value v = parse_value();
      try {
        s.set_fun(fn, args, v);
      } catch (const Error& e) {
        fail(e.what());
      }
    }
    expect(Tok::End);
    return s;
  }

  Term parse_standalone_term(const Vocabulary& vocab, const std::vector<std::string>& bound) {
    vocab_ = &vocab;
    scope_ = bound;
    Term t = parse_term();
    expect(Tok::End);
    return t;
  }

  Rule parse_standalone_rule(const Vocabulary& vocab) {
    vocab_ = &vocab;
    Rule r = parse_rule();
    expect(Tok::End);
    return r;
  }

  Value parse_standalone_value() {
    Value v = parse_value();
    expect(Tok::End);
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    const Token& t = peek();
    throw ParseError(origin_ + ":" + std::to_string(t.line) + ":" + std::to_string(t.col) + ": " +
                     msg);
  }

  const Token& peek(std::size_t n = 0) const {
    std::size_t i = pos_ + n;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }

  Token get() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  bool at(Tok k) const { return peek().kind == k; }

  bool at_keyword(const std::string& kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }

  bool accept(Tok k) {
    if (!at(k)) return false;
    get();
    return true;
  }

  bool accept_keyword(const std::string& kw) {
    if (!at_keyword(kw)) return false;
    get();
    return true;
  }

  void expect(Tok k) {
    if (!at(k)) fail(std::string("expected ") + tok_name(k) + ", got " + describe(peek()));
    get();
  }

  void expect_keyword(const std::string& kw) {
    if (!at_keyword(kw)) fail("expected '" + kw + "', got " + describe(peek()));
    get();
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::Ident) return "'" + t.text + "'";
    if (t.kind == Tok::Int) return "'" + t.text + "'";
    if (t.kind == Tok::Atom) return "'@" + t.text + "'";
    return tok_name(t.kind);
  }

  std::string ident(const std::string& what) {
    if (!at(Tok::Ident)) fail("expected " + what);
    if (keywords().count(peek().text)) fail("keyword '" + peek().text + "' used as " + what);
    return get().text;
  }

  VocabularyPtr parse_vocab() {
    expect_keyword("vocab");
    auto vocab = std::make_shared<Vocabulary>();
    while (at(Tok::Ident) && !keywords().count(peek().text)) {
      FunctionSymbol sym;
      sym.name = get().text;
      expect(Tok::Slash);
      if (!at(Tok::Int)) fail("expected an arity");
      sym.arity = static_cast<int>(get().num);
      if (accept_keyword("primary")) {
        sym.kind = SymbolKind::Primary;
      } else if (accept_keyword("secondary")) {
        sym.kind = SymbolKind::Secondary;
      } else if (accept_keyword("bridge")) {
        sym.kind = SymbolKind::Bridge;
      } else {
        fail("expected 'primary', 'secondary' or 'bridge'");
      }
      sym.dynamic = accept_keyword("dynamic");
      sym.relational = accept_keyword("relational");
      try {
        vocab->declare(sym);
      } catch (const Error& e) {
        fail(e.what());
      }
    }
    return vocab;
  }

  BaseDecls parse_base() {
    BaseDecls base;
    if (accept_keyword("base")) {
      bool any = false;
      while (true) {
        if (accept_keyword("pairs")) {
          base.pairs = true;
          any = true;
        } else if (accept_keyword("multisets")) {
          base.multisets = true;
          any = true;
        } else {
          break;
        }
      }
      if (!any) fail("expected 'pairs' or 'multisets' after 'base'");
    }
    return base;
  }

  Value parse_atom_value() {
    if (at(Tok::Atom)) return Value::named_atom(get().text);
    if (at(Tok::RawAtom)) return Value::atom(AtomTable::instance().raw(get().num));
    fail("expected an atom");
  }

  Value parse_value() {
    if (at(Tok::Atom) || at(Tok::RawAtom)) return parse_atom_value();
    if (at(Tok::Int)) return Value::integer(get().num);
    if (accept(Tok::Minus)) {
      if (!at(Tok::Int)) fail("expected digits after '-'");
      return Value::integer(-get().num);
    }
    if (accept_keyword("true")) return Value::boolean(true);
    if (accept_keyword("false")) return Value::boolean(false);
    if (accept_keyword("undef")) return Value::undef();
    if (accept(Tok::LParen)) {
      std::vector<Value> parts;
      parts.push_back(parse_value());
      while (accept(Tok::Comma)) parts.push_back(parse_value());
      expect(Tok::RParen);
      if (parts.size() < 2) fail("a pair needs at least two components");
      return Value::tuple(parts);
    }
    if (accept(Tok::LBrace2)) {
      Value::MsetEntries entries;
      if (accept(Tok::RBrace2)) return Value::empty_multiset();
      while (true) {
        Value v = parse_value();
        expect(Tok::Colon);
        if (!at(Tok::Int)) fail("expected a multiplicity");
        entries.emplace_back(v, get().num);
        if (!accept(Tok::Comma)) break;
      }
      expect(Tok::RBrace2);
      return Value::multiset(std::move(entries));
    }
    fail("expected a value");
  }

  bool in_scope(const std::string& name) const {
    return std::find(scope_.begin(), scope_.end(), name) != scope_.end();
  }

  // --- terms ---

  Term parse_term() { return parse_iff(); }

  Term parse_iff() {
    Term left = parse_implies();
    if (accept(Tok::Iff)) return Term::app("iff", {left, parse_iff()});
    return left;
  }

  Term parse_implies() {
    Term left = parse_or();
    if (accept(Tok::Arrow)) return Term::app("implies", {left, parse_implies()});
    return left;
  }

  Term parse_or() {
    Term left = parse_and();
    while (accept_keyword("or")) left = Term::disj(left, parse_and());
    return left;
  }

  Term parse_and() {
    Term left = parse_cmp();
    while (accept_keyword("and")) left = Term::conj(left, parse_cmp());
    return left;
  }

  Term parse_cmp() {
    Term left = parse_add();
    if (accept(Tok::Eq)) return Term::eq(left, parse_add());
    if (accept(Tok::Neq)) return Term::neg(Term::eq(left, parse_add()));
    if (accept(Tok::Lt)) return Term::app("lt", {left, parse_add()});
    return left;
  }

  Term parse_add() {
    Term left = parse_mul();
    while (true) {
      if (accept(Tok::Plus)) {
        left = Term::app("add", {left, parse_mul()});
      } else if (accept(Tok::Minus)) {
        left = Term::app("sub", {left, parse_mul()});
      } else {
        return left;
      }
    }
  }

  Term parse_mul() {
    Term left = parse_primary();
    while (accept(Tok::Star)) left = Term::app("mul", {left, parse_primary()});
    return left;
  }

  std::vector<std::string> parse_var_list() {
    std::vector<std::string> vars;
    vars.push_back(ident("a variable"));
    while (accept(Tok::Comma)) vars.push_back(ident("a variable"));
    return vars;
  }

  Term parse_quantified(bool existential) {
    std::vector<std::string> vars = parse_var_list();
    expect(Tok::LParen);
    std::size_t mark = scope_.size();
    for (const std::string& v : vars) scope_.push_back(v);
    Term phi = parse_term();
    scope_.resize(mark);
    expect(Tok::RParen);
    return existential ? desugar_exists(vars, phi) : desugar_forall(vars, phi);
  }

  Term parse_comp_or_literal() {
    // Caller consumed '{{'.
    if (accept(Tok::RBrace2)) return Term::empty();
    // A multiset literal holds values only; try the term route first and fall
    // back on ':' which cannot start a comprehension continuation.
    std::size_t mark = pos_;
    if (!at(Tok::Pipe)) {
      // Attempt a value literal.
      try {
        Value v = parse_value();
        if (at(Tok::Colon)) {
          Value::MsetEntries entries;
          expect(Tok::Colon);
          if (!at(Tok::Int)) fail("expected a multiplicity");
          entries.emplace_back(v, get().num);
          while (accept(Tok::Comma)) {
            Value v2 = parse_value();
            expect(Tok::Colon);
            if (!at(Tok::Int)) fail("expected a multiplicity");
            entries.emplace_back(v2, get().num);
          }
          expect(Tok::RBrace2);
          return Term::lit(Value::multiset(std::move(entries)));
        }
      } catch (const ParseError&) {
        // Not a value literal; rewind and parse a comprehension head.
      }
      pos_ = mark;
    }
    // Comprehension. Head components give the tuple arity.
    std::vector<Term> components;
    scope_marker_t outer = scope_;
    if (at(Tok::LParen) && !at_tuple_is_plain_parens()) {
      expect(Tok::LParen);
      components.push_back(parse_term());
      while (accept(Tok::Comma)) components.push_back(parse_term());
      expect(Tok::RParen);
    } else {
      components.push_back(parse_term());
    }
    expect(Tok::Pipe);
    Term guard = parse_term();
    expect(Tok::RBrace2);
    std::vector<std::string> binders;
    std::vector<Term> domain_terms;
    if (accept_keyword("over")) {
      if (accept_keyword("critical")) {
        expect(Tok::LParen);
        domain_terms.push_back(parse_term());
        while (accept(Tok::Semi)) domain_terms.push_back(parse_term());
        expect(Tok::RParen);
      }
      binders = parse_var_list();
    } else {
      // Binders default to the variables not bound in the enclosing scope.
      std::set<std::string> inferred;
      for (const Term& c : components) {
        for (const std::string& v : free_vars(c)) inferred.insert(v);
      }
      for (const std::string& v : free_vars(guard)) inferred.insert(v);
      for (const std::string& v : outer) inferred.erase(v);
      binders.assign(inferred.begin(), inferred.end());
    }
    return Term::comp(components, guard, std::move(binders), std::move(domain_terms));
  }

  using scope_marker_t = std::vector<std::string>;

  // Distinguishes '((a))' style grouping from a tuple head: a tuple head has a
  // top-level comma before its closing paren.
  bool at_tuple_is_plain_parens() const {
    int depth = 0;
    for (std::size_t i = 0; ; ++i) {
      const Token& t = peek(i);
      if (t.kind == Tok::End) return true;
      if (t.kind == Tok::LParen || t.kind == Tok::LBrace2) ++depth;
      if (t.kind == Tok::RParen || t.kind == Tok::RBrace2) {
        --depth;
        if (depth == 0) return true;
      }
      if (t.kind == Tok::Comma && depth == 1) return false;
    }
  }

  Term parse_primary() {
    if (accept_keyword("not")) {
      expect(Tok::LParen);
      Term t = parse_term();
      expect(Tok::RParen);
      return Term::neg(t);
    }
    if (accept_keyword("exists")) return parse_quantified(true);
    if (accept_keyword("forall")) return parse_quantified(false);
    if (accept_keyword("true")) return Term::tru();
    if (accept_keyword("false")) return Term::fls();
    if (accept_keyword("undef")) return Term::undef();
    if (at(Tok::Int)) return Term::lit(Value::integer(get().num));
    if (accept(Tok::Minus)) {
      if (!at(Tok::Int)) fail("expected digits after unary '-'");
      return Term::lit(Value::integer(-get().num));
    }
    if (at(Tok::Atom) || at(Tok::RawAtom)) return Term::lit(parse_atom_value());
    if (accept(Tok::LBrace2)) return parse_comp_or_literal();
    if (accept(Tok::LParen)) {
      std::vector<Term> parts;
      parts.push_back(parse_term());
      while (accept(Tok::Comma)) parts.push_back(parse_term());
      expect(Tok::RParen);
      if (parts.size() == 1) return parts[0];
      return Term::tuple_term(parts);
    }
    if (at(Tok::Ident)) {
      if (keywords().count(peek().text)) fail("unexpected keyword '" + peek().text + "'");
      std::string name = get().text;
      if (accept(Tok::LParen)) {
        std::vector<Term> args;
        if (!at(Tok::RParen)) {
          args.push_back(parse_term());
          while (accept(Tok::Comma)) args.push_back(parse_term());
        }
        expect(Tok::RParen);
        const FunctionSymbol* sym = vocab_ ? vocab_->resolve(name) : Vocabulary::builtin(name);
        if (sym == nullptr) fail("unknown function symbol '" + name + "'");
        if (sym->arity != static_cast<int>(args.size())) {
          fail("function '" + name + "' expects " + std::to_string(sym->arity) + " arguments");
        }
        return Term::app(name, std::move(args));
      }
      if (in_scope(name)) return Term::var(name);
      const FunctionSymbol* sym = vocab_ ? vocab_->resolve(name) : Vocabulary::builtin(name);
      if (sym != nullptr && sym->arity == 0) return Term::app(name);
      return Term::var(name);
    }
    fail("expected a term, got " + describe(peek()));
  }

  // --- rules ---

  Rule parse_rule() {
    if (accept_keyword("par")) {
      std::vector<Rule> rules;
      while (!accept_keyword("endpar")) rules.push_back(parse_rule());
      return Rule::par(std::move(rules));
    }
    if (accept_keyword("if")) {
      Term guard = parse_term();
      expect_keyword("then");
      Rule body = parse_rule();
      expect_keyword("endif");
      return Rule::cond(guard, body);
    }
    if (accept_keyword("forall")) {
      std::vector<std::string> vars = parse_var_list();
      std::vector<Term> domain_terms;
      if (accept_keyword("over")) {
        expect_keyword("critical");
        expect(Tok::LParen);
        domain_terms.push_back(parse_term());
        while (accept(Tok::Semi)) domain_terms.push_back(parse_term());
        expect(Tok::RParen);
      }
      expect_keyword("with");
      std::size_t mark = scope_.size();
      for (const std::string& v : vars) scope_.push_back(v);
      Term guard = parse_term();
      expect_keyword("do");
      Rule body = parse_rule();
      expect_keyword("enddo");
      scope_.resize(mark);
      if (domain_terms.empty()) return Rule::forall(std::move(vars), guard, body);
      return Rule::forall_critical(std::move(vars), std::move(domain_terms), guard, body);
    }
    if (accept_keyword("import")) {
      std::string var = ident("a variable");
      expect_keyword("do");
      scope_.push_back(var);
      Rule body = parse_rule();
      expect_keyword("enddo");
      scope_.pop_back();
      return Rule::import_rule(var, body);
    }
    // Assignment.
    std::string fn = ident("a rule");
    std::vector<Term> args;
    if (accept(Tok::LParen)) {
      if (!at(Tok::RParen)) {
        args.push_back(parse_term());
        while (accept(Tok::Comma)) args.push_back(parse_term());
      }
      expect(Tok::RParen);
    }
    expect(Tok::Walrus);
    Term rhs = parse_term();
    return Rule::assign(fn, std::move(args), rhs);
  }

  std::string origin_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const Vocabulary* vocab_ = nullptr;
  std::vector<std::string> scope_;
};

}  // namespace

Machine parse_machine_text(const std::string& text, const std::string& origin) {
  return Parser(text, origin).parse_machine();
}

State parse_state_text(const std::string& text, const std::string& origin) {
  return Parser(text, origin).parse_state();
}

Term parse_term_text(const std::string& text, const Vocabulary& vocab,
                     const std::vector<std::string>& bound, const std::string& origin) {
  return Parser(text, origin).parse_standalone_term(vocab, bound);
}

Rule parse_rule_text(const std::string& text, const Vocabulary& vocab,
                     const std::string& origin) {
  return Parser(text, origin).parse_standalone_rule(vocab);
}

Value parse_value_text(const std::string& text, const std::string& origin) {
  return Parser(text, origin).parse_standalone_value();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

Machine load_machine_file(const std::string& path) {
  return parse_machine_text(read_text_file(path), path);
}

State load_state_file(const std::string& path) {
  return parse_state_text(read_text_file(path), path);
}

namespace {

void print_vocab(std::ostringstream& os, const Vocabulary& vocab, const BaseDecls& base) {
  os << "vocab\n";
  for (const auto& [name, sym] : vocab.symbols()) {
    os << "  " << name << "/" << sym.arity << " " << symbol_kind_name(sym.kind);
    if (sym.dynamic) os << " dynamic";
    if (sym.relational) os << " relational";
    os << "\n";
  }
  if (base.pairs || base.multisets) {
    os << "base";
    if (base.pairs) os << " pairs";
    if (base.multisets) os << " multisets";
    os << "\n";
  }
}

}  // namespace

std::string print_machine(const Machine& m) {
  std::ostringstream os;
  os << "machine " << m.name << "\n";
  print_vocab(os, *m.vocab, m.base);
  os << "rule\n";
  os << m.rule.to_string(0) << "\n";
  return os.str();
}

std::string print_state(const State& s, const std::string& name) {
  std::ostringstream os;
  os << "state " << name << "\n";
  print_vocab(os, s.vocab(), s.base());
  os << "carrier";
  for (const Value& a : s.carrier()) os << " " << a.to_string();
  os << "\n";
  for (const auto& [fn, table] : s.tables()) {
    for (const auto& [args, value] : table) {
      os << "fun " << fn;
      if (!args.empty()) {
        os << "(";
        for (std::size_t i = 0; i < args.size(); ++i) {
          if (i > 0) os << ", ";
          os << args[i].to_string();
        }
        os << ")";
      }
      os << " = " << value.to_string() << "\n";
    }
  }
  return os.str();
}

}  // namespace pasm
