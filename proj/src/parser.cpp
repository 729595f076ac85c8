#include <array>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "glreg/frontend.hpp"

namespace glreg {

namespace {

enum class Tok { Ident, RegVar, Number, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

// Unicode spellings and the ASCII token they stand for.
constexpr std::array<std::pair<std::string_view, std::pair<Tok, std::string_view>>, 7> kUnicode{{
    {"λ", {Tok::Ident, "fn"}},
    {"Π", {Tok::Ident, "Pi"}},
    {"⟨", {Tok::Sym, "("}},
    {"⟩", {Tok::Sym, ")"}},
    {"≡", {Tok::Sym, "="}},
    {"→", {Tok::Sym, "->"}},
    {"⇒", {Tok::Sym, "=>"}},
}};

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '\'' || c >= 0x80; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  std::size_t line_start = 0;
  auto unicode_at = [&](std::size_t k) -> const std::pair<Tok, std::string_view>* {
    for (const auto& [spelling, tok] : kUnicode) {
      if (src.substr(k, spelling.size()) == spelling) return &tok;
    }
    return nullptr;
  };
  auto unicode_len = [&](std::size_t k) {
    for (const auto& [spelling, tok] : kUnicode) {
      if (src.substr(k, spelling.size()) == spelling) return spelling.size();
    }
    return std::size_t{0};
  };
  while (i < src.size()) {
    unsigned char c = src[i];
    int col = static_cast<int>(i - line_start) + 1;
    if (c == '\n') {
      ++line;
      line_start = ++i;
      continue;
    }
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (const auto* u = unicode_at(i)) {
      out.push_back({u->first, std::string(u->second), line, col});
      i += unicode_len(i);
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), line, col});
      i = j;
      continue;
    }
    if (c == '\'' || is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < src.size() && is_ident_char(static_cast<unsigned char>(src[j])) && !unicode_at(j)) ++j;
      out.push_back({c == '\'' ? Tok::RegVar : Tok::Ident, std::string(src.substr(i, j - i)), line, col});
      i = j;
      continue;
    }
    auto two = src.substr(i, 2);
    if (two == "=>" || two == "->" || two == "==") {
      out.push_back({Tok::Sym, std::string(two), line, col});
      i += 2;
      continue;
    }
    if (std::string_view("()[]{},;:=@.+-<").find(static_cast<char>(c)) != std::string_view::npos) {
      out.push_back({Tok::Sym, std::string(1, static_cast<char>(c)), line, col});
      ++i;
      continue;
    }
    throw Error(ErrorKind::Syntax,
                std::to_string(line) + ":" + std::to_string(col) + ": unexpected character '" + std::string(1, c) + "'");
  }
  out.push_back({Tok::End, "", line, static_cast<int>(i - line_start) + 1});
  return out;
}

const std::unordered_set<std::string> kKeywords{
    "fn", "let", "in",  "if",    "then", "else", "new", "main", "region", "Pi",     "lo",
    "true", "false", "int", "bool", "array", "not", "and", "or", "index", "update"};
const std::unordered_set<std::string> kNamedOps{"not", "and", "or", "index", "update"};

class Parser {
 public:
  Parser(std::string_view src, ParseOptions opts) : toks_(lex(src)), opts_(opts) {}

  bool region() const { return opts_.mode == Mode::Region; }
  Qual default_qual() const { return region() ? Qual::region_name(0) : Qual::lo(); }

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_sym(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
  bool at_kw(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == s; }
  bool at_end() const { return peek().kind == Tok::End; }

  [[noreturn]] void fail(const std::string& msg) const {
    const auto& t = peek();
    std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorKind::Syntax, std::to_string(t.line) + ":" + std::to_string(t.col) + ": " + msg + " near " + near);
  }

  bool accept(const char* s) {
    if (at_sym(s) || at_kw(s)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const char* s) {
    if (!accept(s)) fail(std::string("expected '") + s + "'");
  }
  void expect_end() {
    if (!at_end()) fail("unexpected trailing input");
  }

  std::string name() {
    const auto& t = peek();
    if (t.kind != Tok::Ident || kKeywords.count(t.text)) fail("expected an identifier");
    if (!opts_.allow_reserved && fresh_index(t.text) > 0) {
      fail("'" + t.text + "' belongs to the reserved namespace x1, x2, ...");
    }
    ++pos_;
    return t.text;
  }

  std::string region_var_name() {
    const auto& t = peek();
    if (t.kind == Tok::RegVar || (t.kind == Tok::Ident && !kKeywords.count(t.text))) {
      ++pos_;
      return t.text;
    }
    fail("expected a region variable");
  }

  std::int64_t number() {
    bool neg = accept("-");
    if (peek().kind != Tok::Number) fail("expected a number");
    auto v = std::stoll(peek().text);
    ++pos_;
    return neg ? -v : v;
  }

  Qual qual() {
    const auto& t = peek();
    if (region()) {
      if (t.kind == Tok::Number) return Qual::region_name(static_cast<RegionName>(number()));
      return Qual::region_var(region_var_name());
    }
    if (accept("lo")) return Qual::lo();
    return Qual::var(name());
  }

  std::vector<std::string> region_binder() {
    expect("[");
    std::vector<std::string> out;
    if (!at_sym("]")) {
      do out.push_back(region_var_name());
      while (accept(","));
    }
    expect("]");
    return out;
  }

  Pattern pattern() {
    if (!accept("(")) return Pattern::var(name());
    std::vector<Pattern> elems;
    bool trailing = false;
    while (!at_sym(")")) {
      elems.push_back(pattern());
      trailing = accept(",");
      if (!trailing) break;
    }
    expect(")");
    if (elems.size() == 1 && !trailing) return elems[0];
    return Pattern::tuple(std::move(elems));
  }

  Effect effect() {
    expect("{");
    Effect out;
    if (!at_sym("}")) {
      do out.insert(qual());
      while (accept(","));
    }
    expect("}");
    return out;
  }

  Type type() {
    expect("(");
    for (auto [kw, b] : {std::pair{"int", BaseType::Int}, {"bool", BaseType::Bool}, {"array", BaseType::Array}}) {
      if (accept(kw)) {
        expect(",");
        Qual q = qual();
        expect(")");
        return Type::value(b, q);
      }
    }
    if (accept("Pi")) {
      std::optional<Pattern> gbinder;
      std::vector<std::string> rbinder;
      if (region()) rbinder = region_binder();
      else gbinder = pattern();
      expect(".");
      Type dom = type();
      expect("->");
      Effect eff = effect();
      Type cod = type();
      expect(",");
      Qual q = qual();
      expect(")");
      if (region()) return Type::region_fun(std::move(rbinder), std::move(dom), std::move(eff), std::move(cod), q);
      return Type::global_fun(std::move(*gbinder), std::move(dom), std::move(eff), std::move(cod), q);
    }
    std::vector<Type> elems;
    bool trailing = false;
    while (!at_sym(")")) {
      if (!at_sym("(")) fail("expected a type");
      elems.push_back(type());
      trailing = accept(",");
      if (!trailing) break;
    }
    expect(")");
    if (elems.size() == 1 && !trailing) return elems[0];
    return Type::tuple(std::move(elems));
  }

  // --- expressions -------------------------------------------------------

  bool atom_start(std::size_t k = 0) const {
    const auto& t = peek(k);
    if (t.kind == Tok::Number) return true;
    if (t.kind == Tok::Sym) return t.text == "(" || t.text == "{";
    if (t.kind == Tok::Ident) {
      return !kKeywords.count(t.text) || t.text == "true" || t.text == "false" || kNamedOps.count(t.text);
    }
    return false;
  }

  // `[` at offset k opens region arguments when the matching `]` is followed by an atom.
  bool region_args_ahead(std::size_t k) const {
    if (!region() || !at_sym("[", k)) return false;
    int depth = 0;
    for (std::size_t j = k;; ++j) {
      const auto& t = peek(j);
      if (t.kind == Tok::End) return false;
      if (t.kind != Tok::Sym) continue;
      if (t.text == "[") ++depth;
      if (t.text == "]" && --depth == 0) return atom_start(j + 1);
    }
  }

  bool qualifiable(const ExprPtr& e) const {
    return (e->kind == Expr::Kind::Op || e->kind == Expr::Kind::Lam) && !annotated_.count(e.get());
  }

  ExprPtr with_qual(const ExprPtr& e, Qual q) {
    auto out = std::make_shared<Expr>(*e);
    out->qual = std::move(q);
    annotated_.insert(out.get());
    return out;
  }

  ExprPtr maybe_qual(ExprPtr e) {
    if (at_sym("@") && qualifiable(e)) {
      ++pos_;
      return with_qual(e, qual());
    }
    return e;
  }

  ExprPtr op(std::string name, std::vector<ExprPtr> args) { return Expr::op_at(std::move(name), std::move(args), default_qual()); }

  ExprPtr expr(bool seq) {
    ExprPtr e = open(seq);
    if (seq && accept(";")) return Expr::let(Pattern::tuple({}), e, expr(true));
    return e;
  }

  ExprPtr open(bool seq) {
    if (accept("let")) {
      Pattern p = pattern();
      check_linear(p);
      expect("=");
      ExprPtr rhs = expr(true);
      expect("in");
      return Expr::let(std::move(p), rhs, expr(seq));
    }
    if (accept("if")) {
      ExprPtr c = expr(true);
      expect("then");
      ExprPtr t = expr(true);
      expect("else");
      return Expr::if_(c, t, expr(seq));
    }
    if (accept("fn")) return lambda(seq);
    if (accept("new")) {
      if (!region()) fail("'new' belongs to the region language");
      // new a, b. e  ==  new a. new b. e
      std::vector<Qual> places;
      do {
        places.push_back(peek().kind == Tok::Number ? Qual::region_name(static_cast<RegionName>(number()))
                                                    : Qual::region_var(region_var_name()));
      } while (accept(","));
      expect(".");
      ExprPtr body = expr(seq);
      for (auto it = places.rbegin(); it != places.rend(); ++it) body = Expr::new_(*it, body);
      return body;
    }
    return comparison();
  }

  struct LamHead {
    std::optional<std::vector<std::string>> binder;
    Pattern pat;
    std::optional<Type> annot;
  };

  LamHead lambda_head() {
    LamHead h;
    if (region()) h.binder = at_sym("[") ? region_binder() : std::vector<std::string>{};
    h.pat = pattern();
    check_linear(h.pat);
    if (accept(":")) h.annot = type();
    if (!accept("=>") && !accept(".")) fail("expected '=>'");
    return h;
  }

  ExprPtr lambda(bool seq) {
    LamHead h = lambda_head();
    ExprPtr body = expr(seq);
    ExprPtr lam = Expr::lam(std::move(h.pat), std::move(h.annot), body, default_qual(), std::move(h.binder));
    if (at_sym("@")) {
      ++pos_;
      return with_qual(lam, qual());
    }
    return lam;
  }

  ExprPtr comparison() {
    ExprPtr l = additive();
    if (at_sym("==") || at_sym("<")) {
      std::string o = peek().text;
      ++pos_;
      ExprPtr r = additive();
      l = maybe_qual(op(o, {l, r}));
    }
    return l;
  }

  ExprPtr additive() {
    ExprPtr l = application();
    while (at_sym("+") || at_sym("-")) {
      std::string o = peek().text;
      ++pos_;
      ExprPtr r = application();
      l = maybe_qual(op(o, {l, r}));
    }
    return l;
  }

  ExprPtr application() {
    const auto& t = peek();
    bool head = t.kind == Tok::Ident && !kKeywords.count(t.text);
    if (head && (atom_start(1) || region_args_ahead(1))) {
      Var f = name();
      std::vector<Qual> args;
      if (region_args_ahead(0)) {
        expect("[");
        if (!at_sym("]")) {
          do args.push_back(qual());
          while (accept(","));
        }
        expect("]");
      }
      return Expr::app(std::move(f), postfix(), std::move(args));
    }
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr a = atom();
    for (;;) {
      if (at_sym("[")) {
        ++pos_;
        ExprPtr i = expr(true);
        if (accept("->")) {
          ExprPtr v = expr(true);
          expect("]");
          a = op("update", {a, i, v});
        } else {
          expect("]");
          a = op("index", {a, i});
        }
        continue;
      }
      if (at_sym("@") && qualifiable(a)) {
        ++pos_;
        a = with_qual(a, qual());
        continue;
      }
      return a;
    }
  }

  std::vector<ExprPtr> call_args() {
    expect("(");
    std::vector<ExprPtr> args;
    if (!at_sym(")")) {
      do args.push_back(expr(true));
      while (accept(","));
    }
    expect(")");
    return args;
  }

  Ground ground() {
    if (accept("true")) return Ground::boolean(true);
    if (accept("false")) return Ground::boolean(false);
    if (accept("{")) {
      std::vector<std::int64_t> xs;
      if (!at_sym("}")) {
        do xs.push_back(number());
        while (accept(","));
      }
      expect("}");
      return Ground::array(std::move(xs));
    }
    return Ground::integer(number());
  }

  bool ground_start() const {
    return peek().kind == Tok::Number || at_sym("{") || at_kw("true") || at_kw("false") ||
           (at_sym("-") && peek(1).kind == Tok::Number);
  }

  ExprPtr atom() {
    if (ground_start()) return Expr::lit(ground(), default_qual());
    if (at_sym("(")) {
      bool shift = (at_sym("+", 1) || at_sym("-", 1)) && peek(2).kind == Tok::Number && at_sym(")", 3) &&
                   at_sym("(", 4);
      if (shift) {
        std::string o = peek(1).text + peek(2).text;
        pos_ += 4;
        return op(o, call_args());
      }
      ++pos_;
      if (accept(")")) return Expr::tuple({});
      std::vector<ExprPtr> elems{expr(true)};
      bool trailing = false;
      while (accept(",")) {
        trailing = true;
        if (at_sym(")")) break;
        elems.push_back(expr(true));
      }
      expect(")");
      if (elems.size() == 1 && !trailing) return elems[0];
      return Expr::tuple(std::move(elems));
    }
    if (peek().kind == Tok::Ident && kNamedOps.count(peek().text) && at_sym("(", 1)) {
      std::string o = peek().text;
      ++pos_;
      return op(o, call_args());
    }
    return Expr::var(name());
  }

  StorableValue store_value() {
    if (accept("fn")) {
      LamHead h = lambda_head();
      ExprPtr body = expr(false);
      if (at_sym("@")) fail("store closures carry no annotation");
      return StorableValue{Closure{std::move(h.binder), std::move(h.pat), std::move(h.annot), body}};
    }
    if (!ground_start()) fail("expected a storable value");
    return StorableValue{ground()};
  }

  void region_decl(RegionContext& r) {
    expect("region");
    auto n = static_cast<RegionName>(number());
    if (r.contains(n)) fail("region " + std::to_string(n) + " declared twice");
    expect("=");
    expect("[");
    auto& xs = r.regions()[n];
    if (!at_sym("]")) {
      do xs.push_back(name());
      while (accept(","));
    }
    expect("]");
    accept(";");
  }

  SourceFile program() {
    SourceFile f;
    f.mode = opts_.mode;
    while (at_kw("region")) {
      if (!region()) fail("region headers belong to region programs");
      if (!f.regions) f.regions.emplace();
      region_decl(*f.regions);
    }
    while (!at_kw("main")) {
      Var x = name();
      if (accept(":")) f.hints.push(x, type());
      expect("=");
      try {
        f.program.store.append(x, store_value());
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::Syntax) throw;
        fail(e.what());
      }
      expect(";");
    }
    expect("main");
    expect("=");
    f.program.main = expr(true);
    expect_end();
    return f;
  }

  TypeContext gamma() {
    TypeContext g;
    while (!at_end()) {
      Var x = name();
      expect(":");
      g.push(x, type());
      accept(";");
    }
    return g;
  }

  RegionContext regions() {
    RegionContext r;
    while (!at_end()) region_decl(r);
    return r;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ParseOptions opts_;
  std::unordered_set<const Expr*> annotated_;
};

}  // namespace

SourceFile parse_program(std::string_view src, const ParseOptions& opts) { return Parser(src, opts).program(); }

ExprPtr parse_expr(std::string_view src, const ParseOptions& opts) {
  Parser p(src, opts);
  auto e = p.expr(true);
  p.expect_end();
  return e;
}

Type parse_type(std::string_view src, Mode mode) {
  Parser p(src, {mode, true});
  auto t = p.type();
  p.expect_end();
  return t;
}

Pattern parse_pattern(std::string_view src) {
  Parser p(src, {Mode::Global, true});
  auto pat = p.pattern();
  p.expect_end();
  return pat;
}

TypeContext parse_gamma(std::string_view src, Mode mode) { return Parser(src, {mode, false}).gamma(); }

RegionContext parse_regions(std::string_view src) { return Parser(src, {Mode::Region, false}).regions(); }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Syntax, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Mode mode_for_path(const std::filesystem::path& p) { return p.extension() == ".reg" ? Mode::Region : Mode::Global; }

}  // namespace glreg
