#include <sstream>

#include "glreg/frontend.hpp"

namespace glreg {

namespace {

// Precedence levels, loosest first.
enum Level { kOpen = 1, kCmp = 2, kAdd = 3, kApp = 4, kAtom = 5 };

struct Printer {
  PrintOptions opts;

  bool region() const { return opts.mode == Mode::Region; }
  const char* lam_kw() const { return opts.unicode ? "λ" : "fn"; }
  const char* arrow() const { return opts.unicode ? " → " : " -> "; }
  const char* open() const { return opts.unicode ? "⟨" : "("; }
  const char* close() const { return opts.unicode ? "⟩" : ")"; }

  bool qual_shown(const Expr& e) const {
    if (e.kind != Expr::Kind::Op && e.kind != Expr::Kind::Lam) return false;
    return region() || !e.qual.is_lo();
  }

  static std::string binder(const std::vector<std::string>& b) {
    std::string s = "[";
    for (std::size_t i = 0; i < b.size(); ++i) s += (i ? ", " : "") + b[i];
    return s + "]";
  }

  std::string tuple(const std::vector<std::string>& parts) const {
    std::string s = open();
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : "") + parts[i];
    if (parts.size() == 1) s += ",";
    return s + close();
  }

  std::string pattern(const Pattern& p) const {
    if (p.is_var) return p.name;
    std::vector<std::string> parts;
    for (const auto& q : p.elems) parts.push_back(pattern(q));
    return tuple(parts);
  }

  std::string type(const Type& t) const {
    switch (t.kind) {
      case Type::Kind::Value:
        return std::string("(") + to_string(t.base) + ", " + print_qual(t.qual) + ")";
      case Type::Kind::Tuple: {
        std::vector<std::string> parts;
        for (const auto& p : t.parts) parts.push_back(type(p));
        return tuple(parts);
      }
      case Type::Kind::Fun: {
        std::string s = opts.unicode ? "(Π" : "(Pi ";
        if (t.binder) s += pattern(*t.binder);
        else s += binder(t.region_binder);
        s += " . " + type(t.dom()) + arrow() + print_effect(t.effect) + " " + type(t.cod());
        return s + ", " + print_qual(t.qual) + ")";
      }
    }
    return "?";
  }

  std::string lam_text(const Expr& e) const {
    std::string s = lam_kw();
    s += " ";
    if (region()) s += binder(e.region_binder.value_or(std::vector<std::string>{})) + " ";
    s += pattern(e.pat);
    if (e.annot) s += " : " + type(*e.annot);
    return s + " => " + expr(*e.kids[0], kOpen);
  }

  int level(const Expr& e) const {
    if (qual_shown(e)) return kOpen;
    switch (e.kind) {
      case Expr::Kind::Var:
      case Expr::Kind::Tuple:
        return kAtom;
      case Expr::Kind::Op:
        if (e.literal) {
          if (auto* n = std::get_if<std::int64_t>(&e.literal->v); n && *n < 0) return kOpen;
          return kAtom;
        }
        if (e.op == "+" || e.op == "-") return kAdd;
        if (e.op == "==" || e.op == "<") return kCmp;
        return kAtom;
      case Expr::Kind::App:
        return kApp;
      default:
        return kOpen;
    }
  }

  // Whether a trailing `@ q` after k's text would attach inside k.
  bool steals(const Expr& k) const {
    if (qual_shown(k)) return false;
    if (k.kind == Expr::Kind::Op || k.kind == Expr::Kind::Lam) return true;
    return k.kind == Expr::Kind::App && steals(*k.kids[0]);
  }

  static bool infix(const Expr& e) {
    return e.kind == Expr::Kind::Op && !e.literal && (e.op == "+" || e.op == "-" || e.op == "==" || e.op == "<");
  }

  std::string expr(const Expr& e, int need) const {
    std::string s = bare(e);
    if (qual_shown(e)) {
      if (e.kind == Expr::Kind::Lam || (infix(e) && steals(*e.kids[1]))) s = "(" + s + ")";
      s += " @ " + print_qual(e.qual);
    }
    if (level(e) < need) return "(" + s + ")";
    return s;
  }

  std::string bare(const Expr& e) const {
    switch (e.kind) {
      case Expr::Kind::Var:
        return e.name;
      case Expr::Kind::Op:
        return op(e);
      case Expr::Kind::Lam:
        return lam_text(e);
      case Expr::Kind::Tuple: {
        std::vector<std::string> parts;
        for (const auto& k : e.kids) parts.push_back(expr(*k, kOpen));
        return tuple(parts);
      }
      case Expr::Kind::App: {
        std::string s = e.name;
        if (region()) {
          s += " [";
          for (std::size_t i = 0; i < e.region_args.size(); ++i) {
            s += (i ? ", " : "") + print_qual(e.region_args[i]);
          }
          s += "]";
        }
        return s + " " + expr(*e.kids[0], kAtom);
      }
      case Expr::Kind::If:
        return "if " + expr(*e.kids[0], kOpen) + " then " + expr(*e.kids[1], kOpen) + " else " +
               expr(*e.kids[2], kOpen);
      case Expr::Kind::Let:
        return "let " + pattern(e.pat) + (opts.unicode ? " ≡ " : " = ") + expr(*e.kids[0], kOpen) + " in " +
               expr(*e.kids[1], kOpen);
      case Expr::Kind::New:
        return "new " + print_qual(e.qual) + ". " + expr(*e.kids[0], kOpen);
    }
    return "?";
  }

  std::string op(const Expr& e) const {
    if (e.literal) return to_string(*e.literal);
    const auto& k = e.kids;
    if (e.op == "+" || e.op == "-") return expr(*k[0], kAdd) + " " + e.op + " " + expr(*k[1], kApp);
    if (e.op == "==" || e.op == "<") return expr(*k[0], kAdd) + " " + e.op + " " + expr(*k[1], kAdd);
    if (e.op == "index") return expr(*k[0], kAtom) + "[" + expr(*k[1], kOpen) + "]";
    if (e.op == "update") {
      return expr(*k[0], kAtom) + "[" + expr(*k[1], kOpen) + arrow() + expr(*k[2], kOpen) + "]";
    }
    std::string args;
    for (std::size_t i = 0; i < k.size(); ++i) args += (i ? ", " : "") + expr(*k[i], kOpen);
    if (is_unary_shift(e.op)) return "(" + e.op + ")(" + args + ")";
    return e.op + "(" + args + ")";
  }

  std::string value(const StorableValue& v) const {
    if (!v.is_closure()) return to_string(v.ground());
    const Closure& c = v.closure();
    std::string s = lam_kw();
    s += " ";
    if (region()) s += binder(c.region_binder.value_or(std::vector<std::string>{})) + " ";
    s += pattern(c.param);
    if (c.annot) s += " : " + type(*c.annot);
    return s + " => " + expr(*c.body, kOpen);
  }
};

}  // namespace

std::string print_qual(const Qual& q) {
  switch (q.kind) {
    case Qual::Kind::Lo: return "lo";
    case Qual::Kind::Var: return q.name;
    case Qual::Kind::Region: return std::to_string(q.region);
    case Qual::Kind::RegionVar: return q.name;
  }
  return "?";
}

std::string print_effect(const Effect& e) {
  std::string s = "{";
  bool first = true;
  for (const auto& q : e) {
    s += (first ? "" : ", ") + print_qual(q);
    first = false;
  }
  return s + "}";
}

std::string print_pattern(const Pattern& p, bool unicode) {
  return Printer{{Mode::Global, unicode}}.pattern(p);
}

std::string print_type(const Type& t, const PrintOptions& opts) { return Printer{opts}.type(t); }

std::string print_expr(const Expr& e, const PrintOptions& opts) { return Printer{opts}.expr(e, kOpen); }

std::string print_value(const StorableValue& v, const PrintOptions& opts) { return Printer{opts}.value(v); }

std::string print_store(const Store& s, const PrintOptions& opts, const TypeContext* hints) {
  std::ostringstream out;
  for (const auto& b : s.bindings()) {
    out << b.name;
    if (hints) {
      if (const Type* t = hints->find(b.name)) out << " : " << print_type(*t, opts);
    }
    out << " = " << print_value(b.value, opts) << ";\n";
  }
  return out.str();
}

std::string print_region_headers(const RegionContext& r) {
  std::ostringstream out;
  for (const auto& [n, xs] : r.regions()) {
    out << "region " << n << " = [";
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? ", " : "") << xs[i];
    out << "];\n";
  }
  return out.str();
}

std::string print_program(const SourceFile& f, const PrintOptions& opts) {
  std::string s;
  if (f.regions) s += print_region_headers(*f.regions);
  s += print_store(f.program.store, opts, &f.hints);
  return s + "main = " + print_expr(*f.program.main, opts) + "\n";
}

std::string print_region_values(const RegionContext& r, const Store& s, const PrintOptions& opts) {
  std::ostringstream out;
  for (const auto& [n, xs] : r.regions()) {
    out << n << ":";
    for (const auto& x : xs) {
      const auto* v = s.find(x);
      out << " " << (v ? (v->is_closure() ? "<" + x + ">" : print_value(*v, opts)) : "?" + x);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace glreg
