#include "glreg/frontend.hpp"
#include "glreg/imperative.hpp"

namespace glreg {

namespace {

enum Level { kSeq, kOpen, kApp, kAtom };

struct ImpPrinter {
  ImpPrintOptions opts;

  std::string lam() const { return opts.unicode ? "λ" : "fn "; }
  std::string lt() const { return opts.unicode ? "⟨" : "<"; }
  std::string gt() const { return opts.unicode ? "⟩" : ">"; }
  std::string arrow() const { return opts.unicode ? " → " : " -> "; }
  std::string equiv() const { return opts.unicode ? " ≡ " : " = "; }

  std::string pattern(const Pattern& p) const {
    if (p.is_var) return p.name;
    if (pattern_vars(p).empty()) return lt() + gt();  // fully erased binders collapse
    std::string s = lt();
    for (std::size_t i = 0; i < p.elems.size(); ++i) s += (i ? ", " : "") + pattern(p.elems[i]);
    return s + gt();
  }

  static bool binary(const std::string& op) {
    return op == "+" || op == "-" || op == "==" || op == "<" || op == "and" || op == "or";
  }

  static Level level(const ImpExpr& e) {
    switch (e.kind) {
      case ImpExpr::Kind::Seq: return kSeq;
      case ImpExpr::Kind::Lam:
      case ImpExpr::Kind::If:
      case ImpExpr::Kind::Let:
      case ImpExpr::Kind::Assign: return kOpen;
      case ImpExpr::Kind::App: return kApp;
      case ImpExpr::Kind::Op:
        if (e.literal || binary(e.op) || e.op == "index" || e.op == "update") return kAtom;
        return kApp;
      default: return kAtom;
    }
  }

  std::string at(const ImpPtr& e, Level l) const {
    std::string s = print(*e);
    return level(*e) < l ? "(" + s + ")" : s;
  }

  std::string op(const ImpExpr& e) const {
    if (e.literal) return to_string(*e.literal);
    if (binary(e.op)) return "(" + at(e.kids[0], kApp) + " " + e.op + " " + at(e.kids[1], kApp) + ")";
    if (e.op == "index") return at(e.kids[0], kAtom) + "[" + at(e.kids[1], kSeq) + "]";
    if (e.op == "update") {
      return at(e.kids[0], kAtom) + "[" + at(e.kids[1], kSeq) + arrow() + at(e.kids[2], kOpen) + "]";
    }
    std::string head = is_unary_shift(e.op) ? "(" + e.op + ")" : e.op;
    std::string s = head;
    for (const auto& k : e.kids) s += " " + at(k, kAtom);
    return s;
  }

  std::string print(const ImpExpr& e) const {
    switch (e.kind) {
      case ImpExpr::Kind::Var: return e.name;
      case ImpExpr::Kind::Op: return op(e);
      case ImpExpr::Kind::Tuple: {
        std::string s = lt();
        for (std::size_t i = 0; i < e.kids.size(); ++i) s += (i ? ", " : "") + at(e.kids[i], kOpen);
        return s + gt();
      }
      case ImpExpr::Kind::App: return e.name + " " + at(e.kids[0], kAtom);
      case ImpExpr::Kind::If:
        return "if " + at(e.kids[0], kOpen) + " then " + at(e.kids[1], kOpen) + " else " + at(e.kids[2], kSeq);
      case ImpExpr::Kind::Let:
        return "let " + pattern(e.pat) + equiv() + at(e.kids[0], kOpen) + " in " + at(e.kids[1], kSeq);
      case ImpExpr::Kind::Lam: return lam() + pattern(e.pat) + ". " + at(e.kids[0], kSeq);
      case ImpExpr::Kind::Assign: {
        const ImpExpr& rhs = *e.kids[0];
        if (rhs.kind == ImpExpr::Kind::Op && rhs.op == "update" && rhs.kids[0]->kind == ImpExpr::Kind::Var &&
            rhs.kids[0]->name == e.name) {
          return e.name + "[" + at(rhs.kids[1], kSeq) + "] := " + at(rhs.kids[2], kOpen);
        }
        return e.name + " := " + at(e.kids[0], kApp);
      }
      case ImpExpr::Kind::Seq: {
        const ImpPtr& first = e.kids[0];
        Level l = first->kind == ImpExpr::Kind::Assign ? kOpen : kApp;
        return at(first, l) + "; " + at(e.kids[1], kSeq);
      }
    }
    return "?";
  }
};

}  // namespace

std::string print_imperative(const ImpPtr& e, const ImpPrintOptions& opts) { return ImpPrinter{opts}.print(*e); }

std::string print_imperative(const ImpProgram& p, const ImpPrintOptions& opts) {
  std::string s;
  for (std::size_t i = 0; i < p.store.size(); ++i) {
    const auto& b = p.store[i];
    bool closure = b.value->kind == ImpExpr::Kind::Lam;
    if (i) s += closure ? ",\n" : ", ";
    s += b.name + " = " + print_imperative(b.value, opts);
  }
  return s + "\n" + print_imperative(p.main, opts) + "\n";
}

}  // namespace glreg
