#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "grail/semiring.hpp"
#include "grail/sexpr.hpp"

namespace grail {

// ---------------------------------------------------------------- terms ----

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  bool var = false;
  std::string name;           // variable name or function symbol
  std::vector<TermPtr> args;  // empty for variables
};

inline TermPtr t_var(std::string x) {
  auto t = std::make_shared<Term>();
  t->var = true;
  t->name = std::move(x);
  return t;
}
inline TermPtr t_app(std::string f, std::vector<TermPtr> args = {}) {
  auto t = std::make_shared<Term>();
  t->name = std::move(f);
  t->args = std::move(args);
  return t;
}

inline bool term_eq(const TermPtr& a, const TermPtr& b) {
  if (a->var != b->var || a->name != b->name || a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!term_eq(a->args[i], b->args[i])) return false;
  return true;
}

inline std::string print_term(const TermPtr& t) {
  if (t->var) return t->name;
  std::string out = "(" + t->name;
  for (const auto& a : t->args) out += " " + print_term(a);
  return out + ")";
}

inline void free_vars_term(const TermPtr& t, std::set<std::string>& out) {
  if (t->var) {
    out.insert(t->name);
    return;
  }
  for (const auto& a : t->args) free_vars_term(a, out);
}

inline int term_depth(const TermPtr& t) {
  int d = 1;
  for (const auto& a : t->args) d = std::max(d, 1 + term_depth(a));
  return d;
}

inline TermPtr subst_term(const TermPtr& t, const std::string& x, const TermPtr& s) {
  if (t->var) return t->name == x ? s : t;
  std::vector<TermPtr> args;
  args.reserve(t->args.size());
  for (const auto& a : t->args) args.push_back(subst_term(a, x, s));
  return t_app(t->name, std::move(args));
}

// ------------------------------------------------------------- formulas ----

enum class FKind { One, Top, Zero, Bot, Tensor, With, Plus, Lolli, Bang, Eq, Pred, Forall, Exists };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FKind kind = FKind::One;
  FormulaPtr l, r;            // binary connectives; quantifier body in l
  Grade grade;                // Bang
  std::string sort;           // Eq sort / quantifier variable sort
  TermPtr t, u;               // Eq sides
  std::string sym;            // predicate symbol / quantifier variable
  std::vector<TermPtr> args;  // predicate arguments
};

inline FormulaPtr f_nullary(FKind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}
inline FormulaPtr f_one() { return f_nullary(FKind::One); }
inline FormulaPtr f_top() { return f_nullary(FKind::Top); }
inline FormulaPtr f_zero() { return f_nullary(FKind::Zero); }
inline FormulaPtr f_bot() { return f_nullary(FKind::Bot); }
inline FormulaPtr f_bin(FKind k, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->l = std::move(a);
  f->r = std::move(b);
  return f;
}
inline FormulaPtr f_tensor(FormulaPtr a, FormulaPtr b) { return f_bin(FKind::Tensor, a, b); }
inline FormulaPtr f_with(FormulaPtr a, FormulaPtr b) { return f_bin(FKind::With, a, b); }
inline FormulaPtr f_plus(FormulaPtr a, FormulaPtr b) { return f_bin(FKind::Plus, a, b); }
inline FormulaPtr f_lolli(FormulaPtr a, FormulaPtr b) { return f_bin(FKind::Lolli, a, b); }
inline FormulaPtr f_bang(Grade g, FormulaPtr a) {
  auto f = std::make_shared<Formula>();
  f->kind = FKind::Bang;
  f->grade = g;
  f->l = std::move(a);
  return f;
}
inline FormulaPtr f_eq(std::string sort, TermPtr t, TermPtr u) {
  auto f = std::make_shared<Formula>();
  f->kind = FKind::Eq;
  f->sort = std::move(sort);
  f->t = std::move(t);
  f->u = std::move(u);
  return f;
}
inline FormulaPtr f_pred(std::string p, std::vector<TermPtr> args) {
  auto f = std::make_shared<Formula>();
  f->kind = FKind::Pred;
  f->sym = std::move(p);
  f->args = std::move(args);
  return f;
}
inline FormulaPtr f_quant(FKind k, std::string x, std::string sort, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->sym = std::move(x);
  f->sort = std::move(sort);
  f->l = std::move(body);
  return f;
}
inline FormulaPtr f_forall(std::string x, std::string s, FormulaPtr b) {
  return f_quant(FKind::Forall, std::move(x), std::move(s), std::move(b));
}
inline FormulaPtr f_exists(std::string x, std::string s, FormulaPtr b) {
  return f_quant(FKind::Exists, std::move(x), std::move(s), std::move(b));
}

inline bool is_quant(FKind k) { return k == FKind::Forall || k == FKind::Exists; }
inline bool is_bin(FKind k) {
  return k == FKind::Tensor || k == FKind::With || k == FKind::Plus || k == FKind::Lolli;
}

inline void free_vars_formula(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case FKind::One:
    case FKind::Top:
    case FKind::Zero:
    case FKind::Bot: return;
    case FKind::Tensor:
    case FKind::With:
    case FKind::Plus:
    case FKind::Lolli:
      free_vars_formula(f->l, out);
      free_vars_formula(f->r, out);
      return;
    case FKind::Bang: free_vars_formula(f->l, out); return;
    case FKind::Eq:
      free_vars_term(f->t, out);
      free_vars_term(f->u, out);
      return;
    case FKind::Pred:
      for (const auto& a : f->args) free_vars_term(a, out);
      return;
    case FKind::Forall:
    case FKind::Exists: {
      std::set<std::string> inner;
      free_vars_formula(f->l, inner);
      inner.erase(f->sym);
      out.insert(inner.begin(), inner.end());
      return;
    }
  }
}

inline std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> s;
  free_vars_formula(f, s);
  return s;
}

inline std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

// Capture-avoiding substitution of s for the free variable x.
inline FormulaPtr subst_formula(const FormulaPtr& f, const std::string& x, const TermPtr& s) {
  switch (f->kind) {
    case FKind::One:
    case FKind::Top:
    case FKind::Zero:
    case FKind::Bot: return f;
    case FKind::Tensor:
    case FKind::With:
    case FKind::Plus:
    case FKind::Lolli:
      return f_bin(f->kind, subst_formula(f->l, x, s), subst_formula(f->r, x, s));
    case FKind::Bang: return f_bang(f->grade, subst_formula(f->l, x, s));
    case FKind::Eq: return f_eq(f->sort, subst_term(f->t, x, s), subst_term(f->u, x, s));
    case FKind::Pred: {
      std::vector<TermPtr> args;
      args.reserve(f->args.size());
      for (const auto& a : f->args) args.push_back(subst_term(a, x, s));
      return f_pred(f->sym, std::move(args));
    }
    case FKind::Forall:
    case FKind::Exists: {
      if (f->sym == x) return f;
      std::set<std::string> fv_s;
      free_vars_term(s, fv_s);
      if (fv_s.count(f->sym)) {
        std::set<std::string> avoid = fv_s;
        free_vars_formula(f->l, avoid);
        avoid.insert(x);
        std::string y = fresh_name(f->sym, avoid);
        FormulaPtr renamed = subst_formula(f->l, f->sym, t_var(y));
        return f_quant(f->kind, y, f->sort, subst_formula(renamed, x, s));
      }
      return f_quant(f->kind, f->sym, f->sort, subst_formula(f->l, x, s));
    }
  }
  return f;
}

// Alpha-equivalence. Bound variables are matched positionally through the
// rename maps; everything else is syntactic.
inline bool alpha_eq_rec(const FormulaPtr& a, const FormulaPtr& b,
                         std::map<std::string, std::string>& ab,
                         std::map<std::string, std::string>& ba) {
  if (a->kind != b->kind) return false;
  auto var_match = [&](const std::string& x, const std::string& y) {
    auto i = ab.find(x);
    auto j = ba.find(y);
    if (i == ab.end() && j == ba.end()) return x == y;
    return i != ab.end() && j != ba.end() && i->second == y && j->second == x;
  };
  std::function<bool(const TermPtr&, const TermPtr&)> term_match =
      [&](const TermPtr& t, const TermPtr& u) -> bool {
    if (t->var != u->var) return false;
    if (t->var) return var_match(t->name, u->name);
    if (t->name != u->name || t->args.size() != u->args.size()) return false;
    for (std::size_t i = 0; i < t->args.size(); ++i)
      if (!term_match(t->args[i], u->args[i])) return false;
    return true;
  };
  switch (a->kind) {
    case FKind::One:
    case FKind::Top:
    case FKind::Zero:
    case FKind::Bot: return true;
    case FKind::Tensor:
    case FKind::With:
    case FKind::Plus:
    case FKind::Lolli:
      return alpha_eq_rec(a->l, b->l, ab, ba) && alpha_eq_rec(a->r, b->r, ab, ba);
    case FKind::Bang: return a->grade == b->grade && alpha_eq_rec(a->l, b->l, ab, ba);
    case FKind::Eq:
      return a->sort == b->sort && term_match(a->t, b->t) && term_match(a->u, b->u);
    case FKind::Pred: {
      if (a->sym != b->sym || a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!term_match(a->args[i], b->args[i])) return false;
      return true;
    }
    case FKind::Forall:
    case FKind::Exists: {
      if (a->sort != b->sort) return false;
      auto save_ab = ab.find(a->sym) != ab.end() ? std::optional(ab[a->sym]) : std::nullopt;
      auto save_ba = ba.find(b->sym) != ba.end() ? std::optional(ba[b->sym]) : std::nullopt;
      ab[a->sym] = b->sym;
      ba[b->sym] = a->sym;
      bool ok = alpha_eq_rec(a->l, b->l, ab, ba);
      if (save_ab)
        ab[a->sym] = *save_ab;
      else
        ab.erase(a->sym);
      if (save_ba)
        ba[b->sym] = *save_ba;
      else
        ba.erase(b->sym);
      return ok;
    }
  }
  return false;
}

inline bool alpha_eq(const FormulaPtr& a, const FormulaPtr& b) {
  std::map<std::string, std::string> ab, ba;
  return alpha_eq_rec(a, b, ab, ba);
}

inline std::string print_formula(const FormulaPtr& f) {
  switch (f->kind) {
    case FKind::One: return "one";
    case FKind::Top: return "top";
    case FKind::Zero: return "zero";
    case FKind::Bot: return "bot";
    case FKind::Tensor: return "(tensor " + print_formula(f->l) + " " + print_formula(f->r) + ")";
    case FKind::With: return "(with " + print_formula(f->l) + " " + print_formula(f->r) + ")";
    case FKind::Plus: return "(plus " + print_formula(f->l) + " " + print_formula(f->r) + ")";
    case FKind::Lolli: return "(lolli " + print_formula(f->l) + " " + print_formula(f->r) + ")";
    case FKind::Bang: return "(bang " + f->grade.str() + " " + print_formula(f->l) + ")";
    case FKind::Eq:
      return "(eq " + f->sort + " " + print_term(f->t) + " " + print_term(f->u) + ")";
    case FKind::Pred: {
      std::string out = "(" + f->sym;
      for (const auto& a : f->args) out += " " + print_term(a);
      return out + ")";
    }
    case FKind::Forall:
    case FKind::Exists:
      return std::string("(") + (f->kind == FKind::Forall ? "forall" : "exists") + " (" + f->sym +
             " " + f->sort + ") " + print_formula(f->l) + ")";
  }
  return "?";
}

// ------------------------------------------------------------ signature ----

struct FnSym {
  std::string name;
  std::vector<std::string> arg_sorts;
  std::vector<Grade> arg_grades;
  std::string result;
};

struct PredSym {
  std::string name;
  std::vector<std::string> arg_sorts;
  std::vector<Grade> arg_grades;
};

struct Signature {
  std::vector<std::string> sorts;
  std::map<std::string, FnSym> fns;
  std::map<std::string, PredSym> preds;

  bool has_sort(const std::string& s) const {
    return std::find(sorts.begin(), sorts.end(), s) != sorts.end();
  }
  const FnSym* fn(const std::string& n) const {
    auto it = fns.find(n);
    return it == fns.end() ? nullptr : &it->second;
  }
  const PredSym* pred(const std::string& n) const {
    auto it = preds.find(n);
    return it == preds.end() ? nullptr : &it->second;
  }
};

using Context = std::vector<std::pair<std::string, std::string>>;  // (var, sort)

inline std::optional<std::string> ctx_sort(const Context& ctx, const std::string& x) {
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
    if (it->first == x) return it->second;
  return std::nullopt;
}

struct Sequent {
  Context ctx;
  std::vector<FormulaPtr> hyps;
  FormulaPtr concl;
};

inline std::string print_context(const Context& ctx) {
  std::string out = "(ctx";
  for (const auto& [x, s] : ctx) out += " (" + x + " " + s + ")";
  return out + ")";
}

inline std::string print_sequent(const Sequent& s) {
  std::string out = "(seq (";
  for (std::size_t i = 0; i < s.hyps.size(); ++i) {
    if (i) out += ' ';
    out += print_formula(s.hyps[i]);
  }
  out += ") " + print_formula(s.concl) + ")";
  return out;
}

// --------------------------------------------------------------- theory ----

enum class Fragment { Core, Multiplicative, Additive, FirstOrder };

inline std::optional<Fragment> fragment_by_name(const std::string& n) {
  if (n == "core") return Fragment::Core;
  if (n == "multiplicative") return Fragment::Multiplicative;
  if (n == "additive") return Fragment::Additive;
  if (n == "first-order") return Fragment::FirstOrder;
  return std::nullopt;
}
inline std::string fragment_name(Fragment f) {
  switch (f) {
    case Fragment::Core: return "core";
    case Fragment::Multiplicative: return "multiplicative";
    case Fragment::Additive: return "additive";
    case Fragment::FirstOrder: return "first-order";
  }
  return "?";
}

struct Axiom {
  std::string name;
  Sequent seq;
};

struct Theory {
  std::string name;
  Semiring semiring;
  Fragment fragment = Fragment::Core;
  bool classical = false;
  Signature sig;
  std::vector<Axiom> axioms;

  const Axiom* axiom(const std::string& n) const {
    for (const auto& a : axioms)
      if (a.name == n) return &a;
    return nullptr;
  }
};

// ------------------------------------------------------------------- gr ----

// Sensitivity grade of a variable in a term: variables grade 1 on themselves,
// applications weight each argument's grade by the symbol's slot grade.
inline Grade gr_term(const Theory& th, const TermPtr& t, const std::string& x) {
  const Semiring& R = th.semiring;
  if (t->var) return t->name == x ? R.one() : R.zero();
  const FnSym* f = th.sig.fn(t->name);
  if (!f) throw GrailError("gr: unknown function symbol " + t->name);
  if (f->arg_grades.size() != t->args.size())
    throw GrailError("gr: arity mismatch at " + t->name);
  Grade acc = R.zero();
  for (std::size_t i = 0; i < t->args.size(); ++i)
    acc = R.add(acc, R.mul(f->arg_grades[i], gr_term(th, t->args[i], x)));
  return acc;
}

inline Grade gr_formula(const Theory& th, const FormulaPtr& f, const std::string& x) {
  const Semiring& R = th.semiring;
  switch (f->kind) {
    case FKind::One:
    case FKind::Top:
    case FKind::Zero:
    case FKind::Bot: return R.zero();
    case FKind::Tensor:
    case FKind::Lolli:
      return R.add(gr_formula(th, f->l, x), gr_formula(th, f->r, x));
    case FKind::With:
    case FKind::Plus: {
      auto j = R.join(gr_formula(th, f->l, x), gr_formula(th, f->r, x));
      if (!j)
        throw GrailError("gr: semiring " + R.name() +
                         " lacks binary joins required to grade additive connectives");
      return *j;
    }
    case FKind::Bang: return R.mul(f->grade, gr_formula(th, f->l, x));
    case FKind::Eq: return R.add(gr_term(th, f->t, x), gr_term(th, f->u, x));
    case FKind::Pred: {
      const PredSym* p = th.sig.pred(f->sym);
      if (!p) throw GrailError("gr: unknown predicate " + f->sym);
      Grade acc = R.zero();
      for (std::size_t i = 0; i < f->args.size(); ++i)
        acc = R.add(acc, R.mul(p->arg_grades[i], gr_term(th, f->args[i], x)));
      return acc;
    }
    case FKind::Forall:
    case FKind::Exists:
      if (f->sym == x) return R.zero();
      return gr_formula(th, f->l, x);
  }
  return R.zero();
}

// ------------------------------------------------------- well-sortedness ----

inline void wf_term(const Theory& th, const Context& ctx, const TermPtr& t,
                    const std::string& want_sort, std::vector<std::string>& issues) {
  if (t->var) {
    auto s = ctx_sort(ctx, t->name);
    if (!s)
      issues.push_back("unbound variable " + t->name);
    else if (*s != want_sort)
      issues.push_back("variable " + t->name + " has sort " + *s + ", expected " + want_sort);
    return;
  }
  const FnSym* f = th.sig.fn(t->name);
  if (!f) {
    issues.push_back("unknown function symbol " + t->name);
    return;
  }
  if (f->result != want_sort)
    issues.push_back("term " + print_term(t) + " has sort " + f->result + ", expected " +
                     want_sort);
  if (f->arg_sorts.size() != t->args.size()) {
    issues.push_back("arity mismatch at " + t->name);
    return;
  }
  for (std::size_t i = 0; i < t->args.size(); ++i)
    wf_term(th, ctx, t->args[i], f->arg_sorts[i], issues);
}

inline std::optional<std::string> sort_of_term(const Theory& th, const Context& ctx,
                                               const TermPtr& t) {
  if (t->var) return ctx_sort(ctx, t->name);
  const FnSym* f = th.sig.fn(t->name);
  if (!f) return std::nullopt;
  return f->result;
}

inline bool fragment_allows(Fragment frag, FKind k) {
  switch (k) {
    case FKind::One:
    case FKind::Tensor:
    case FKind::Bang:
    case FKind::Eq:
    case FKind::Pred: return true;
    case FKind::Lolli:
    case FKind::Bot: return frag != Fragment::Core;
    case FKind::With:
    case FKind::Plus:
    case FKind::Top:
    case FKind::Zero:
      return frag == Fragment::Additive || frag == Fragment::FirstOrder;
    case FKind::Forall:
    case FKind::Exists: return frag == Fragment::FirstOrder;
  }
  return false;
}

inline void wf_formula(const Theory& th, const Context& ctx, const FormulaPtr& f,
                       std::vector<std::string>& issues) {
  if (!fragment_allows(th.fragment, f->kind))
    issues.push_back("connective not available in fragment " + fragment_name(th.fragment) +
                     ": " + print_formula(f));
  switch (f->kind) {
    case FKind::One:
    case FKind::Top:
    case FKind::Zero:
    case FKind::Bot: return;
    case FKind::Tensor:
    case FKind::With:
    case FKind::Plus:
    case FKind::Lolli:
      wf_formula(th, ctx, f->l, issues);
      wf_formula(th, ctx, f->r, issues);
      return;
    case FKind::Bang:
      if (!th.semiring.contains(f->grade))
        issues.push_back("grade " + f->grade.str() + " not in semiring " + th.semiring.name());
      wf_formula(th, ctx, f->l, issues);
      return;
    case FKind::Eq:
      if (!th.sig.has_sort(f->sort)) issues.push_back("unknown sort " + f->sort);
      wf_term(th, ctx, f->t, f->sort, issues);
      wf_term(th, ctx, f->u, f->sort, issues);
      return;
    case FKind::Pred: {
      const PredSym* p = th.sig.pred(f->sym);
      if (!p) {
        issues.push_back("unknown predicate " + f->sym);
        return;
      }
      if (p->arg_sorts.size() != f->args.size()) {
        issues.push_back("arity mismatch at predicate " + f->sym);
        return;
      }
      for (std::size_t i = 0; i < f->args.size(); ++i)
        wf_term(th, ctx, f->args[i], p->arg_sorts[i], issues);
      return;
    }
    case FKind::Forall:
    case FKind::Exists: {
      if (!th.sig.has_sort(f->sort)) issues.push_back("unknown sort " + f->sort);
      Context ext = ctx;
      ext.emplace_back(f->sym, f->sort);
      wf_formula(th, ext, f->l, issues);
      return;
    }
  }
}

inline std::vector<std::string> wf_sequent(const Theory& th, const Sequent& s) {
  std::vector<std::string> issues;
  std::set<std::string> seen;
  for (const auto& [x, sort] : s.ctx) {
    if (!seen.insert(x).second) issues.push_back("duplicate context variable " + x);
    if (!th.sig.has_sort(sort)) issues.push_back("unknown sort " + sort + " for " + x);
  }
  for (const auto& h : s.hyps) wf_formula(th, s.ctx, h, issues);
  wf_formula(th, s.ctx, s.concl, issues);
  return issues;
}

// -------------------------------------------------------------- parsing ----

inline const std::set<std::string>& reserved_formula_heads() {
  static const std::set<std::string> r = {"one",  "top",    "zero",   "bot",  "tensor",
                                          "with", "plus",   "lolli",  "bang", "eq",
                                          "forall", "exists", "seq",  "ctx"};
  return r;
}

inline TermPtr parse_term(const Sexp& e) {
  if (e.is_atom) return t_var(e.atom_text());
  if (e.items.empty() || !e.items[0].is_atom)
    throw GrailError("term: expected (fn args...)" + e.where());
  std::vector<TermPtr> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(parse_term(e.items[i]));
  return t_app(e.items[0].text, std::move(args));
}

inline FormulaPtr parse_formula(const Sexp& e) {
  if (e.is_atom) {
    const std::string& a = e.atom_text();
    if (a == "one") return f_one();
    if (a == "top") return f_top();
    if (a == "zero") return f_zero();
    if (a == "bot") return f_bot();
    throw GrailError("formula: unknown atom " + a + e.where());
  }
  const std::string& h = e.head();
  auto need = [&](std::size_t n) {
    if (e.size() != n) throw GrailError("formula: " + h + " expects " + std::to_string(n - 1) +
                                        " arguments" + e.where());
  };
  if (h == "tensor") {
    need(3);
    return f_tensor(parse_formula(e.at(1)), parse_formula(e.at(2)));
  }
  if (h == "with") {
    need(3);
    return f_with(parse_formula(e.at(1)), parse_formula(e.at(2)));
  }
  if (h == "plus") {
    need(3);
    return f_plus(parse_formula(e.at(1)), parse_formula(e.at(2)));
  }
  if (h == "lolli") {
    need(3);
    return f_lolli(parse_formula(e.at(1)), parse_formula(e.at(2)));
  }
  if (h == "bang") {
    need(3);
    auto g = parse_grade(e.at(1).atom_text());
    if (!g) throw GrailError("formula: bad grade " + e.at(1).atom_text() + e.where());
    return f_bang(*g, parse_formula(e.at(2)));
  }
  if (h == "eq") {
    need(4);
    return f_eq(e.at(1).atom_text(), parse_term(e.at(2)), parse_term(e.at(3)));
  }
  if (h == "forall" || h == "exists") {
    need(3);
    const Sexp& b = e.at(1);
    if (b.is_atom || b.size() != 2)
      throw GrailError("formula: quantifier binder must be (var sort)" + e.where());
    return f_quant(h == "forall" ? FKind::Forall : FKind::Exists, b.at(0).atom_text(),
                   b.at(1).atom_text(), parse_formula(e.at(2)));
  }
  if (reserved_formula_heads().count(h))
    throw GrailError("formula: misplaced " + h + e.where());
  // predicate application
  std::vector<TermPtr> args;
  for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(parse_term(e.items[i]));
  return f_pred(h, std::move(args));
}

inline Context parse_context(const Sexp& e) {
  if (!e.headed("ctx")) throw GrailError("expected (ctx ...)" + e.where());
  Context ctx;
  for (std::size_t i = 1; i < e.size(); ++i) {
    const Sexp& b = e.at(i);
    if (b.is_atom || b.size() != 2)
      throw GrailError("context binding must be (var sort)" + b.where());
    ctx.emplace_back(b.at(0).atom_text(), b.at(1).atom_text());
  }
  return ctx;
}

inline Sequent parse_sequent(const Sexp& e, Context ctx) {
  if (!e.headed("seq") || e.size() != 3)
    throw GrailError("expected (seq (hyps...) conclusion)" + e.where());
  Sequent s;
  s.ctx = std::move(ctx);
  const Sexp& hs = e.at(1);
  if (hs.is_atom) throw GrailError("sequent hypotheses must be a list" + e.where());
  for (const auto& h : hs.items) s.hyps.push_back(parse_formula(h));
  s.concl = parse_formula(e.at(2));
  return s;
}

// Parses a theory file; structural errors throw, semantic "well-formedness"
// problems land in `issues`.
inline Theory parse_theory(const Sexp& e, std::vector<std::string>& issues) {
  if (!e.headed("theory") || e.size() < 2)
    throw GrailError("expected (theory NAME clauses...)" + e.where());
  Theory th;
  th.name = e.at(1).atom_text();
  bool have_semiring = false;
  std::vector<const Sexp*> axiom_clauses;
  for (std::size_t i = 2; i < e.size(); ++i) {
    const Sexp& c = e.at(i);
    const std::string& h = c.head();
    if (h == "semiring") {
      auto R = Semiring::by_name(c.at(1).atom_text());
      if (!R) throw GrailError("unknown semiring " + c.at(1).atom_text() + c.where());
      th.semiring = *R;
      have_semiring = true;
    } else if (h == "fragment") {
      auto fr = fragment_by_name(c.at(1).atom_text());
      if (!fr) throw GrailError("unknown fragment " + c.at(1).atom_text() + c.where());
      th.fragment = *fr;
    } else if (h == "classical") {
      th.classical = true;
    } else if (h == "sort") {
      const std::string& s = c.at(1).atom_text();
      if (th.sig.has_sort(s))
        issues.push_back("duplicate sort " + s);
      else
        th.sig.sorts.push_back(s);
    } else if (h == "fn" || h == "pred") {
      const std::string& n = c.at(1).atom_text();
      std::vector<std::string> arg_sorts;
      std::vector<Grade> arg_grades;
      const Sexp& slots = c.at(2);
      if (slots.is_atom) throw GrailError("expected slot list" + c.where());
      for (const auto& sl : slots.items) {
        if (sl.is_atom || sl.size() != 2)
          throw GrailError("slot must be (grade sort)" + sl.where());
        auto g = parse_grade(sl.at(0).atom_text());
        if (!g) throw GrailError("bad grade " + sl.at(0).atom_text() + sl.where());
        arg_grades.push_back(*g);
        arg_sorts.push_back(sl.at(1).atom_text());
      }
      if (h == "fn") {
        FnSym f{n, arg_sorts, arg_grades, c.at(3).atom_text()};
        if (th.sig.fns.count(n)) issues.push_back("duplicate function symbol " + n);
        th.sig.fns[n] = f;
      } else {
        if (reserved_formula_heads().count(n))
          issues.push_back("predicate name " + n + " is reserved");
        PredSym p{n, arg_sorts, arg_grades};
        if (th.sig.preds.count(n)) issues.push_back("duplicate predicate " + n);
        th.sig.preds[n] = p;
      }
    } else if (h == "axiom") {
      axiom_clauses.push_back(&c);  // parsed after the signature is complete
    } else {
      throw GrailError("unknown theory clause " + h + c.where());
    }
  }
  if (!have_semiring) issues.push_back("theory lacks a semiring declaration");
  for (const Sexp* cp : axiom_clauses) {
    const Sexp& c = *cp;
    if (c.size() != 4) throw GrailError("axiom expects (axiom NAME (ctx...) (seq...))" + c.where());
    Axiom ax;
    ax.name = c.at(1).atom_text();
    ax.seq = parse_sequent(c.at(3), parse_context(c.at(2)));
    if (th.axiom(ax.name)) issues.push_back("duplicate axiom " + ax.name);
    th.axioms.push_back(std::move(ax));
  }
  // semantic validation
  for (const auto& [n, f] : th.sig.fns) {
    if (!th.sig.has_sort(f.result)) issues.push_back("fn " + n + ": unknown result sort");
    for (const auto& s : f.arg_sorts)
      if (!th.sig.has_sort(s)) issues.push_back("fn " + n + ": unknown argument sort " + s);
    for (const auto& g : f.arg_grades)
      if (!th.semiring.contains(g))
        issues.push_back("fn " + n + ": slot grade " + g.str() + " not in semiring " +
                         th.semiring.name());
  }
  for (const auto& [n, p] : th.sig.preds) {
    for (const auto& s : p.arg_sorts)
      if (!th.sig.has_sort(s)) issues.push_back("pred " + n + ": unknown argument sort " + s);
    for (const auto& g : p.arg_grades)
      if (!th.semiring.contains(g))
        issues.push_back("pred " + n + ": slot grade " + g.str() + " not in semiring " +
                         th.semiring.name());
  }
  if ((th.fragment == Fragment::Additive || th.fragment == Fragment::FirstOrder) &&
      !th.semiring.has_join())
    issues.push_back("fragment " + fragment_name(th.fragment) + " needs binary joins, semiring " +
                     th.semiring.name() + " has none");
  if (th.classical && th.fragment == Fragment::Core)
    issues.push_back("classical theories need at least the multiplicative fragment");
  for (const auto& ax : th.axioms)
    for (const auto& w : wf_sequent(th, ax.seq))
      issues.push_back("axiom " + ax.name + ": " + w);
  return th;
}

inline Theory parse_theory_text(const std::string& text, std::vector<std::string>& issues) {
  return parse_theory(parse_single_sexp(text), issues);
}

inline std::string print_theory(const Theory& th) {
  std::string out = "(theory " + th.name + "\n  (semiring " + th.semiring.name() + ")\n";
  out += "  (fragment " + fragment_name(th.fragment) + ")\n";
  if (th.classical) out += "  (classical)\n";
  for (const auto& s : th.sig.sorts) out += "  (sort " + s + ")\n";
  for (const auto& [n, f] : th.sig.fns) {
    out += "  (fn " + n + " (";
    for (std::size_t i = 0; i < f.arg_sorts.size(); ++i) {
      if (i) out += ' ';
      out += "(" + f.arg_grades[i].str() + " " + f.arg_sorts[i] + ")";
    }
    out += ") " + f.result + ")\n";
  }
  for (const auto& [n, p] : th.sig.preds) {
    out += "  (pred " + n + " (";
    for (std::size_t i = 0; i < p.arg_sorts.size(); ++i) {
      if (i) out += ' ';
      out += "(" + p.arg_grades[i].str() + " " + p.arg_sorts[i] + ")";
    }
    out += "))\n";
  }
  for (const auto& ax : th.axioms)
    out += "  (axiom " + ax.name + " " + print_context(ax.seq.ctx) + " " +
           print_sequent(ax.seq) + ")\n";
  return out + ")\n";
}

}  // namespace grail
