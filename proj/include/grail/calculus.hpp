#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "grail/syntax.hpp"

namespace grail {

// ---------------------------------------------------------- derivations ----

struct RuleParams {
  std::optional<std::pair<std::string, std::string>> var;  // (var x SORT)
  std::optional<FormulaPtr> phi;                           // (phi F)
  std::optional<FormulaPtr> psi;                           // (psi F)
  std::optional<TermPtr> t, u;                             // (t T) (u T)
  std::optional<TermPtr> term;                             // (term T)
  std::optional<Grade> grade;                              // (grade G)
  std::optional<std::pair<Grade, Grade>> grades;           // (grades R S)
  std::optional<std::string> axiom_name;                   // (name A)
  std::vector<std::pair<std::string, TermPtr>> binds;      // (bind x T)*
};

struct DerivNode {
  std::string rule;
  RuleParams params;
  std::vector<DerivNode> premises;
  Sequent concl;  // ctx is assigned by the checker, not stored in files
};

struct Derivation {
  std::string name;
  std::string theory_name;
  Context ctx;
  DerivNode root;
};

struct RuleViolation {
  std::string path;
  std::string rule;
  std::string expected;
  std::string found;
};

// ------------------------------------------------- multiset of formulas ----

using Hyps = std::vector<FormulaPtr>;

inline bool ms_remove(Hyps& v, const FormulaPtr& f) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (alpha_eq(v[i], f)) {
      v.erase(v.begin() + i);
      return true;
    }
  return false;
}

inline bool ms_equal(Hyps a, const Hyps& b) {
  if (a.size() != b.size()) return false;
  for (const auto& f : b)
    if (!ms_remove(a, f)) return false;
  return true;
}

inline Hyps ms_concat(Hyps a, const Hyps& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline std::optional<Hyps> ms_minus(const Hyps& a, const FormulaPtr& f) {
  Hyps out = a;
  if (!ms_remove(out, f)) return std::nullopt;
  return out;
}

inline std::string print_hyps(const Hyps& h) {
  std::string out = "(";
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i) out += ' ';
    out += print_formula(h[i]);
  }
  return out + ")";
}

// -------------------------------------------------------------- parsing ----

inline DerivNode parse_deriv_node(const Sexp& e) {
  if (e.is_atom || e.items.empty() || !e.items[0].is_atom)
    throw GrailError("derivation node must be (rule ...)" + e.where());
  DerivNode n;
  n.rule = e.items[0].text;
  bool have_concl = false;
  for (std::size_t i = 1; i < e.size(); ++i) {
    const Sexp& c = e.at(i);
    const std::string& h = c.head();
    if (h == "premise") {
      if (c.size() != 2) throw GrailError("premise wraps exactly one node" + c.where());
      n.premises.push_back(parse_deriv_node(c.at(1)));
    } else if (h == "conclusion") {
      if (c.size() != 2) throw GrailError("conclusion wraps one sequent" + c.where());
      n.concl = parse_sequent(c.at(1), {});
      have_concl = true;
    } else if (h == "var") {
      n.params.var = {c.at(1).atom_text(), c.at(2).atom_text()};
    } else if (h == "phi") {
      n.params.phi = parse_formula(c.at(1));
    } else if (h == "psi") {
      n.params.psi = parse_formula(c.at(1));
    } else if (h == "t") {
      n.params.t = parse_term(c.at(1));
    } else if (h == "u") {
      n.params.u = parse_term(c.at(1));
    } else if (h == "term") {
      n.params.term = parse_term(c.at(1));
    } else if (h == "grade") {
      auto g = parse_grade(c.at(1).atom_text());
      if (!g) throw GrailError("bad grade" + c.where());
      n.params.grade = *g;
    } else if (h == "grades") {
      auto r = parse_grade(c.at(1).atom_text()), s = parse_grade(c.at(2).atom_text());
      if (!r || !s) throw GrailError("bad grades" + c.where());
      n.params.grades = {{*r, *s}};
    } else if (h == "name") {
      n.params.axiom_name = c.at(1).atom_text();
    } else if (h == "bind") {
      n.params.binds.emplace_back(c.at(1).atom_text(), parse_term(c.at(2)));
    } else {
      throw GrailError("unknown rule parameter " + h + c.where());
    }
  }
  if (!have_concl) throw GrailError("derivation node lacks a conclusion" + e.where());
  return n;
}

inline Derivation parse_derivation(const Sexp& e) {
  if (!e.headed("derivation") || e.size() < 4)
    throw GrailError("expected (derivation NAME (theory T) (ctx...) NODE)" + e.where());
  Derivation d;
  d.name = e.at(1).atom_text();
  std::size_t i = 2;
  if (e.at(i).headed("theory")) {
    d.theory_name = e.at(i).at(1).atom_text();
    ++i;
  }
  if (i < e.size() && e.at(i).headed("ctx")) {
    d.ctx = parse_context(e.at(i));
    ++i;
  }
  if (i + 1 != e.size()) throw GrailError("derivation expects exactly one root node" + e.where());
  d.root = parse_deriv_node(e.at(i));
  return d;
}

inline Derivation parse_derivation_text(const std::string& text) {
  return parse_derivation(parse_single_sexp(text));
}

inline std::string print_deriv_node(const DerivNode& n, int indent) {
  std::string pad(indent, ' ');
  std::string out = pad + "(" + n.rule;
  const RuleParams& p = n.params;
  if (p.var) out += " (var " + p.var->first + " " + p.var->second + ")";
  if (p.phi) out += " (phi " + print_formula(*p.phi) + ")";
  if (p.psi) out += " (psi " + print_formula(*p.psi) + ")";
  if (p.t) out += " (t " + print_term(*p.t) + ")";
  if (p.u) out += " (u " + print_term(*p.u) + ")";
  if (p.term) out += " (term " + print_term(*p.term) + ")";
  if (p.grade) out += " (grade " + p.grade->str() + ")";
  if (p.grades) out += " (grades " + p.grades->first.str() + " " + p.grades->second.str() + ")";
  if (p.axiom_name) out += " (name " + *p.axiom_name + ")";
  for (const auto& [x, t] : p.binds) out += " (bind " + x + " " + print_term(t) + ")";
  for (const auto& pr : n.premises)
    out += "\n" + pad + " (premise\n" + print_deriv_node(pr, indent + 2) + ")";
  out += "\n" + pad + " (conclusion " + print_sequent(n.concl) + "))";
  return out;
}

inline std::string print_derivation(const Derivation& d) {
  std::string out = "(derivation " + d.name + "\n";
  if (!d.theory_name.empty()) out += " (theory " + d.theory_name + ")\n";
  out += " " + print_context(d.ctx) + "\n";
  return out + print_deriv_node(d.root, 1) + ")\n";
}

// -------------------------------------------------------------- checker ----

namespace detail {

struct DerivChecker {
  const Theory& th;
  std::vector<RuleViolation> out;

  void fail(const std::string& path, const std::string& rule, std::string expected,
            std::string found) {
    out.push_back({path, rule, std::move(expected), std::move(found)});
  }

  static bool is_bang(const FormulaPtr& f) { return f->kind == FKind::Bang; }

  // Simultaneous instantiation of an axiom sequent: rename the axiom context
  // away from anything occurring in the binding terms, then substitute.
  std::optional<Sequent> instantiate_axiom(const Axiom& ax,
                                           const std::vector<std::pair<std::string, TermPtr>>& binds,
                                           std::string& err) {
    if (binds.size() != ax.seq.ctx.size()) {
      err = "axiom " + ax.name + " expects " + std::to_string(ax.seq.ctx.size()) + " bindings";
      return std::nullopt;
    }
    std::set<std::string> avoid;
    for (const auto& [x, t] : binds) {
      avoid.insert(x);
      free_vars_term(t, avoid);
    }
    std::map<std::string, TermPtr> sub;
    std::vector<std::pair<std::string, std::string>> renames;  // axiom var -> fresh
    for (const auto& [x, s] : ax.seq.ctx) {
      std::string fx = fresh_name(x + "#", avoid);
      avoid.insert(fx);
      renames.emplace_back(x, fx);
    }
    for (const auto& [x, t] : binds) {
      bool known = false;
      for (const auto& [ax_var, s] : ax.seq.ctx) known |= (ax_var == x);
      if (!known) {
        err = "axiom " + ax.name + " has no variable " + x;
        return std::nullopt;
      }
    }
    auto apply = [&](FormulaPtr f) {
      for (const auto& [x, fx] : renames) f = subst_formula(f, x, t_var(fx));
      for (const auto& [x, t] : binds) {
        std::string fx;
        for (const auto& [ax_var, ren] : renames)
          if (ax_var == x) fx = ren;
        f = subst_formula(f, fx, t);
      }
      return f;
    };
    Sequent s;
    for (const auto& h : ax.seq.hyps) s.hyps.push_back(apply(h));
    s.concl = apply(ax.seq.concl);
    return s;
  }

  void check(const DerivNode& n, const Context& ctx, const std::string& path) {
    Sequent seq = n.concl;
    seq.ctx = ctx;
    for (const auto& w : wf_sequent(th, seq)) fail(path, n.rule, "well-sorted sequent", w);

    const Hyps& H = n.concl.hyps;
    const FormulaPtr& C = n.concl.concl;
    const Semiring& R = th.semiring;

    auto expect_premises = [&](std::size_t k) {
      if (n.premises.size() != k) {
        fail(path, n.rule, std::to_string(k) + " premises",
             std::to_string(n.premises.size()) + " premises");
        return false;
      }
      return true;
    };
    auto recurse_same_ctx = [&]() {
      for (std::size_t i = 0; i < n.premises.size(); ++i)
        check(n.premises[i], ctx, path + "." + std::to_string(i));
    };
    auto hyps_of = [&](std::size_t i) -> const Hyps& { return n.premises[i].concl.hyps; };
    auto concl_of = [&](std::size_t i) -> const FormulaPtr& { return n.premises[i].concl.concl; };

    const std::string& r = n.rule;

    if (r == "ax") {
      expect_premises(0);
      if (H.size() != 1 || !alpha_eq(H[0], C))
        fail(path, r, "hypotheses (phi) and conclusion phi", print_sequent(n.concl));
      return;
    }
    if (r == "one-r") {
      expect_premises(0);
      if (!H.empty() || C->kind != FKind::One)
        fail(path, r, "(seq () one)", print_sequent(n.concl));
      return;
    }
    if (r == "top-r") {
      expect_premises(0);
      if (C->kind != FKind::Top) fail(path, r, "conclusion top", print_formula(C));
      return;
    }
    if (r == "zero-l") {
      expect_premises(0);
      bool has = false;
      for (const auto& h : H) has |= (h->kind == FKind::Zero);
      if (!has) fail(path, r, "hypothesis zero", print_hyps(H));
      return;
    }
    if (r == "refl") {
      expect_premises(0);
      if (!H.empty() || C->kind != FKind::Eq || !term_eq(C->t, C->u))
        fail(path, r, "(seq () (eq s t t))", print_sequent(n.concl));
      return;
    }
    if (r == "dne") {
      expect_premises(0);
      if (!th.classical) fail(path, r, "classical theory", "theory " + th.name + " is not classical");
      bool ok = H.size() == 1 && H[0]->kind == FKind::Lolli && H[0]->r->kind == FKind::Bot &&
                H[0]->l->kind == FKind::Lolli && H[0]->l->r->kind == FKind::Bot &&
                alpha_eq(H[0]->l->l, C);
      if (!ok)
        fail(path, r, "hypothesis ((phi -o bot) -o bot) with conclusion phi",
             print_sequent(n.concl));
      return;
    }
    if (r == "axiom") {
      expect_premises(0);
      if (!n.params.axiom_name) {
        fail(path, r, "(name AXIOM)", "missing");
        return;
      }
      const Axiom* ax = th.axiom(*n.params.axiom_name);
      if (!ax) {
        fail(path, r, "a theory axiom", "unknown axiom " + *n.params.axiom_name);
        return;
      }
      // binding terms must be well-sorted at the axiom context sorts
      for (const auto& [x, t] : n.params.binds) {
        auto want = ctx_sort(ax->seq.ctx, x);
        if (!want) continue;  // reported by instantiate_axiom
        std::vector<std::string> issues;
        wf_term(th, ctx, t, *want, issues);
        for (const auto& w : issues) fail(path, r, "well-sorted binding for " + x, w);
      }
      std::string err;
      auto inst = instantiate_axiom(*ax, n.params.binds, err);
      if (!inst) {
        fail(path, r, "complete bindings", err);
        return;
      }
      if (!ms_equal(H, inst->hyps) || !alpha_eq(C, inst->concl))
        fail(path, r,
             "(seq " + print_hyps(inst->hyps) + " " + print_formula(inst->concl) + ")",
             print_sequent(n.concl));
      return;
    }

    if (r == "one-l") {
      if (!expect_premises(1)) return;
      auto rest = ms_minus(H, f_one());
      if (!rest || !ms_equal(*rest, hyps_of(0)) || !alpha_eq(C, concl_of(0)))
        fail(path, r, "premise = conclusion minus a hypothesis one", print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "tensor-r") {
      if (!expect_premises(2)) return;
      bool ok = C->kind == FKind::Tensor && alpha_eq(concl_of(0), C->l) &&
                alpha_eq(concl_of(1), C->r) && ms_equal(H, ms_concat(hyps_of(0), hyps_of(1)));
      if (!ok)
        fail(path, r, "conclusion (tensor A B) assembled from the premises",
             print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "tensor-l") {
      if (!expect_premises(1)) return;
      bool ok = false;
      for (std::size_t i = 0; i < H.size() && !ok; ++i) {
        if (H[i]->kind != FKind::Tensor) continue;
        Hyps rest = H;
        rest.erase(rest.begin() + i);
        rest.push_back(H[i]->l);
        rest.push_back(H[i]->r);
        ok = ms_equal(rest, hyps_of(0)) && alpha_eq(C, concl_of(0));
      }
      if (!ok) fail(path, r, "premise splitting one tensor hypothesis", print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "cut") {
      if (!expect_premises(2)) return;
      const FormulaPtr& phi = concl_of(0);
      auto rest = ms_minus(hyps_of(1), phi);
      bool ok = rest.has_value() && alpha_eq(C, concl_of(1)) &&
                ms_equal(H, ms_concat(hyps_of(0), *rest));
      if (!ok)
        fail(path, r, "cut formula " + print_formula(phi) + " consumed from premise 2",
             print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "w") {
      if (!expect_premises(1)) return;
      bool ok = false;
      for (std::size_t i = 0; i < H.size() && !ok; ++i) {
        if (!is_bang(H[i]) || !(H[i]->grade == R.zero())) continue;
        Hyps rest = H;
        rest.erase(rest.begin() + i);
        ok = ms_equal(rest, hyps_of(0)) && alpha_eq(C, concl_of(0));
      }
      if (!ok)
        fail(path, r, "a hypothesis (bang " + R.zero().str() + " psi) added to the premise",
             print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "der") {
      if (!expect_premises(1)) return;
      bool ok = false;
      for (std::size_t i = 0; i < H.size() && !ok; ++i) {
        if (!is_bang(H[i]) || !(H[i]->grade == R.one())) continue;
        Hyps rest = H;
        rest.erase(rest.begin() + i);
        rest.push_back(H[i]->l);
        ok = ms_equal(rest, hyps_of(0)) && alpha_eq(C, concl_of(0));
      }
      if (!ok)
        fail(path, r, "a hypothesis psi promoted to (bang " + R.one().str() + " psi)",
             print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "c") {
      if (!expect_premises(1)) return;
      bool ok = false;
      if (n.params.psi && n.params.grades) {
        const auto& [gr, gs] = *n.params.grades;
        FormulaPtr merged = f_bang(R.add(gr, gs), *n.params.psi);
        auto rest = ms_minus(H, merged);
        if (rest) {
          Hyps want = *rest;
          want.push_back(f_bang(gr, *n.params.psi));
          want.push_back(f_bang(gs, *n.params.psi));
          ok = ms_equal(want, hyps_of(0)) && alpha_eq(C, concl_of(0));
        }
      } else {
        // infer: pick the merged hypothesis and the two premise bangs
        const Hyps& P = hyps_of(0);
        for (std::size_t i = 0; i < H.size() && !ok; ++i) {
          if (!is_bang(H[i])) continue;
          for (std::size_t a = 0; a < P.size() && !ok; ++a) {
            if (!is_bang(P[a]) || !alpha_eq(P[a]->l, H[i]->l)) continue;
            for (std::size_t b = 0; b < P.size() && !ok; ++b) {
              if (b == a || !is_bang(P[b]) || !alpha_eq(P[b]->l, H[i]->l)) continue;
              if (!(R.add(P[a]->grade, P[b]->grade) == H[i]->grade)) continue;
              Hyps rest = H;
              rest.erase(rest.begin() + i);
              rest.push_back(P[a]);
              rest.push_back(P[b]);
              ok = ms_equal(rest, P) && alpha_eq(C, concl_of(0));
            }
          }
        }
      }
      if (!ok)
        fail(path, r, "two banged copies contracted into their grade sum",
             print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "pro") {
      if (!expect_premises(1)) return;
      if (!n.params.grade) {
        fail(path, r, "(grade r)", "missing");
        recurse_same_ctx();
        return;
      }
      const Grade& g = *n.params.grade;
      bool ok = true;
      if (!R.contains(g)) {
        fail(path, r, "grade in semiring " + R.name(), g.str());
        ok = false;
      }
      Hyps want;
      for (const auto& h : hyps_of(0)) {
        if (!is_bang(h)) {
          fail(path, r, "every premise hypothesis banged", print_formula(h));
          ok = false;
          break;
        }
        want.push_back(f_bang(R.mul(g, h->grade), h->l));
      }
      if (ok) {
        bool shape = C->kind == FKind::Bang && C->grade == g && alpha_eq(C->l, concl_of(0)) &&
                     ms_equal(H, want);
        if (!shape)
          fail(path, r,
               "(seq " + print_hyps(want) + " (bang " + g.str() + " " +
                   print_formula(concl_of(0)) + "))",
               print_sequent(n.concl));
      }
      recurse_same_ctx();
      return;
    }
    if (r == "decr") {
      if (!expect_premises(1)) return;
      const FormulaPtr& PC = concl_of(0);
      bool ok = C->kind == FKind::Bang && PC->kind == FKind::Bang && alpha_eq(C->l, PC->l) &&
                R.leq(C->grade, PC->grade) && ms_equal(H, hyps_of(0));
      if (!ok)
        fail(path, r, "conclusion grade below the premise grade on the same formula",
             print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "sym") {
      if (!expect_premises(1)) return;
      const FormulaPtr& PC = concl_of(0);
      bool ok = C->kind == FKind::Eq && PC->kind == FKind::Eq && C->sort == PC->sort &&
                term_eq(C->t, PC->u) && term_eq(C->u, PC->t) && ms_equal(H, hyps_of(0));
      if (!ok) fail(path, r, "conclusion with the equation flipped", print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "trans") {
      if (!expect_premises(2)) return;
      const FormulaPtr& A = concl_of(0);
      const FormulaPtr& B = concl_of(1);
      bool ok = C->kind == FKind::Eq && A->kind == FKind::Eq && B->kind == FKind::Eq &&
                C->sort == A->sort && A->sort == B->sort && term_eq(A->u, B->t) &&
                term_eq(C->t, A->t) && term_eq(C->u, B->u) &&
                ms_equal(H, ms_concat(hyps_of(0), hyps_of(1)));
      if (!ok)
        fail(path, r, "equations chained through a shared middle term", print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "w-eq") {
      if (!expect_premises(1)) return;
      bool ok = false;
      for (std::size_t i = 0; i < H.size() && !ok; ++i) {
        if (H[i]->kind != FKind::Eq) continue;
        Hyps rest = H;
        rest.erase(rest.begin() + i);
        ok = ms_equal(rest, hyps_of(0)) && alpha_eq(C, concl_of(0));
      }
      if (!ok)
        fail(path, r, "an equality hypothesis added to the premise", print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "subst") {
      if (!expect_premises(2)) return;
      if (!n.params.var || !n.params.phi || !n.params.t || !n.params.u) {
        fail(path, r, "(var x S) (phi F) (t T) (u U)", "missing parameters");
        recurse_same_ctx();
        return;
      }
      const auto& [x, xsort] = *n.params.var;
      if (ctx_sort(ctx, x))
        fail(path, r, "substitution variable fresh for the context", x + " is bound");
      if (!th.sig.has_sort(xsort)) fail(path, r, "known sort", xsort);
      Context ext = ctx;
      ext.emplace_back(x, xsort);
      std::vector<std::string> issues;
      wf_formula(th, ext, *n.params.phi, issues);
      wf_term(th, ctx, *n.params.t, xsort, issues);
      wf_term(th, ctx, *n.params.u, xsort, issues);
      for (const auto& w : issues) fail(path, r, "well-sorted parameters", w);
      if (issues.empty()) {
        const FormulaPtr& phi = *n.params.phi;
        Grade g;
        try {
          g = gr_formula(th, phi, x);
        } catch (const GrailError& ex) {
          fail(path, r, "gradable substitution formula", ex.what());
          recurse_same_ctx();
          return;
        }
        FormulaPtr want_p1 = subst_formula(phi, x, *n.params.t);
        FormulaPtr want_p2 = f_bang(g, f_eq(xsort, *n.params.t, *n.params.u));
        FormulaPtr want_c = subst_formula(phi, x, *n.params.u);
        if (!alpha_eq(concl_of(0), want_p1))
          fail(path, r, "premise 1 conclusion " + print_formula(want_p1),
               print_formula(concl_of(0)));
        if (!alpha_eq(concl_of(1), want_p2))
          fail(path, r, "premise 2 conclusion " + print_formula(want_p2),
               print_formula(concl_of(1)));
        if (!alpha_eq(C, want_c) || !ms_equal(H, ms_concat(hyps_of(0), hyps_of(1))))
          fail(path, r,
               "(seq " + print_hyps(ms_concat(hyps_of(0), hyps_of(1))) + " " +
                   print_formula(want_c) + ")",
               print_sequent(n.concl));
      }
      recurse_same_ctx();
      return;
    }
    if (r == "lolli-r") {
      if (!expect_premises(1)) return;
      bool ok = false;
      if (C->kind == FKind::Lolli) {
        Hyps want = H;
        want.push_back(C->l);
        ok = ms_equal(want, hyps_of(0)) && alpha_eq(concl_of(0), C->r);
      }
      if (!ok)
        fail(path, r, "premise with the antecedent moved to the hypotheses",
             print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "lolli-l") {
      if (!expect_premises(2)) return;
      bool ok = false;
      for (std::size_t i = 0; i < H.size() && !ok; ++i) {
        if (H[i]->kind != FKind::Lolli) continue;
        if (!alpha_eq(concl_of(0), H[i]->l)) continue;
        auto rest2 = ms_minus(hyps_of(1), H[i]->r);
        if (!rest2) continue;
        Hyps rest = H;
        rest.erase(rest.begin() + i);
        ok = ms_equal(rest, ms_concat(hyps_of(0), *rest2)) && alpha_eq(C, concl_of(1));
      }
      if (!ok)
        fail(path, r, "implication hypothesis resolved against the premises",
             print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "with-r") {
      if (!expect_premises(2)) return;
      bool ok = C->kind == FKind::With && alpha_eq(concl_of(0), C->l) &&
                alpha_eq(concl_of(1), C->r) && ms_equal(H, hyps_of(0)) && ms_equal(H, hyps_of(1));
      if (!ok)
        fail(path, r, "both premises over the same hypotheses", print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "with-l1" || r == "with-l2") {
      if (!expect_premises(1)) return;
      bool ok = false;
      for (std::size_t i = 0; i < H.size() && !ok; ++i) {
        if (H[i]->kind != FKind::With) continue;
        Hyps rest = H;
        rest.erase(rest.begin() + i);
        rest.push_back(r == "with-l1" ? H[i]->l : H[i]->r);
        ok = ms_equal(rest, hyps_of(0)) && alpha_eq(C, concl_of(0));
      }
      if (!ok) fail(path, r, "one component of a with hypothesis kept", print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "plus-r1" || r == "plus-r2") {
      if (!expect_premises(1)) return;
      bool ok = C->kind == FKind::Plus &&
                alpha_eq(concl_of(0), r == "plus-r1" ? C->l : C->r) && ms_equal(H, hyps_of(0));
      if (!ok) fail(path, r, "premise proving one side of the plus", print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "plus-l") {
      if (!expect_premises(2)) return;
      bool ok = false;
      for (std::size_t i = 0; i < H.size() && !ok; ++i) {
        if (H[i]->kind != FKind::Plus) continue;
        Hyps rest = H;
        rest.erase(rest.begin() + i);
        Hyps w1 = rest, w2 = rest;
        w1.push_back(H[i]->l);
        w2.push_back(H[i]->r);
        ok = ms_equal(w1, hyps_of(0)) && ms_equal(w2, hyps_of(1)) &&
             alpha_eq(C, concl_of(0)) && alpha_eq(C, concl_of(1));
      }
      if (!ok) fail(path, r, "case split over a plus hypothesis", print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "forall-r" || r == "exists-l") {
      if (!expect_premises(1)) return;
      if (!n.params.var) {
        fail(path, r, "(var y S) eigenvariable", "missing");
        recurse_same_ctx();
        return;
      }
      const auto& [y, ysort] = *n.params.var;
      if (ctx_sort(ctx, y)) fail(path, r, "fresh eigenvariable", y + " already in context");
      Context ext = ctx;
      ext.emplace_back(y, ysort);
      bool ok = false;
      if (r == "forall-r") {
        ok = C->kind == FKind::Forall && C->sort == ysort && ms_equal(H, hyps_of(0)) &&
             alpha_eq(concl_of(0), subst_formula(C->l, C->sym, t_var(y)));
      } else {
        for (std::size_t i = 0; i < H.size() && !ok; ++i) {
          if (H[i]->kind != FKind::Exists || H[i]->sort != ysort) continue;
          Hyps rest = H;
          rest.erase(rest.begin() + i);
          rest.push_back(subst_formula(H[i]->l, H[i]->sym, t_var(y)));
          ok = ms_equal(rest, hyps_of(0)) && alpha_eq(C, concl_of(0));
        }
      }
      if (!ok)
        fail(path, r, "premise in the context extended by the eigenvariable",
             print_sequent(n.concl));
      check(n.premises[0], ext, path + ".0");
      return;
    }
    if (r == "forall-l") {
      if (!expect_premises(1)) return;
      if (!n.params.term) {
        fail(path, r, "(term T) witness", "missing");
        recurse_same_ctx();
        return;
      }
      bool ok = false;
      for (std::size_t i = 0; i < H.size() && !ok; ++i) {
        if (H[i]->kind != FKind::Forall) continue;
        std::vector<std::string> issues;
        wf_term(th, ctx, *n.params.term, H[i]->sort, issues);
        if (!issues.empty()) continue;
        Hyps rest = H;
        rest.erase(rest.begin() + i);
        rest.push_back(subst_formula(H[i]->l, H[i]->sym, *n.params.term));
        ok = ms_equal(rest, hyps_of(0)) && alpha_eq(C, concl_of(0));
      }
      if (!ok)
        fail(path, r, "universal hypothesis instantiated at the witness term",
             print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }
    if (r == "exists-r") {
      if (!expect_premises(1)) return;
      if (!n.params.term) {
        fail(path, r, "(term T) witness", "missing");
        recurse_same_ctx();
        return;
      }
      bool ok = false;
      if (C->kind == FKind::Exists) {
        std::vector<std::string> issues;
        wf_term(th, ctx, *n.params.term, C->sort, issues);
        ok = issues.empty() && ms_equal(H, hyps_of(0)) &&
             alpha_eq(concl_of(0), subst_formula(C->l, C->sym, *n.params.term));
      }
      if (!ok)
        fail(path, r, "premise proving the body at the witness term", print_sequent(n.concl));
      recurse_same_ctx();
      return;
    }

    fail(path, r, "a known rule", "unknown rule " + r);
    for (std::size_t i = 0; i < n.premises.size(); ++i)
      check(n.premises[i], ctx, path + "." + std::to_string(i));
  }
};

}  // namespace detail

inline std::vector<RuleViolation> check_derivation(const Theory& th, const Derivation& d) {
  detail::DerivChecker ck{th, {}};
  std::set<std::string> names;
  for (const auto& [x, s] : d.ctx)
    if (!names.insert(x).second)
      ck.fail("root", "-", "distinct context variables", "duplicate " + x);
  ck.check(d.root, d.ctx, "root");
  return std::move(ck.out);
}

// ------------------------------------------------- congruence derivation ----

// Builds the derivation of
//   !_{g1}(x1 = y1), ..., !_{gn}(xn = yn)  |-  f(xs) = f(ys)
// for function symbols, and
//   p(xs), !_{g1}(x1 = y1), ...            |-  p(ys)
// for predicates, by chaining one substitution per argument slot.
inline Derivation derive_congruence(const Theory& th, const std::string& sym, bool is_pred) {
  std::vector<std::string> arg_sorts;
  std::vector<Grade> grades;
  std::string result_sort;
  if (is_pred) {
    const PredSym* p = th.sig.pred(sym);
    if (!p) throw GrailError("derive_congruence: unknown predicate " + sym);
    arg_sorts = p->arg_sorts;
    grades = p->arg_grades;
  } else {
    const FnSym* f = th.sig.fn(sym);
    if (!f) throw GrailError("derive_congruence: unknown function " + sym);
    arg_sorts = f->arg_sorts;
    grades = f->arg_grades;
    result_sort = f->result;
  }
  std::size_t n = arg_sorts.size();

  Derivation d;
  d.name = std::string("congruence_") + sym;
  d.theory_name = th.name;
  std::vector<TermPtr> xs, ys;
  for (std::size_t i = 0; i < n; ++i) {
    std::string x = "x" + std::to_string(i + 1), y = "y" + std::to_string(i + 1);
    d.ctx.emplace_back(x, arg_sorts[i]);
    d.ctx.emplace_back(y, arg_sorts[i]);
    xs.push_back(t_var(x));
    ys.push_back(t_var(y));
  }

  auto mixed = [&](std::size_t upto, const TermPtr& hole,
                   std::size_t hole_at) {  // y1..y_{upto-1}, hole at hole_at, x rest
    std::vector<TermPtr> args;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == hole_at)
        args.push_back(hole);
      else if (j < upto)
        args.push_back(ys[j]);
      else
        args.push_back(xs[j]);
    }
    return args;
  };

  DerivNode cur;
  Hyps hyps_so_far;
  if (is_pred) {
    cur.rule = "ax";
    cur.concl.hyps = {f_pred(sym, xs)};
    cur.concl.concl = f_pred(sym, xs);
    hyps_so_far = cur.concl.hyps;
  } else {
    cur.rule = "refl";
    cur.concl.concl = f_eq(result_sort, t_app(sym, xs), t_app(sym, xs));
  }

  for (std::size_t i = 0; i < n; ++i) {
    std::string z = "z";  // fresh: context variables are x1..,y1..
    FormulaPtr phi =
        is_pred ? f_pred(sym, mixed(i, t_var(z), i))
                : f_eq(result_sort, t_app(sym, xs), t_app(sym, mixed(i, t_var(z), i)));
    FormulaPtr bang_eq = f_bang(grades[i], f_eq(arg_sorts[i], xs[i], ys[i]));

    DerivNode axn;
    axn.rule = "ax";
    axn.concl.hyps = {bang_eq};
    axn.concl.concl = bang_eq;

    DerivNode step;
    step.rule = "subst";
    step.params.var = {z, arg_sorts[i]};
    step.params.phi = phi;
    step.params.t = xs[i];
    step.params.u = ys[i];
    step.premises.push_back(std::move(cur));
    step.premises.push_back(std::move(axn));
    hyps_so_far.push_back(bang_eq);
    step.concl.hyps = hyps_so_far;
    step.concl.concl = is_pred ? f_pred(sym, mixed(i + 1, ys[i], i))
                               : f_eq(result_sort, t_app(sym, xs), t_app(sym, mixed(i + 1, ys[i], i)));
    cur = std::move(step);
  }
  d.root = std::move(cur);
  return d;
}

// Builds  !_{eps} P  |-  plus_e(x,z) = plus_e(y,z)  from a bound axiom
// `P |- x = y` (hypothesis a nullary predicate), for eps above the first
// slot grade e of plus_e. The shape: promote the axiom to grade e, cut
// against a substitution into the reflexive equation, and weaken the
// promotion grade from eps down to e on the hypothesis side.
inline Derivation derive_scaled_replacement(const Theory& th, const std::string& bound_axiom,
                                            const std::string& plus_sym, const Grade& eps) {
  const Axiom* ax = th.axiom(bound_axiom);
  if (!ax) throw GrailError("derive_scaled_replacement: unknown axiom " + bound_axiom);
  if (ax->seq.hyps.size() != 1 || ax->seq.hyps[0]->kind != FKind::Pred ||
      ax->seq.concl->kind != FKind::Eq || ax->seq.ctx.size() != 2)
    throw GrailError("derive_scaled_replacement: axiom is not a bound axiom");
  const FnSym* plus = th.sig.fn(plus_sym);
  if (!plus || plus->arg_sorts.size() != 2)
    throw GrailError("derive_scaled_replacement: need a binary operation");
  FormulaPtr P = ax->seq.hyps[0];  // nullary predicate
  const Grade e = plus->arg_grades[0];
  const std::string sort = plus->arg_sorts[0];

  Derivation d;
  d.name = "li_" + plus_sym + "_" + eps.str();
  d.theory_name = th.name;
  d.ctx = {{"x", sort}, {"y", sort}, {"z", sort}};

  auto seq = [&](Hyps h, FormulaPtr c) {
    Sequent s;
    s.hyps = std::move(h);
    s.concl = std::move(c);
    return s;
  };
  FormulaPtr xy = f_eq(sort, t_var("x"), t_var("y"));

  // right branch: axiom -> der -> pro(e), ending in  !_e P |- !_e (x=y)
  DerivNode a;
  a.rule = "axiom";
  a.params.axiom_name = bound_axiom;
  a.params.binds = {{ax->seq.ctx[0].first, t_var("x")}, {ax->seq.ctx[1].first, t_var("y")}};
  a.concl = seq({P}, xy);

  DerivNode dr;
  dr.rule = "der";
  dr.premises = {a};
  dr.concl = seq({f_bang(th.semiring.one(), P)}, xy);

  DerivNode pr;
  pr.rule = "pro";
  pr.params.grade = e;
  pr.premises = {dr};
  pr.concl = seq({f_bang(e, P)}, f_bang(e, xy));

  // reflexivity:  |- plus(x,z) = plus(x,z)
  TermPtr pxz = t_app(plus_sym, {t_var("x"), t_var("z")});
  TermPtr pyz = t_app(plus_sym, {t_var("y"), t_var("z")});
  DerivNode rf;
  rf.rule = "refl";
  rf.concl = seq({}, f_eq(plus->result, pxz, pxz));

  // subst through phi = (plus(x,z) = plus(w,z)), gr(phi, w) = e
  DerivNode sb;
  sb.rule = "subst";
  sb.params.var = {"w", sort};
  sb.params.phi = f_eq(plus->result, pxz, t_app(plus_sym, {t_var("w"), t_var("z")}));
  sb.params.t = t_var("x");
  sb.params.u = t_var("y");
  sb.premises = {rf, pr};
  sb.concl = seq({f_bang(e, P)}, f_eq(plus->result, pxz, pyz));

  // left branch:  !_eps P |- !_e P  via ax -> der -> pro(eps) -> decr
  DerivNode ax2;
  ax2.rule = "ax";
  ax2.concl = seq({P}, P);
  DerivNode dr2;
  dr2.rule = "der";
  dr2.premises = {ax2};
  dr2.concl = seq({f_bang(th.semiring.one(), P)}, P);
  DerivNode pr2;
  pr2.rule = "pro";
  pr2.params.grade = eps;
  pr2.premises = {dr2};
  pr2.concl = seq({f_bang(eps, P)}, f_bang(eps, P));
  DerivNode dc;
  dc.rule = "decr";
  dc.premises = {pr2};
  dc.concl = seq({f_bang(eps, P)}, f_bang(e, P));

  DerivNode cut;
  cut.rule = "cut";
  cut.premises = {dc, sb};
  cut.concl = seq({f_bang(eps, P)}, f_eq(plus->result, pxz, pyz));
  d.root = std::move(cut);
  return d;
}

// -------------------------------------------------------- bounded search ----

// Goal-directed proof search over the leaf rules, invertible right rules and
// a few hypothesis rules. Deliberately cut-free and subst-free: complete
// enough for unit goals and axiom instances, documented as bounded.
namespace detail {

struct Prover {
  const Theory& th;
  int node_budget = 20000;

  std::optional<DerivNode> leaf(const std::string& rule, const Sequent& goal) {
    DerivNode n;
    n.rule = rule;
    n.concl.hyps = goal.hyps;
    n.concl.concl = goal.concl;
    return n;
  }

  bool match_term(const TermPtr& pat, const TermPtr& t, const std::set<std::string>& pvars,
                  std::map<std::string, TermPtr>& b) {
    if (pat->var && pvars.count(pat->name)) {
      auto it = b.find(pat->name);
      if (it != b.end()) return term_eq(it->second, t);
      b[pat->name] = t;
      return true;
    }
    if (pat->var != t->var || pat->name != t->name || pat->args.size() != t->args.size())
      return false;
    for (std::size_t i = 0; i < pat->args.size(); ++i)
      if (!match_term(pat->args[i], t->args[i], pvars, b)) return false;
    return true;
  }

  bool match_formula(const FormulaPtr& pat, const FormulaPtr& f,
                     const std::set<std::string>& pvars, std::map<std::string, TermPtr>& b) {
    if (pat->kind != f->kind) return false;
    switch (pat->kind) {
      case FKind::One:
      case FKind::Top:
      case FKind::Zero:
      case FKind::Bot: return true;
      case FKind::Tensor:
      case FKind::With:
      case FKind::Plus:
      case FKind::Lolli:
        return match_formula(pat->l, f->l, pvars, b) && match_formula(pat->r, f->r, pvars, b);
      case FKind::Bang:
        return pat->grade == f->grade && match_formula(pat->l, f->l, pvars, b);
      case FKind::Eq:
        return pat->sort == f->sort && match_term(pat->t, f->t, pvars, b) &&
               match_term(pat->u, f->u, pvars, b);
      case FKind::Pred: {
        if (pat->sym != f->sym || pat->args.size() != f->args.size()) return false;
        for (std::size_t i = 0; i < pat->args.size(); ++i)
          if (!match_term(pat->args[i], f->args[i], pvars, b)) return false;
        return true;
      }
      default: return false;  // no quantified axiom matching
    }
  }

  std::optional<DerivNode> try_axioms(const Sequent& goal) {
    for (const auto& ax : th.axioms) {
      if (ax.seq.hyps.size() != goal.hyps.size()) continue;
      std::set<std::string> pvars;
      for (const auto& [x, s] : ax.seq.ctx) pvars.insert(x);
      std::map<std::string, TermPtr> b;
      if (!match_formula(ax.seq.concl, goal.concl, pvars, b)) continue;
      // greedy hypothesis matching (multiset, first fit with backtracking)
      std::vector<bool> used(goal.hyps.size(), false);
      std::function<bool(std::size_t, std::map<std::string, TermPtr>&)> fit =
          [&](std::size_t i, std::map<std::string, TermPtr>& bb) -> bool {
        if (i == ax.seq.hyps.size()) return true;
        for (std::size_t j = 0; j < goal.hyps.size(); ++j) {
          if (used[j]) continue;
          auto save = bb;
          if (match_formula(ax.seq.hyps[i], goal.hyps[j], pvars, bb)) {
            used[j] = true;
            if (fit(i + 1, bb)) return true;
            used[j] = false;
          }
          bb = save;
        }
        return false;
      };
      if (!fit(0, b)) continue;
      if (b.size() != pvars.size()) continue;  // leftover axiom variables
      DerivNode n;
      n.rule = "axiom";
      n.params.axiom_name = ax.name;
      for (const auto& [x, s] : ax.seq.ctx) n.params.binds.emplace_back(x, b[x]);
      n.concl.hyps = goal.hyps;
      n.concl.concl = goal.concl;
      return n;
    }
    return std::nullopt;
  }

  std::optional<DerivNode> prove(const Sequent& goal, int depth) {
    if (node_budget-- <= 0 || depth < 0) return std::nullopt;
    const Hyps& H = goal.hyps;
    const FormulaPtr& C = goal.concl;

    if (H.size() == 1 && alpha_eq(H[0], C)) return leaf("ax", goal);
    if (H.empty() && C->kind == FKind::Eq && term_eq(C->t, C->u)) return leaf("refl", goal);
    if (H.empty() && C->kind == FKind::One) return leaf("one-r", goal);
    if (C->kind == FKind::Top) return leaf("top-r", goal);
    for (const auto& h : H)
      if (h->kind == FKind::Zero) return leaf("zero-l", goal);
    if (auto ax = try_axioms(goal)) return ax;
    if (depth == 0) return std::nullopt;

    auto child = [&](const std::string& rule, std::vector<DerivNode> prem) {
      DerivNode n;
      n.rule = rule;
      n.premises = std::move(prem);
      n.concl.hyps = goal.hyps;
      n.concl.concl = goal.concl;
      return n;
    };
    auto sub = [&](Hyps h, FormulaPtr c) {
      Sequent s;
      s.ctx = goal.ctx;
      s.hyps = std::move(h);
      s.concl = std::move(c);
      return s;
    };

    // invertible hypothesis rules
    for (std::size_t i = 0; i < H.size(); ++i) {
      Hyps rest = H;
      rest.erase(rest.begin() + i);
      if (H[i]->kind == FKind::One) {
        if (auto p = prove(sub(rest, C), depth - 1)) return child("one-l", {*p});
      }
      if (H[i]->kind == FKind::Tensor) {
        Hyps r2 = rest;
        r2.push_back(H[i]->l);
        r2.push_back(H[i]->r);
        if (auto p = prove(sub(r2, C), depth - 1)) return child("tensor-l", {*p});
      }
      if (H[i]->kind == FKind::Bang && H[i]->grade == th.semiring.one()) {
        Hyps r2 = rest;
        r2.push_back(H[i]->l);
        if (auto p = prove(sub(r2, C), depth - 1)) return child("der", {*p});
      }
      if (H[i]->kind == FKind::Bang && H[i]->grade == th.semiring.zero()) {
        if (auto p = prove(sub(rest, C), depth - 1)) return child("w", {*p});
      }
      if (H[i]->kind == FKind::Eq) {
        if (auto p = prove(sub(rest, C), depth - 1)) return child("w-eq", {*p});
      }
    }
    // right rules
    if (C->kind == FKind::Lolli) {
      Hyps h2 = H;
      h2.push_back(C->l);
      if (auto p = prove(sub(h2, C->r), depth - 1)) return child("lolli-r", {*p});
    }
    if (C->kind == FKind::With) {
      if (auto p = prove(sub(H, C->l), depth - 1))
        if (auto q = prove(sub(H, C->r), depth - 1)) return child("with-r", {*p, *q});
    }
    if (C->kind == FKind::Plus) {
      if (auto p = prove(sub(H, C->l), depth - 1)) return child("plus-r1", {*p});
      if (auto p = prove(sub(H, C->r), depth - 1)) return child("plus-r2", {*p});
    }
    if (C->kind == FKind::Eq && !H.empty()) {
      // try symmetry once via the premise with sides flipped
      if (H.size() == 1 && H[0]->kind == FKind::Eq && term_eq(H[0]->t, C->u) &&
          term_eq(H[0]->u, C->t) && H[0]->sort == C->sort) {
        if (auto p = prove(sub(H, f_eq(C->sort, C->u, C->t)), depth - 1))
          return child("sym", {*p});
      }
    }
    if (C->kind == FKind::Tensor && H.size() <= 12) {
      // all two-way splits of the hypothesis multiset
      std::size_t m = H.size();
      for (std::size_t mask = 0; mask < (1u << m); ++mask) {
        Hyps a, b;
        for (std::size_t i = 0; i < m; ++i) ((mask >> i) & 1 ? a : b).push_back(H[i]);
        if (auto p = prove(sub(a, C->l), depth - 1)) {
          if (auto q = prove(sub(b, C->r), depth - 1)) return child("tensor-r", {*p, *q});
        }
      }
    }
    if (C->kind == FKind::Bang) {
      // close under pro when every hypothesis is banged and grades divide
      // in the nonneg-real case; try the premise at grade 1 scaling
      bool all_bang = true;
      for (const auto& h : H) all_bang &= (h->kind == FKind::Bang);
      if (all_bang && th.semiring.kind == SemiringKind::NonnegReal && !C->grade.is_zero() &&
          !C->grade.inf) {
        Hyps prem;
        bool ok = true;
        for (const auto& h : H) {
          if (h->grade.inf) {
            ok = false;
            break;
          }
          prem.push_back(f_bang(Grade(h->grade.q / C->grade.q), h->l));
        }
        if (ok) {
          if (auto p = prove(sub(prem, C->l), depth - 1)) {
            DerivNode n = child("pro", {*p});
            n.params.grade = C->grade;
            return n;
          }
        }
      }
    }
    return std::nullopt;
  }
};

}  // namespace detail

inline std::optional<Derivation> prove_bounded(const Theory& th, const Sequent& goal, int depth,
                                               int budget = 20000) {
  detail::Prover pv{th, budget};
  auto n = pv.prove(goal, depth);
  if (!n) return std::nullopt;
  Derivation d;
  d.name = "proof";
  d.theory_name = th.name;
  d.ctx = goal.ctx;
  d.root = std::move(*n);
  return d;
}

}  // namespace grail
