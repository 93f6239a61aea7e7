#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "grail/syntax.hpp"

using namespace grail;

namespace {

// Shared test theory: one sort, a unary f (slot grade 2), binary g (1, 1/2),
// constant c, unary pred p (3), binary pred q (1, 2).
Theory test_theory() {
  std::vector<std::string> issues;
  Theory th = parse_theory_text(R"((theory t
    (semiring nonneg-real)
    (fragment first-order)
    (sort M)
    (fn f ((2 M)) M)
    (fn g ((1 M) (1/2 M)) M)
    (fn c () M)
    (pred p ((3 M)))
    (pred q ((1 M) (2 M)))))",
                                issues);
  REQUIRE(issues.empty());
  return th;
}

FormulaPtr F(const std::string& s) { return parse_formula(parse_single_sexp(s)); }
TermPtr T(const std::string& s) { return parse_term(parse_single_sexp(s)); }

Grade grt(const Theory& th, const std::string& t, const std::string& x) {
  return gr_term(th, T(t), x);
}
Grade grf(const Theory& th, const std::string& f, const std::string& x) {
  return gr_formula(th, F(f), x);
}

}  // namespace

TEST_CASE("grade of variables in terms: frozen oracle table") {
  Theory th = test_theory();
  // Each row was computed by hand from the slot-weighted recursion.
  CHECK(grt(th, "x", "x") == Grade(1));
  CHECK(grt(th, "x", "y") == Grade(0));
  CHECK(grt(th, "(c)", "x") == Grade(0));
  CHECK(grt(th, "(f x)", "x") == Grade(2));
  CHECK(grt(th, "(g x (f x))", "x") == Grade(2));           // 1*1 + 1/2*2
  CHECK(grt(th, "(g (f (f x)) (g x y))", "x") == Grade(9, 2));  // 1*4 + 1/2*1
  CHECK(grt(th, "(g (f (f x)) (g x y))", "y") == Grade(1, 4));  // 1/2 * (1/2*1)
  CHECK(grt(th, "(f (f (f x)))", "x") == Grade(8));
  CHECK(grt(th, "(g (g x x) (g x x))", "x") == Grade(9, 4));  // 1*(3/2) + 1/2*(3/2)
}

TEST_CASE("grade of variables in formulas: frozen oracle table") {
  Theory th = test_theory();
  CHECK(grf(th, "(p (f x))", "x") == Grade(6));
  CHECK(grf(th, "(q x (g y x))", "x") == Grade(2));  // 1 + 2*(1/2)
  CHECK(grf(th, "(q x (g y x))", "y") == Grade(2));  // 2*(1*1)
  CHECK(grf(th, "(eq M x (f y))", "x") == Grade(1));
  CHECK(grf(th, "(eq M x (f y))", "y") == Grade(2));
  CHECK(grf(th, "(tensor (p (f x)) (eq M x (f y)))", "x") == Grade(7));
  CHECK(grf(th, "(bang 3/2 (q x (g y x)))", "x") == Grade(3));
  CHECK(grf(th, "(bang 0 (p (f x)))", "x") == Grade(0));
  CHECK(grf(th, "one", "x") == Grade(0));
  CHECK(grf(th, "top", "x") == Grade(0));
  CHECK(grf(th, "bot", "x") == Grade(0));
  CHECK(grf(th, "zero", "x") == Grade(0));
  CHECK(grf(th, "(lolli (p x) (q y x))", "x") == Grade(5));
  CHECK(grf(th, "(forall (z M) (q z x))", "x") == Grade(2));
  CHECK(grf(th, "(forall (x M) (p x))", "x") == Grade(0));  // bound
  CHECK(grf(th, "(exists (z M) (p (g z x)))", "x") == Grade(3, 2));
  CHECK(grf(th, "(with (p x) (q x y))", "x") == Grade(3));  // max(3, 1)
  CHECK(grf(th, "(with (p x) (q x y))", "y") == Grade(2));  // max(0, 2)
  CHECK(grf(th, "(plus (p x) (q x y))", "x") == Grade(3));
}

TEST_CASE("grades in discrete and trivial semirings") {
  std::vector<std::string> issues;
  Theory nat = parse_theory_text(
      "(theory n (semiring nat) (sort M) (fn h ((3 M)) M) (pred r ((2 M))))", issues);
  REQUIRE(issues.empty());
  CHECK(gr_term(nat, T("(h (h x))"), "x") == Grade(9));
  CHECK(gr_formula(nat, F("(r (h x))"), "x") == Grade(6));
  // equal grades still join in a discrete order ...
  CHECK(gr_formula(nat, f_with(F("(r x)"), F("(r x)")), "x") == Grade(2));
  // ... incomparable ones do not
  CHECK_THROWS_AS(gr_formula(nat, f_with(F("(r x)"), F("(r (h x))")), "x"), GrailError);

  Theory triv = parse_theory_text(
      "(theory tv (semiring trivial) (sort M) (fn h ((inf M)) M))", issues);
  CHECK(gr_term(triv, T("x"), "x") == Grade::infinity());   // one() is inf
  CHECK(gr_term(triv, T("y"), "x") == Grade::infinity());   // zero() is inf
  CHECK(gr_term(triv, T("(h x)"), "x") == Grade::infinity());
}

TEST_CASE("substitution compositionality of grades on the tensor fragment") {
  Theory th = test_theory();
  std::mt19937 rng(77123u);
  std::uniform_int_distribution<int> pick(0, 99);

  // random term over variables {x, y}, depth-bounded
  std::function<TermPtr(int)> rnd_term = [&](int depth) -> TermPtr {
    int c = pick(rng) % (depth <= 1 ? 3 : 6);
    switch (c) {
      case 0: return t_var("x");
      case 1: return t_var("y");
      case 2: return t_app("c");
      case 3: return t_app("f", {rnd_term(depth - 1)});
      default: return t_app("g", {rnd_term(depth - 1), rnd_term(depth - 1)});
    }
  };
  std::function<FormulaPtr(int)> rnd_formula = [&](int depth) -> FormulaPtr {
    int c = pick(rng) % (depth <= 1 ? 4 : 7);
    switch (c) {
      case 0: return f_pred("p", {rnd_term(2)});
      case 1: return f_pred("q", {rnd_term(2), rnd_term(2)});
      case 2: return f_eq("M", rnd_term(2), rnd_term(2));
      case 3: return f_one();
      case 4: return f_tensor(rnd_formula(depth - 1), rnd_formula(depth - 1));
      case 5: return f_bang(Grade(pick(rng) % 3, 1 + pick(rng) % 2), rnd_formula(depth - 1));
      default:
        return f_quant(pick(rng) % 2 ? FKind::Forall : FKind::Exists, "z", "M",
                       f_pred("q", {t_var("z"), rnd_term(2)}));
    }
  };

  const Semiring& R = th.semiring;
  for (int i = 0; i < 400; ++i) {
    FormulaPtr phi = rnd_formula(3);
    TermPtr t = rnd_term(3);
    // gr(phi[t/x], y) = gr(phi, y) + gr(phi, x) * gr(t, y)   (y distinct from x)
    Grade lhs = gr_formula(th, subst_formula(phi, "x", t), "y");
    Grade rhs = R.add(gr_formula(th, phi, "y"),
                      R.mul(gr_formula(th, phi, "x"), gr_term(th, t, "y")));
    CHECK(lhs == rhs);
    // substituting for x rebuilds x-sensitivity purely from t
    Grade lhs2 = gr_formula(th, subst_formula(phi, "x", t), "x");
    Grade rhs2 = R.mul(gr_formula(th, phi, "x"), gr_term(th, t, "x"));
    CHECK(lhs2 == rhs2);
  }
}

TEST_CASE("additive connectives satisfy only the inequality form") {
  Theory th = test_theory();
  // sup does not distribute over +: this instance separates the two sides.
  FormulaPtr phi = f_with(f_pred("q", {t_var("y"), t_var("z")}),  // gr_x=0, gr_y=1
                          f_pred("p", {t_var("x")}));             // gr_x=3
  TermPtr t = t_var("y");
  Grade lhs = gr_formula(th, subst_formula(phi, "x", t), "y");  // max(1, 3) = 3
  Grade rhs = th.semiring.add(gr_formula(th, phi, "y"),
                              th.semiring.mul(gr_formula(th, phi, "x"), gr_term(th, t, "y")));
  CHECK(lhs == Grade(3));
  CHECK(rhs == Grade(4));  // max(1,0) + max(0,3)*1
  CHECK(th.semiring.leq(lhs, rhs));
}

TEST_CASE("substitution avoids capture and respects binders") {
  FormulaPtr f = F("(forall (y M) (q x y))");
  FormulaPtr g = subst_formula(f, "x", t_var("y"));
  // the bound y must be renamed away from the substituted free y
  CHECK(alpha_eq(g, F("(forall (w M) (q y w))")));
  CHECK_FALSE(alpha_eq(g, F("(forall (y M) (q y y))")));

  FormulaPtr h = subst_formula(F("(forall (x M) (p x))"), "x", t_var("z"));
  CHECK(alpha_eq(h, F("(forall (x M) (p x))")));  // x is bound, nothing happens
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_eq(F("(forall (x M) (p x))"), F("(forall (y M) (p y))")));
  CHECK(alpha_eq(F("(exists (x M) (forall (y M) (q x y)))"),
                 F("(exists (a M) (forall (b M) (q a b)))")));
  CHECK_FALSE(alpha_eq(F("(forall (x M) (q x y))"), F("(forall (y M) (q y y))")));
  CHECK_FALSE(alpha_eq(F("(bang 1 (p x))"), F("(bang 2 (p x))")));
  CHECK(alpha_eq(F("(bang 1/2 (p x))"), F("(bang 2/4 (p x))")));
  CHECK_FALSE(alpha_eq(F("(p x)"), F("(q x x)")));
}

TEST_CASE("printing round-trips through the parser") {
  Theory th = test_theory();
  for (const char* s : {
           "(tensor (p (f x)) (bang 3/2 (eq M x (g x y))))",
           "(forall (z M) (lolli (q z x) (plus one (with top bot))))",
           "(exists (v M) (eq M (c) (f v)))",
           "zero",
       }) {
    FormulaPtr f = F(s);
    FormulaPtr g = parse_formula(parse_single_sexp(print_formula(f)));
    CHECK(alpha_eq(f, g));
  }
  TermPtr t = T("(g (f (f x)) (g (c) y))");
  CHECK(term_eq(t, parse_term(parse_single_sexp(print_term(t)))));
}

TEST_CASE("well-sortedness diagnostics") {
  Theory th = test_theory();
  auto issues_of = [&](const std::string& seq_text, Context ctx) {
    Sequent s = parse_sequent(parse_single_sexp(seq_text), std::move(ctx));
    return wf_sequent(th, s);
  };
  Context ctx = {{"x", "M"}, {"y", "M"}};
  CHECK(issues_of("(seq ((p x)) (q x y))", ctx).empty());
  CHECK_FALSE(issues_of("(seq () (p w))", ctx).empty());            // unbound var
  CHECK_FALSE(issues_of("(seq () (p x y))", ctx).empty());          // arity
  CHECK_FALSE(issues_of("(seq () (r x))", ctx).empty());            // unknown pred
  CHECK_FALSE(issues_of("(seq () (eq N x y))", ctx).empty());       // unknown sort
  CHECK_FALSE(issues_of("(seq () (bang -1 (p x)))", ctx).empty());  // grade outside carrier
  CHECK_FALSE(issues_of("(seq () (p x))", {{"x", "M"}, {"x", "M"}}).empty());  // dup ctx
}

TEST_CASE("theory-level validation") {
  std::vector<std::string> issues;
  // grade 1/2 is not a nat
  parse_theory_text("(theory bad (semiring nat) (sort M) (fn f ((1/2 M)) M))", issues);
  CHECK_FALSE(issues.empty());

  issues.clear();
  // additive fragment over a discrete semiring lacks joins
  parse_theory_text("(theory bad2 (semiring nat) (fragment additive) (sort M))", issues);
  CHECK_FALSE(issues.empty());

  issues.clear();
  // reserved predicate name
  parse_theory_text("(theory bad3 (semiring nat) (sort M) (pred tensor ((1 M))))", issues);
  CHECK_FALSE(issues.empty());

  issues.clear();
  // classical needs the multiplicative fragment
  parse_theory_text("(theory bad4 (semiring nonneg-real) (classical) (sort M))", issues);
  CHECK_FALSE(issues.empty());

  issues.clear();
  Theory ok = parse_theory_text(R"((theory fine (semiring nonneg-real) (fragment multiplicative)
      (classical) (sort M) (fn f ((2 M)) M)
      (axiom A (ctx (x M)) (seq () (eq M (f x) (f x))))))",
                                issues);
  CHECK(issues.empty());
  CHECK(ok.classical);
  REQUIRE(ok.axiom("A") != nullptr);
  CHECK(ok.axiom("A")->seq.hyps.empty());
}

TEST_CASE("theory printing round-trips") {
  std::vector<std::string> issues;
  Theory th = test_theory();
  Theory th2 = parse_theory_text(print_theory(th), issues);
  CHECK(issues.empty());
  CHECK(th2.name == th.name);
  CHECK(th2.sig.fns.size() == th.sig.fns.size());
  CHECK(th2.sig.preds.size() == th.sig.preds.size());
  CHECK(th2.semiring.kind == th.semiring.kind);
}
