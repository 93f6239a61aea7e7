#pragma once

// Finite doctrine instances: indexed families of ordered "predicate" fibers
// with a symmetric monoidal structure, reindexing along finite maps, and a
// semiring-graded comonadic modality.  Two instances are provided:
//
//   QuantaleDoctrine  fibers are [0, inf]-valued tables over a finite carrier,
//                     ordered by reversed numeric comparison (smaller = truer),
//                     star = pointwise +, bang r = scaling by r.
//   KripkeDoctrine    fibers are up-closed subsets of X x W for an ordered
//                     monoid W, star via the monoid operation, bang r via a
//                     graded action table on W.
//
// doctrine_law_suite checks the structural laws on sampled fibers and counts
// every case under a stable law name; failures carry a witness string.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "grail/grade.hpp"
#include "grail/semiring.hpp"
#include "grail/sexpr.hpp"

namespace grail {

// ---- finite carriers and maps ----

struct FinArrow {
  int dom = 0, cod = 0;
  std::vector<int> tbl;  // tbl[i] in [0, cod)
};

inline FinArrow fin_id(int n) {
  FinArrow f{n, n, {}};
  f.tbl.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) f.tbl[static_cast<std::size_t>(i)] = i;
  return f;
}

inline FinArrow fin_const(int dom, int cod, int c) {
  return FinArrow{dom, cod, std::vector<int>(static_cast<std::size_t>(dom), c)};
}

// g after f
inline FinArrow fin_compose(const FinArrow& g, const FinArrow& f) {
  if (f.cod != g.dom) throw GrailError("fin_compose: domain mismatch");
  FinArrow h{f.dom, g.cod, {}};
  h.tbl.reserve(f.tbl.size());
  for (int x : f.tbl) h.tbl.push_back(g.tbl[static_cast<std::size_t>(x)]);
  return h;
}

// projection A x B -> B with row-major pairing (a, b) -> a * nb + b
inline FinArrow fin_proj2(int na, int nb) {
  FinArrow f{na * nb, nb, {}};
  f.tbl.reserve(static_cast<std::size_t>(na) * nb);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b) f.tbl.push_back(b);
  return f;
}

// id_A x g for g: B' -> B, as a map A x B' -> A x B
inline FinArrow fin_id_times(int na, const FinArrow& g) {
  FinArrow f{na * g.dom, na * g.cod, {}};
  f.tbl.reserve(static_cast<std::size_t>(na) * g.dom);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < g.dom; ++b) f.tbl.push_back(a * g.cod + g.tbl[static_cast<std::size_t>(b)]);
  return f;
}

struct DoctrineViolation {
  std::string law;
  std::string detail;
};

struct DoctrineReport {
  std::map<std::string, std::uint64_t> cases;
  std::vector<DoctrineViolation> violations;

  bool ok() const { return violations.empty(); }
  std::uint64_t total_cases() const {
    std::uint64_t t = 0;
    for (const auto& [k, v] : cases) t += v;
    return t;
  }
  void merge(const DoctrineReport& o) {
    for (const auto& [k, v] : o.cases) cases[k] += v;
    violations.insert(violations.end(), o.violations.begin(), o.violations.end());
  }
};

struct LawSuiteOptions {
  std::vector<int> carriers = {1, 2, 3, 4};
  std::vector<Grade> grades = {Grade(0), Grade(1, 2), Grade(1), Grade(2)};
  unsigned seed = 20240817;
  std::size_t max_fibers = 36;    // per carrier
  std::size_t max_pairs = 700;    // per carrier
  std::size_t max_triples = 400;  // per carrier
  std::size_t max_violations = 64;
};

// ---- quantale instance ----

struct QFib {
  std::vector<double> v;
};

inline std::string qfib_str(const QFib& a) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    if (i) os << " ";
    if (std::isinf(a.v[i]))
      os << "inf";
    else
      os << a.v[i];
  }
  os << "]";
  return os.str();
}

// Deliberately broken variants used to exercise the law suite.
enum class QBreak {
  None,
  BangShiftUp,  // bang adds a constant: breaks bang-kappa
  BangShrink,   // bang subtracts a constant: breaks bang-counit
  KappaShift,   // unit is a nonzero constant: breaks star-unit
};

struct QuantaleDoctrine {
  Semiring R = Semiring::by_name("nonneg-real").value();
  double eps = 1e-9;
  std::vector<double> value_grid = {0.0, 0.25, 0.5, 1.0, 2.0, val_inf()};
  QBreak broken = QBreak::None;

  std::string name() const { return "quantale"; }
  using Fib = QFib;

  bool grade_ok(const Grade&) const { return true; }

  QFib constant(int n, double x) const {
    return QFib{std::vector<double>(static_cast<std::size_t>(n), x)};
  }
  QFib kappa(int n) const { return constant(n, broken == QBreak::KappaShift ? 0.2 : 0.0); }
  QFib top(int n) const { return constant(n, 0.0); }
  QFib bottom(int n) const { return constant(n, val_inf()); }

  QFib star(const QFib& a, const QFib& b) const {
    QFib r = a;
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] += b.v[i];
    return r;
  }
  QFib bang(const Grade& g, const QFib& a) const {
    QFib r = a;
    for (auto& x : r.v) {
      x = val_scale(g, x);
      if (broken == QBreak::BangShiftUp) x += 0.1;
      if (broken == QBreak::BangShrink) x = std::max(0.0, x - 0.05);
    }
    return r;
  }
  QFib lolli(const QFib& a, const QFib& b) const {
    QFib r = a;
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] = val_residual(a.v[i], b.v[i]);
    return r;
  }
  QFib with(const QFib& a, const QFib& b) const {
    QFib r = a;
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] = std::max(a.v[i], b.v[i]);
    return r;
  }
  QFib plus(const QFib& a, const QFib& b) const {
    QFib r = a;
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] = std::min(a.v[i], b.v[i]);
    return r;
  }

  bool leq(const QFib& a, const QFib& b) const {
    for (std::size_t i = 0; i < a.v.size(); ++i)
      if (!fiber_leq(a.v[i], b.v[i], eps)) return false;
    return true;
  }

  QFib reindex(const FinArrow& f, const QFib& a) const {
    QFib r;
    r.v.reserve(f.tbl.size());
    for (int i : f.tbl) r.v.push_back(a.v[static_cast<std::size_t>(i)]);
    return r;
  }

  // Quantifiers along a map p: collapse each preimage; exists = min (truer),
  // forall = max.
  QFib q_exists(const FinArrow& p, const QFib& a) const {
    QFib r = constant(p.cod, val_inf());
    for (int i = 0; i < p.dom; ++i) {
      auto& slot = r.v[static_cast<std::size_t>(p.tbl[static_cast<std::size_t>(i)])];
      slot = std::min(slot, a.v[static_cast<std::size_t>(i)]);
    }
    return r;
  }
  QFib q_forall(const FinArrow& p, const QFib& a) const {
    QFib r = constant(p.cod, 0.0);
    for (int i = 0; i < p.dom; ++i) {
      auto& slot = r.v[static_cast<std::size_t>(p.tbl[static_cast<std::size_t>(i)])];
      slot = std::max(slot, a.v[static_cast<std::size_t>(i)]);
    }
    return r;
  }

  std::string fib_str(const QFib& a) const { return qfib_str(a); }

  std::vector<QFib> sample_fibers(int n, unsigned seed, std::size_t cap) const {
    std::vector<QFib> out;
    double total = std::pow(static_cast<double>(value_grid.size()), n);
    if (total <= static_cast<double>(cap) + 0.5) {
      std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
      while (true) {
        QFib f;
        f.v.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) f.v.push_back(value_grid[idx[static_cast<std::size_t>(i)]]);
        out.push_back(std::move(f));
        int k = 0;
        while (k < n && ++idx[static_cast<std::size_t>(k)] == value_grid.size())
          idx[static_cast<std::size_t>(k++)] = 0;
        if (k == n) break;
      }
    } else {
      std::mt19937 rng(seed + static_cast<unsigned>(n) * 7919u);
      std::uniform_int_distribution<std::size_t> pick(0, value_grid.size() - 1);
      // always include the constants from the grid
      for (double x : value_grid) out.push_back(constant(n, x));
      while (out.size() < cap) {
        QFib f;
        f.v.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) f.v.push_back(value_grid[pick(rng)]);
        out.push_back(std::move(f));
      }
    }
    return out;
  }
};

// ---- Kripke instance ----

struct OrdMonoid {
  int n = 0;
  int unit = 0;
  std::vector<char> leq_tbl;  // n*n, leq_tbl[i*n+j]: i <= j
  std::vector<int> mul_tbl;   // n*n

  bool le(int i, int j) const {
    return leq_tbl[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                   static_cast<std::size_t>(j)] != 0;
  }
  int op(int i, int j) const {
    return mul_tbl[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                   static_cast<std::size_t>(j)];
  }

  // Chain 0 <= 1 <= ... <= k-1 with truncated addition; unit 0.
  static OrdMonoid chain(int k) {
    OrdMonoid w;
    w.n = k;
    w.unit = 0;
    w.leq_tbl.assign(static_cast<std::size_t>(k) * k, 0);
    w.mul_tbl.assign(static_cast<std::size_t>(k) * k, 0);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        w.leq_tbl[static_cast<std::size_t>(i) * k + j] = i <= j ? 1 : 0;
        w.mul_tbl[static_cast<std::size_t>(i) * k + j] = std::min(i + j, k - 1);
      }
    return w;
  }
};

inline DoctrineReport check_ord_monoid(const OrdMonoid& w) {
  DoctrineReport rep;
  auto law = [&](const std::string& name, bool ok, const std::string& detail) {
    ++rep.cases[name];
    if (!ok) rep.violations.push_back({name, detail});
  };
  for (int i = 0; i < w.n; ++i) {
    law("w-order-refl", w.le(i, i), "element " + std::to_string(i));
    law("w-monoid-unit", w.op(w.unit, i) == i && w.op(i, w.unit) == i,
        "element " + std::to_string(i));
  }
  for (int i = 0; i < w.n; ++i)
    for (int j = 0; j < w.n; ++j) {
      if (i != j)
        law("w-order-antisym", !(w.le(i, j) && w.le(j, i)),
            std::to_string(i) + " and " + std::to_string(j));
      for (int k = 0; k < w.n; ++k) {
        law("w-order-trans", !(w.le(i, j) && w.le(j, k)) || w.le(i, k),
            std::to_string(i) + " <= " + std::to_string(j) + " <= " + std::to_string(k));
        law("w-monoid-assoc", w.op(w.op(i, j), k) == w.op(i, w.op(j, k)),
            std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k));
        law("w-op-monotone",
            !w.le(i, j) || (w.le(w.op(i, k), w.op(j, k)) && w.le(w.op(k, i), w.op(k, j))),
            std::to_string(i) + " <= " + std::to_string(j) + " at " + std::to_string(k));
      }
    }
  return rep;
}

// Graded action of a grade grid on W, given by table.
struct GradedAction {
  std::vector<Grade> grades;
  std::vector<std::vector<int>> tbl;  // tbl[gi][w] in [0, W.n)

  bool has(const Grade& g) const {
    for (const auto& x : grades)
      if (x == g) return true;
    return false;
  }
  int idx(const Grade& g) const {
    for (std::size_t i = 0; i < grades.size(); ++i)
      if (grades[i] == g) return static_cast<int>(i);
    throw GrailError("graded action: grade " + g.str() + " not in the action grid");
  }
  int apply(const Grade& g, int w) const {
    return tbl[static_cast<std::size_t>(idx(g))][static_cast<std::size_t>(w)];
  }

  // Canonical action on a truncated-addition chain: grades below 1 collapse to
  // the unit, otherwise multiply by the integer part (saturating at the top).
  static GradedAction chain_floor(const OrdMonoid& w, const std::vector<Grade>& grid) {
    GradedAction a;
    a.grades = grid;
    for (const auto& g : grid) {
      std::vector<int> row(static_cast<std::size_t>(w.n), 0);
      long long c;
      if (g.inf)
        c = w.n;  // saturates at the top for any nonzero argument
      else if (g < Grade(1))
        c = 0;
      else
        c = boost::rational_cast<long long>(g.q);  // floor for g >= 1
      for (int i = 0; i < w.n; ++i) {
        long long v = c * i;
        row[static_cast<std::size_t>(i)] = static_cast<int>(std::min<long long>(v, w.n - 1));
      }
      a.tbl.push_back(std::move(row));
    }
    return a;
  }
};

// Validates that an action table covers every grade a client will request.
inline DoctrineReport action_table_complete(const GradedAction& act, const Semiring& R,
                                            const std::vector<Grade>& needed) {
  DoctrineReport rep;
  std::vector<Grade> want = needed;
  want.push_back(R.zero());
  want.push_back(R.one());
  for (const auto& g : want) {
    ++rep.cases["action-table"];
    if (!act.has(g))
      rep.violations.push_back({"action-table", "grade " + g.str() + " missing from the table"});
  }
  return rep;
}

// The lax-action laws tying the action to the semiring structure.
inline DoctrineReport check_graded_action(const OrdMonoid& w, const GradedAction& act,
                                          const Semiring& R) {
  DoctrineReport rep;
  auto law = [&](const std::string& name, bool ok, const std::string& detail) {
    ++rep.cases[name];
    if (!ok) rep.violations.push_back({name, detail});
  };
  for (const auto& r : act.grades) {
    law("action-unit", w.le(act.apply(r, w.unit), w.unit), "grade " + r.str());
    for (int i = 0; i < w.n; ++i)
      for (int j = 0; j < w.n; ++j)
        law("action-monoidal",
            w.le(act.apply(r, w.op(i, j)), w.op(act.apply(r, i), act.apply(r, j))),
            "grade " + r.str() + " at " + std::to_string(i) + "," + std::to_string(j));
  }
  if (act.has(R.zero()))
    for (int i = 0; i < w.n; ++i)
      law("action-weakening", w.le(w.unit, act.apply(R.zero(), i)),
          "element " + std::to_string(i));
  if (act.has(R.one()))
    for (int i = 0; i < w.n; ++i)
      law("action-counit", w.le(i, act.apply(R.one(), i)), "element " + std::to_string(i));
  for (const auto& r : act.grades)
    for (const auto& s : act.grades) {
      Grade rs = R.add(r, s);
      if (act.has(rs))
        for (int i = 0; i < w.n; ++i)
          law("action-contraction", w.le(w.op(act.apply(r, i), act.apply(s, i)), act.apply(rs, i)),
              "grades " + r.str() + "," + s.str() + " at " + std::to_string(i));
      Grade rm = R.mul(r, s);
      if (act.has(rm))
        for (int i = 0; i < w.n; ++i)
          law("action-comult", w.le(act.apply(r, act.apply(s, i)), act.apply(rm, i)),
              "grades " + r.str() + "," + s.str() + " at " + std::to_string(i));
    }
  return rep;
}

struct KFib {
  int nx = 0;
  int nw = 0;
  std::vector<char> m;  // nx*nw, m[x*nw + w]

  bool at(int x, int w) const {
    return m[static_cast<std::size_t>(x) * static_cast<std::size_t>(nw) +
             static_cast<std::size_t>(w)] != 0;
  }
  void set(int x, int w, bool b) {
    m[static_cast<std::size_t>(x) * static_cast<std::size_t>(nw) + static_cast<std::size_t>(w)] =
        b ? 1 : 0;
  }
};

struct KripkeDoctrine {
  Semiring R = Semiring::by_name("nonneg-real").value();
  OrdMonoid W = OrdMonoid::chain(3);
  GradedAction act =
      GradedAction::chain_floor(OrdMonoid::chain(3), {Grade(0), Grade(1, 2), Grade(1), Grade(2)});

  std::string name() const { return "kripke"; }
  using Fib = KFib;

  bool grade_ok(const Grade& g) const { return act.has(g); }

  KFib empty(int n) const {
    KFib f;
    f.nx = n;
    f.nw = W.n;
    f.m.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(W.n), 0);
    return f;
  }
  KFib up_close_from(KFib f) const {
    for (int x = 0; x < f.nx; ++x)
      for (int w = 0; w < W.n; ++w)
        if (f.at(x, w))
          for (int w2 = 0; w2 < W.n; ++w2)
            if (W.le(w, w2)) f.set(x, w2, true);
    return f;
  }
  KFib kappa(int n) const {
    KFib f = empty(n);
    for (int x = 0; x < n; ++x) f.set(x, W.unit, true);
    return up_close_from(f);
  }
  KFib top(int n) const {
    KFib f = empty(n);
    std::fill(f.m.begin(), f.m.end(), 1);
    return f;
  }
  KFib bottom(int n) const { return empty(n); }

  bool is_upclosed(const KFib& f) const {
    for (int x = 0; x < f.nx; ++x)
      for (int w = 0; w < W.n; ++w)
        if (f.at(x, w))
          for (int w2 = 0; w2 < W.n; ++w2)
            if (W.le(w, w2) && !f.at(x, w2)) return false;
    return true;
  }

  KFib star(const KFib& a, const KFib& b) const {
    KFib f = empty(a.nx);
    for (int x = 0; x < a.nx; ++x)
      for (int w1 = 0; w1 < W.n; ++w1) {
        if (!a.at(x, w1)) continue;
        for (int w2 = 0; w2 < W.n; ++w2)
          if (b.at(x, w2)) f.set(x, W.op(w1, w2), true);
      }
    return up_close_from(std::move(f));
  }

  KFib bang(const Grade& g, const KFib& a) const {
    KFib f = empty(a.nx);
    for (int x = 0; x < a.nx; ++x)
      for (int v = 0; v < W.n; ++v)
        if (a.at(x, v)) f.set(x, act.apply(g, v), true);
    return up_close_from(std::move(f));
  }

  KFib with(const KFib& a, const KFib& b) const {
    KFib f = a;
    for (std::size_t i = 0; i < f.m.size(); ++i) f.m[i] = (a.m[i] && b.m[i]) ? 1 : 0;
    return f;
  }
  KFib plus(const KFib& a, const KFib& b) const {
    KFib f = a;
    for (std::size_t i = 0; i < f.m.size(); ++i) f.m[i] = (a.m[i] || b.m[i]) ? 1 : 0;
    return f;
  }

  bool leq(const KFib& a, const KFib& b) const {
    for (std::size_t i = 0; i < a.m.size(); ++i)
      if (a.m[i] && !b.m[i]) return false;
    return true;
  }

  KFib reindex(const FinArrow& fn, const KFib& a) const {
    KFib f = empty(fn.dom);
    for (int x = 0; x < fn.dom; ++x)
      for (int w = 0; w < W.n; ++w) f.set(x, w, a.at(fn.tbl[static_cast<std::size_t>(x)], w));
    return f;
  }

  std::string fib_str(const KFib& a) const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (int x = 0; x < a.nx; ++x)
      for (int w = 0; w < W.n; ++w)
        if (a.at(x, w)) {
          if (!first) os << " ";
          first = false;
          os << "(" << x << "," << w << ")";
        }
    os << "}";
    return os.str();
  }

  std::vector<KFib> sample_fibers(int n, unsigned seed, std::size_t cap) const {
    // up-sets of W
    std::vector<std::vector<char>> ups;
    for (int mask = 0; mask < (1 << W.n); ++mask) {
      bool ok = true;
      for (int w = 0; w < W.n && ok; ++w)
        if (mask & (1 << w))
          for (int w2 = 0; w2 < W.n; ++w2)
            if (W.le(w, w2) && !(mask & (1 << w2))) {
              ok = false;
              break;
            }
      if (!ok) continue;
      std::vector<char> u(static_cast<std::size_t>(W.n), 0);
      for (int w = 0; w < W.n; ++w) u[static_cast<std::size_t>(w)] = (mask >> w) & 1;
      ups.push_back(std::move(u));
    }
    std::vector<KFib> out;
    double total = std::pow(static_cast<double>(ups.size()), n);
    auto assemble = [&](const std::vector<std::size_t>& choice) {
      KFib f = empty(n);
      for (int x = 0; x < n; ++x)
        for (int w = 0; w < W.n; ++w)
          f.set(x, w, ups[choice[static_cast<std::size_t>(x)]][static_cast<std::size_t>(w)] != 0);
      return f;
    };
    if (total <= static_cast<double>(cap) + 0.5) {
      std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
      while (true) {
        out.push_back(assemble(idx));
        int k = 0;
        while (k < n && ++idx[static_cast<std::size_t>(k)] == ups.size())
          idx[static_cast<std::size_t>(k++)] = 0;
        if (k == n) break;
      }
    } else {
      std::mt19937 rng(seed + static_cast<unsigned>(n) * 104729u);
      std::uniform_int_distribution<std::size_t> pick(0, ups.size() - 1);
      std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
      for (std::size_t t = 0; t < cap; ++t) {
        for (auto& i : idx) i = pick(rng);
        out.push_back(assemble(idx));
      }
    }
    return out;
  }
};

// ---- the law suite ----

namespace detail {

template <class D>
struct LawRunner {
  const D& d;
  const LawSuiteOptions& opt;
  DoctrineReport& rep;

  template <class F>
  void law(const std::string& name, bool ok, F&& detail_fn) {
    ++rep.cases[name];
    if (!ok && rep.violations.size() < opt.max_violations)
      rep.violations.push_back({name, detail_fn()});
  }

  // Up-closure (or another instance-specific wellformedness) of produced fibers.
  template <class Fib>
  void check_wf(const Fib& f, const std::string& what) {
    if constexpr (requires { d.is_upclosed(f); })
      law("fiber-upclosed", d.is_upclosed(f), [&] { return what + ": " + d.fib_str(f); });
  }

  void run_carrier(int n) {
    auto F = d.sample_fibers(n, opt.seed, opt.max_fibers);
    if (F.empty()) return;
    auto K = d.kappa(n);
    std::mt19937 rng(opt.seed * 31u + static_cast<unsigned>(n));
    std::uniform_int_distribution<std::size_t> pick(0, F.size() - 1);
    auto at = [&] { return std::string(" (carrier ") + std::to_string(n) + ")"; };

    check_wf(K, "kappa");
    for (const auto& a : F) {
      law("order-refl", d.leq(a, a), [&] { return d.fib_str(a) + at(); });
      law("star-unit", d.leq(d.star(K, a), a) && d.leq(a, d.star(K, a)),
          [&] { return d.fib_str(a) + at(); });
      for (const auto& r : opt.grades) {
        if (!d.grade_ok(r)) continue;
        law("bang-kappa", d.leq(K, d.bang(r, K)), [&] { return "grade " + r.str() + at(); });
        if (d.grade_ok(d.R.zero()))
          law("bang-weakening", d.leq(d.bang(d.R.zero(), a), K),
              [&] { return d.fib_str(a) + at(); });
        if (d.grade_ok(d.R.one()))
          law("bang-counit", d.leq(d.bang(d.R.one(), a), a),
              [&] { return d.fib_str(a) + at(); });
        check_wf(d.bang(r, a), "bang " + r.str());
      }
    }

    bool exhaustive_pairs = F.size() * F.size() <= opt.max_pairs;
    std::size_t pairs = std::min(opt.max_pairs, F.size() * F.size());
    for (std::size_t t = 0; t < pairs; ++t) {
      const auto& a = F[exhaustive_pairs ? t / F.size() : pick(rng)];
      const auto& b = F[exhaustive_pairs ? t % F.size() : pick(rng)];
      law("star-comm", d.leq(d.star(a, b), d.star(b, a)),
          [&] { return d.fib_str(a) + " , " + d.fib_str(b) + at(); });
      check_wf(d.star(a, b), "star");
      for (const auto& r : opt.grades) {
        if (!d.grade_ok(r)) continue;
        law("bang-monoidal", d.leq(d.star(d.bang(r, a), d.bang(r, b)), d.bang(r, d.star(a, b))),
            [&] { return "grade " + r.str() + ": " + d.fib_str(a) + " , " + d.fib_str(b) + at(); });
        for (const auto& s : opt.grades) {
          if (!d.grade_ok(s)) continue;
          Grade add = d.R.add(r, s);
          if (d.grade_ok(add))
            law("bang-contraction", d.leq(d.bang(add, a), d.star(d.bang(r, a), d.bang(s, a))),
                [&] { return "grades " + r.str() + "," + s.str() + ": " + d.fib_str(a) + at(); });
          Grade mul = d.R.mul(r, s);
          if (d.grade_ok(mul))
            law("bang-comult", d.leq(d.bang(mul, a), d.bang(r, d.bang(s, a))),
                [&] { return "grades " + r.str() + "," + s.str() + ": " + d.fib_str(a) + at(); });
          if (d.R.leq(s, r) && d.leq(a, b))
            law("bang-contra", d.leq(d.bang(r, a), d.bang(s, b)), [&] {
              return "grades " + r.str() + " >= " + s.str() + ": " + d.fib_str(a) +
                     " <= " + d.fib_str(b) + at();
            });
        }
      }
      if (d.leq(a, b)) {
        const auto& c = F[pick(rng)];
        law("star-mono", d.leq(d.star(a, c), d.star(b, c)), [&] {
          return d.fib_str(a) + " <= " + d.fib_str(b) + " with " + d.fib_str(c) + at();
        });
      }
    }

    for (std::size_t t = 0; t < opt.max_triples; ++t) {
      const auto& a = F[pick(rng)];
      const auto& b = F[pick(rng)];
      const auto& c = F[pick(rng)];
      auto l = d.star(d.star(a, b), c);
      auto r = d.star(a, d.star(b, c));
      law("star-assoc", d.leq(l, r) && d.leq(r, l), [&] {
        return d.fib_str(a) + " , " + d.fib_str(b) + " , " + d.fib_str(c) + at();
      });
      if (d.leq(a, b) && d.leq(b, c))
        law("order-trans", d.leq(a, c), [&] {
          return d.fib_str(a) + " <= " + d.fib_str(b) + " <= " + d.fib_str(c) + at();
        });
    }
  }

  void run_arrows(int n, int m) {
    auto F = d.sample_fibers(m, opt.seed, std::min<std::size_t>(opt.max_fibers, 12));
    std::mt19937 rng(opt.seed * 77u + static_cast<unsigned>(n * 13 + m));
    std::vector<FinArrow> arrows;
    arrows.push_back(fin_const(n, m, 0));
    arrows.push_back(fin_const(n, m, m - 1));
    {
      FinArrow f{n, m, {}};
      for (int i = 0; i < n; ++i) f.tbl.push_back(i % m);
      arrows.push_back(std::move(f));
    }
    std::uniform_int_distribution<int> pick(0, m - 1);
    for (int t = 0; t < 3; ++t) {
      FinArrow g{n, m, {}};
      for (int i = 0; i < n; ++i) g.tbl.push_back(pick(rng));
      arrows.push_back(std::move(g));
    }
    FinArrow back{m, n, {}};
    for (int i = 0; i < m; ++i) back.tbl.push_back(i % n);

    auto at = [&] { return " (map " + std::to_string(n) + "->" + std::to_string(m) + ")"; };
    for (const auto& f : arrows) {
      auto km = d.kappa(m);
      auto kn = d.kappa(n);
      auto rk = d.reindex(f, km);
      law("reindex-kappa", d.leq(rk, kn) && d.leq(kn, rk), [&] { return at(); });
      for (const auto& a : F) {
        auto ra = d.reindex(f, a);
        check_wf(ra, "reindex");
        for (const auto& b : F) {
          auto l = d.reindex(f, d.star(a, b));
          auto r = d.star(ra, d.reindex(f, b));
          law("reindex-star", d.leq(l, r) && d.leq(r, l),
              [&] { return d.fib_str(a) + " , " + d.fib_str(b) + at(); });
        }
        for (const auto& g : opt.grades) {
          if (!d.grade_ok(g)) continue;
          auto l = d.reindex(f, d.bang(g, a));
          auto r = d.bang(g, ra);
          law("reindex-bang", d.leq(l, r) && d.leq(r, l),
              [&] { return "grade " + g.str() + ": " + d.fib_str(a) + at(); });
        }
        {
          auto l = d.reindex(fin_compose(f, back), a);
          auto r = d.reindex(back, ra);
          law("reindex-comp", d.leq(l, r) && d.leq(r, l), [&] { return d.fib_str(a) + at(); });
        }
      }
    }
    auto Fn = d.sample_fibers(n, opt.seed, std::min<std::size_t>(opt.max_fibers, 12));
    for (const auto& a : Fn) {
      auto r = d.reindex(fin_id(n), a);
      law("reindex-id", d.leq(r, a) && d.leq(a, r),
          [&] { return d.fib_str(a) + " (carrier " + std::to_string(n) + ")"; });
    }
  }
};

}  // namespace detail

template <class D>
DoctrineReport doctrine_law_suite(const D& d, const LawSuiteOptions& opt = {}) {
  DoctrineReport rep;
  detail::LawRunner<D> r{d, opt, rep};
  for (int n : opt.carriers)
    if (n > 0) r.run_carrier(n);
  for (int n : opt.carriers)
    for (int m : opt.carriers)
      if (n > 0 && m > 0) r.run_arrows(n, m);
  return rep;
}

// Base-structure checks specific to the Kripke instance.
inline DoctrineReport kripke_structure_laws(const KripkeDoctrine& d) {
  DoctrineReport rep = check_ord_monoid(d.W);
  rep.merge(check_graded_action(d.W, d.act, d.R));
  return rep;
}

// ---- quantale fragment structure: residuals, lattice, quantifiers ----

// Checks the defining biconditionals of the extra connectives and the
// naturality of the whole structure under reindexing, including quantifier
// base-change squares.  Quantifiers are taken along the projection
// A x B -> B with |A| = na, |B| = nb.
inline DoctrineReport quantale_fragment_report(const QuantaleDoctrine& d, int na, int nb,
                                               const LawSuiteOptions& opt = {}) {
  DoctrineReport rep;
  auto law = [&](const std::string& name, bool ok, const std::string& detail) {
    ++rep.cases[name];
    if (!ok && rep.violations.size() < opt.max_violations)
      rep.violations.push_back({name, detail});
  };
  int nab = na * nb;
  auto Fab = d.sample_fibers(nab, opt.seed, opt.max_fibers);
  auto Fb = d.sample_fibers(nb, opt.seed ^ 0x7u, std::min<std::size_t>(opt.max_fibers, 12));
  FinArrow proj = fin_proj2(na, nb);

  std::mt19937 rng(opt.seed * 131u);
  std::uniform_int_distribution<std::size_t> pick(0, Fab.size() - 1);

  // adjunction biconditionals over sampled triples on the product carrier
  for (std::size_t t = 0; t < opt.max_triples; ++t) {
    const auto& a = Fab[pick(rng)];
    const auto& b = Fab[pick(rng)];
    const auto& c = Fab[pick(rng)];
    std::string w = qfib_str(a) + " , " + qfib_str(b) + " , " + qfib_str(c);
    law("residual-adjunction", d.leq(d.star(c, a), b) == d.leq(c, d.lolli(a, b)), w);
    law("meet-glb", d.leq(c, d.with(a, b)) == (d.leq(c, a) && d.leq(c, b)), w);
    law("join-lub", d.leq(d.plus(a, b), c) == (d.leq(a, c) && d.leq(b, c)), w);
    law("top-greatest", d.leq(a, d.top(nab)), qfib_str(a));
    law("bottom-least", d.leq(d.bottom(nab), a), qfib_str(a));
  }

  // quantifier adjunctions along the projection
  for (const auto& a : Fab)
    for (const auto& b : Fb) {
      std::string w = qfib_str(a) + " | " + qfib_str(b);
      law("exists-adjunction", d.leq(d.q_exists(proj, a), b) == d.leq(a, d.reindex(proj, b)), w);
      law("forall-adjunction", d.leq(b, d.q_forall(proj, a)) == d.leq(d.reindex(proj, b), a), w);
      // Frobenius reciprocity for the existential
      auto l = d.q_exists(proj, d.star(d.reindex(proj, b), a));
      auto r = d.star(b, d.q_exists(proj, a));
      law("exists-frobenius", d.leq(l, r) && d.leq(r, l), w);
    }

  // naturality of residual/meet/join under reindexing along sampled maps
  std::vector<FinArrow> maps;
  maps.push_back(fin_const(nb, nab, 0));
  {
    FinArrow f{nb, nab, {}};
    for (int i = 0; i < nb; ++i) f.tbl.push_back(i % nab);
    maps.push_back(std::move(f));
  }
  for (const auto& f : maps)
    for (const auto& a : Fab)
      for (const auto& b : Fab) {
        std::string w = qfib_str(a) + " , " + qfib_str(b);
        auto chk = [&](const char* name, const QFib& lhs, const QFib& rhs) {
          law(name, d.leq(lhs, rhs) && d.leq(rhs, lhs), w);
        };
        chk("reindex-lolli", d.reindex(f, d.lolli(a, b)),
            d.lolli(d.reindex(f, a), d.reindex(f, b)));
        chk("reindex-meet", d.reindex(f, d.with(a, b)), d.with(d.reindex(f, a), d.reindex(f, b)));
        chk("reindex-join", d.reindex(f, d.plus(a, b)), d.plus(d.reindex(f, a), d.reindex(f, b)));
      }

  // base change: pulling back along id x g commutes with the quantifiers
  std::vector<FinArrow> gs;
  gs.push_back(fin_const(nb, nb, 0));
  {
    FinArrow g{nb, nb, {}};
    for (int i = 0; i < nb; ++i) g.tbl.push_back((i + 1) % nb);
    gs.push_back(std::move(g));
  }
  for (const auto& g : gs) {
    FinArrow idg = fin_id_times(na, g);
    for (const auto& a : Fab) {
      auto pulled = d.reindex(idg, a);
      std::string w = qfib_str(a);
      auto l1 = d.q_exists(proj, pulled);
      auto r1 = d.reindex(g, d.q_exists(proj, a));
      law("exists-base-change", d.leq(l1, r1) && d.leq(r1, l1), w);
      auto l2 = d.q_forall(proj, pulled);
      auto r2 = d.reindex(g, d.q_forall(proj, a));
      law("forall-base-change", d.leq(l2, r2) && d.leq(r2, l2), w);
    }
  }
  return rep;
}

// With bang = identity, the graded-modality axioms collapse to two order
// facts; the suite verifies the equivalence on a given instance.
struct IdentityModalityCheck {
  bool axioms_pass = true;
  bool kappa_top = true;
  bool meet_below_star = true;
};

inline IdentityModalityCheck identity_modality_check(const QuantaleDoctrine& d,
                                                     const std::vector<int>& carriers,
                                                     unsigned seed = 20240817,
                                                     std::size_t cap = 36) {
  IdentityModalityCheck out;
  for (int n : carriers) {
    auto F = d.sample_fibers(n, seed, cap);
    auto K = d.kappa(n);
    for (const auto& a : F) {
      if (!d.leq(a, K)) {
        out.kappa_top = false;
        out.axioms_pass = false;  // weakening with identity bang
      }
      if (!d.leq(a, d.star(a, a))) out.axioms_pass = false;  // contraction with identity bang
      for (const auto& b : F)
        if (!d.leq(d.with(a, b), d.star(a, b))) out.meet_below_star = false;
    }
  }
  return out;
}

}  // namespace grail
