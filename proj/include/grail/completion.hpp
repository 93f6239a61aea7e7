#pragma once

// Distance spaces inside a doctrine instance and the completion built on them:
// fiber-valued distances with their axioms, grade-tracked arrows between
// spaces, descent data (elements substitutive along a distance up to a grade),
// witness search (analytic for the quantale instance, bounded enumeration
// otherwise), the product/terminal structure with explicitly transported
// witnesses, closure of descent data under the connectives, and the
// classification of elements as affine / replicable / bang-intuitionistic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "grail/doctrine.hpp"
#include "grail/grade.hpp"
#include "grail/metrics.hpp"

namespace grail {

// ---- extra finite-map builders (pairs are row-major: (a, b) -> a * nb + b) ----

inline FinArrow fin_diag(int n) {
  FinArrow f{n, n * n, {}};
  f.tbl.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) f.tbl.push_back(a * n + a);
  return f;
}

inline FinArrow fin_swap2(int n) {
  FinArrow f{n * n, n * n, {}};
  f.tbl.reserve(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) f.tbl.push_back(b * n + a);
  return f;
}

// projection A x B -> A (fin_proj2 is the other one)
inline FinArrow fin_proj1(int na, int nb) {
  FinArrow f{na * nb, na, {}};
  f.tbl.reserve(static_cast<std::size_t>(na) * nb);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b) f.tbl.push_back(a);
  return f;
}

// <f, g>: X -> A x B from f: X -> A and g: X -> B
inline FinArrow fin_pair(const FinArrow& f, const FinArrow& g) {
  if (f.dom != g.dom) throw GrailError("fin_pair: domain mismatch");
  FinArrow h{f.dom, f.cod * g.cod, {}};
  h.tbl.reserve(static_cast<std::size_t>(f.dom));
  for (int x = 0; x < f.dom; ++x)
    h.tbl.push_back(f.tbl[static_cast<std::size_t>(x)] * g.cod +
                    g.tbl[static_cast<std::size_t>(x)]);
  return h;
}

// f x g: X x Y -> A x B
inline FinArrow fin_times(const FinArrow& f, const FinArrow& g) {
  FinArrow h{f.dom * g.dom, f.cod * g.cod, {}};
  h.tbl.reserve(static_cast<std::size_t>(f.dom) * g.dom);
  for (int x = 0; x < f.dom; ++x)
    for (int y = 0; y < g.dom; ++y)
      h.tbl.push_back(f.tbl[static_cast<std::size_t>(x)] * g.cod +
                      g.tbl[static_cast<std::size_t>(y)]);
  return h;
}

// the two-of-three projections A^3 -> A^2 (triple index a*n^2 + b*n + c)
inline FinArrow fin_triple_proj(int n, int i, int j) {
  FinArrow f{n * n * n, n * n, {}};
  f.tbl.reserve(static_cast<std::size_t>(n) * n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        int comp[3] = {a, b, c};
        f.tbl.push_back(comp[i] * n + comp[j]);
      }
  return f;
}

// ---- distance spaces ----

template <class D>
struct DistanceSpaceT {
  int n = 0;
  typename D::Fib rho;  // fiber over the pair carrier n * n
};

using QDistSpace = DistanceSpaceT<QuantaleDoctrine>;
using KDistSpace = DistanceSpaceT<KripkeDoctrine>;

inline QDistSpace space_from_metric(const MetSpace& s) {
  QDistSpace out;
  out.n = s.size();
  out.rho.v.reserve(static_cast<std::size_t>(out.n) * out.n);
  for (int i = 0; i < out.n; ++i)
    for (int j = 0; j < out.n; ++j) out.rho.v.push_back(s.d(i, j).to_double());
  return out;
}

// zero on the diagonal, unreachable off it
inline QFib kronecker_distance(int n) {
  QFib f;
  f.v.assign(static_cast<std::size_t>(n) * n, val_inf());
  for (int a = 0; a < n; ++a) f.v[static_cast<std::size_t>(a) * n + a] = 0.0;
  return f;
}

// Reflexivity, symmetry, the star-triangle inequality, and affineness of a
// candidate distance fiber; violations are reported under stable law names.
template <class D>
DoctrineReport check_distance(const D& d, const DistanceSpaceT<D>& s) {
  DoctrineReport rep;
  auto law = [&](const std::string& name, bool ok) {
    ++rep.cases[name];
    if (!ok) rep.violations.push_back({name, d.fib_str(s.rho) + " (carrier " + std::to_string(s.n) + ")"});
  };
  int n = s.n;
  law("dist-reflexivity", d.leq(d.kappa(n), d.reindex(fin_diag(n), s.rho)));
  law("dist-symmetry", d.leq(s.rho, d.reindex(fin_swap2(n), s.rho)));
  auto r12 = d.reindex(fin_triple_proj(n, 0, 1), s.rho);
  auto r23 = d.reindex(fin_triple_proj(n, 1, 2), s.rho);
  auto r13 = d.reindex(fin_triple_proj(n, 0, 2), s.rho);
  law("dist-transitivity", d.leq(d.star(r12, r23), r13));
  law("dist-affine", d.leq(s.rho, d.kappa(n * n)));
  return rep;
}

// rho x| sigma: the distance on the product carrier combining both components.
template <class D>
DistanceSpaceT<D> distance_product(const D& d, const DistanceSpaceT<D>& a,
                                   const DistanceSpaceT<D>& b) {
  int na = a.n, nb = b.n, nm = na * nb;
  // (A x B)^2 -> A^2 and -> B^2, ((x,y),(x',y')) to (x,x') and (y,y')
  FinArrow pa{nm * nm, na * na, {}}, pb{nm * nm, nb * nb, {}};
  pa.tbl.reserve(static_cast<std::size_t>(nm) * nm);
  pb.tbl.reserve(static_cast<std::size_t>(nm) * nm);
  for (int x = 0; x < na; ++x)
    for (int y = 0; y < nb; ++y)
      for (int x2 = 0; x2 < na; ++x2)
        for (int y2 = 0; y2 < nb; ++y2) {
          pa.tbl.push_back(x * na + x2);
          pb.tbl.push_back(y * nb + y2);
        }
  DistanceSpaceT<D> out;
  out.n = nm;
  out.rho = d.star(d.reindex(pa, a.rho), d.reindex(pb, b.rho));
  return out;
}

// ---- tracking predicates ----

struct LipschitzWitness {
  FinArrow f;
  Grade r;
};

struct DescentCertificate {
  Grade r;
};

// !_r rho <= (f x f)* sigma: the arrow f moves points apart by at most r.
template <class D>
bool tracks_arrow(const D& d, const Grade& r, const FinArrow& f, const DistanceSpaceT<D>& rho,
                  const DistanceSpaceT<D>& sigma) {
  if (!d.grade_ok(r)) return false;
  return d.leq(d.bang(r, rho.rho), d.reindex(fin_times(f, f), sigma.rho));
}

// pi1* alpha * !_r rho <= pi2* alpha: alpha is substitutive along rho at cost r.
template <class D>
bool tracks_element(const D& d, const Grade& r, const typename D::Fib& alpha,
                    const DistanceSpaceT<D>& rho) {
  if (!d.grade_ok(r)) return false;
  auto a1 = d.reindex(fin_proj1(rho.n, rho.n), alpha);
  auto a2 = d.reindex(fin_proj2(rho.n, rho.n), alpha);
  return d.leq(d.star(a1, d.bang(r, rho.rho)), a2);
}

// Rational reconstruction of a ratio of table values (continued fractions).
inline Grade grade_from_ratio(double v) {
  if (std::isinf(v)) return Grade::infinity();
  if (!(v > 0)) return Grade(0);
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = v;
  for (int it = 0; it < 48; ++it) {
    long long a = static_cast<long long>(std::floor(x));
    long long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > (1ll << 30) || q2 <= 0) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - v) <=
        1e-12 * std::max(1.0, v))
      break;
    double rem = x - static_cast<double>(a);
    if (rem < 1e-15) break;
    x = 1.0 / rem;
  }
  if (q1 <= 0) return Grade(static_cast<long long>(std::llround(v)));
  return Grade(Rq(p1, q1));
}

// Minimal tracking grade for an arrow between quantale spaces: the largest
// ratio sigma(f x, f x') / rho(x, x'), with rho = 0 demanding sigma = 0,
// rho = inf imposing no constraint, and an infinite target forcing grade inf.
inline std::optional<LipschitzWitness> find_arrow_witness(const QuantaleDoctrine& d,
                                                          const FinArrow& f,
                                                          const QDistSpace& rho,
                                                          const QDistSpace& sigma) {
  int n = rho.n, m = sigma.n;
  double needed = 0.0;
  bool needs_positive = false;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double x = rho.rho.v[static_cast<std::size_t>(a) * n + b];
      double y = sigma.rho.v[static_cast<std::size_t>(f.tbl[static_cast<std::size_t>(a)]) * m +
                             f.tbl[static_cast<std::size_t>(b)]];
      if (y <= d.eps) continue;
      if (x == 0.0) return std::nullopt;
      if (std::isinf(x)) {
        needs_positive = true;
        continue;
      }
      needed = std::max(needed, std::isinf(y) ? val_inf() : y / x);
    }
  if (needed == 0.0 && needs_positive) needed = 1.0;
  Grade r = grade_from_ratio(needed);
  if (!tracks_arrow(d, r, f, rho, sigma)) return std::nullopt;
  return LipschitzWitness{f, r};
}

// Minimal grade certifying alpha as descent data along rho, by the same
// per-pair analysis applied to the gaps alpha(x') - alpha(x).
inline std::optional<DescentCertificate> in_descent(const QuantaleDoctrine& d, const QFib& alpha,
                                                    const QDistSpace& rho) {
  int n = rho.n;
  double needed = 0.0;
  bool needs_positive = false;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double x = rho.rho.v[static_cast<std::size_t>(a) * n + b];
      double y0 = alpha.v[static_cast<std::size_t>(a)];
      double y1 = alpha.v[static_cast<std::size_t>(b)];
      if (y0 >= y1 - d.eps) continue;
      if (x == 0.0) return std::nullopt;
      if (std::isinf(x)) {
        needs_positive = true;
        continue;
      }
      needed = std::max(needed, std::isinf(y1) ? val_inf() : (y1 - y0) / x);
    }
  if (needed == 0.0 && needs_positive) needed = 1.0;
  Grade r = grade_from_ratio(needed);
  if (!tracks_element(d, r, alpha, rho)) return std::nullopt;
  return DescentCertificate{r};
}

// Bounded searches for instances without an analytic minimum: try candidate
// grades in the given order and return the first that verifies.
template <class D>
std::optional<LipschitzWitness> find_arrow_witness_bounded(const D& d, const FinArrow& f,
                                                           const DistanceSpaceT<D>& rho,
                                                           const DistanceSpaceT<D>& sigma,
                                                           const std::vector<Grade>& candidates) {
  for (const auto& r : candidates)
    if (d.grade_ok(r) && tracks_arrow(d, r, f, rho, sigma)) return LipschitzWitness{f, r};
  return std::nullopt;
}

template <class D>
std::optional<DescentCertificate> in_descent_bounded(const D& d, const typename D::Fib& alpha,
                                                     const DistanceSpaceT<D>& rho,
                                                     const std::vector<Grade>& candidates) {
  for (const auto& r : candidates)
    if (d.grade_ok(r) && tracks_element(d, r, alpha, rho)) return DescentCertificate{r};
  return std::nullopt;
}

// ---- grid enumeration of spaces ----

// All symmetric zero-diagonal tables over the value grid that satisfy the
// distance axioms; the free upper-triangle entries range over the grid.
inline std::vector<QDistSpace> enumerate_grid_distances(const QuantaleDoctrine& d, int n) {
  std::vector<QDistSpace> out;
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  std::vector<std::size_t> idx(slots.size(), 0);
  while (true) {
    QDistSpace s;
    s.n = n;
    s.rho.v.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (std::size_t k = 0; k < slots.size(); ++k) {
      double v = d.value_grid[idx[k]];
      s.rho.v[static_cast<std::size_t>(slots[k].first) * n + slots[k].second] = v;
      s.rho.v[static_cast<std::size_t>(slots[k].second) * n + slots[k].first] = v;
    }
    if (check_distance(d, s).ok()) out.push_back(std::move(s));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == d.value_grid.size()) idx[k++] = 0;
    if (k == idx.size()) break;
    if (slots.empty()) break;
  }
  return out;
}

// ---- direct images (left adjoints to reindexing) in the quantale instance ----

inline QFib q_direct_image(const QuantaleDoctrine&, const FinArrow& f, const QFib& alpha) {
  QFib out;
  out.v.assign(static_cast<std::size_t>(f.cod), val_inf());
  for (int x = 0; x < f.dom; ++x) {
    auto& slot = out.v[static_cast<std::size_t>(f.tbl[static_cast<std::size_t>(x)])];
    slot = std::min(slot, alpha.v[static_cast<std::size_t>(x)]);
  }
  return out;
}

// ---- element classification ----

struct ElementClass {
  bool affine = false;
  bool replicable = false;
  bool bang_intuitionistic = false;  // alpha <= !_r alpha for every grade
  bool probe_agrees = false;         // probe grades and the exact rule coincide
};

inline ElementClass classify_element(const QuantaleDoctrine& d, const QFib& alpha,
                                     std::vector<Grade> probes = {}) {
  if (probes.empty())
    probes = {Grade(0), Grade(1, 2), Grade(1), Grade(2), Grade::infinity()};
  ElementClass out;
  out.affine = d.leq(alpha, d.kappa(static_cast<int>(alpha.v.size())));
  out.replicable = d.leq(alpha, d.star(alpha, alpha));
  bool probe_ok = true;
  for (const auto& r : probes) probe_ok = probe_ok && d.leq(alpha, d.bang(r, alpha));
  bool exact = true;
  for (double v : alpha.v) exact = exact && (v == 0.0 || std::isinf(v));
  out.bang_intuitionistic = exact;
  out.probe_agrees = probe_ok == exact;
  return out;
}

// ---- the axiom table for a family of spaces ----

// For each space: the distance axioms, a substitutivity witness for every
// sampled element, the unit space laws; for sampled pairs and triples of
// spaces: the product distance with its projection and pairing witnesses,
// composition of tracked arrows, and closure of certified elements under
// star, kappa, and bang — every certificate is constructed from the input
// certificates and then re-verified numerically.
inline DoctrineReport verify_lip_axioms(const QuantaleDoctrine& d,
                                        const std::vector<QDistSpace>& spaces,
                                        const LawSuiteOptions& opt = {}) {
  DoctrineReport rep;
  auto law = [&](const std::string& name, bool ok, const std::string& detail) {
    ++rep.cases[name];
    if (!ok && rep.violations.size() < opt.max_violations) rep.violations.push_back({name, detail});
  };
  QDistSpace unit_space;
  unit_space.n = 1;
  unit_space.rho = d.kappa(1);

  for (const auto& s : spaces) {
    rep.merge(check_distance(d, s));
    std::string at = " (carrier " + std::to_string(s.n) + " " + d.fib_str(s.rho) + ")";

    auto F = d.sample_fibers(s.n, opt.seed, opt.max_fibers);
    for (const auto& alpha : F) {
      auto cert = in_descent(d, alpha, s);
      law("substitutivity-witness", cert.has_value(), d.fib_str(alpha) + at);
    }

    law("identity-witness", tracks_arrow(d, Grade(1), fin_id(s.n), s, s), at);
    law("terminal-witness", tracks_arrow(d, Grade(0), fin_const(s.n, 1, 0), s, unit_space), at);
    law("des-kappa", tracks_element(d, Grade(0), d.kappa(s.n), s), at);

    // unit space cancels in the product, entry by entry
    auto up = distance_product(d, s, unit_space);
    law("unit-cancel", d.leq(up.rho, s.rho) && d.leq(s.rho, up.rho), at);

    // the canonical structure map followed by the forgetful one is the identity
    QDistSpace round = s;
    law("counit-identity",
        round.n == s.n && d.leq(round.rho, s.rho) && d.leq(s.rho, round.rho), at);

    // closure of certified elements under star and bang
    std::size_t limit = std::min<std::size_t>(F.size(), 8);
    for (std::size_t i = 0; i < limit; ++i) {
      auto ca = in_descent(d, F[i], s);
      if (!ca) continue;
      for (std::size_t j = 0; j < limit; ++j) {
        auto cb = in_descent(d, F[j], s);
        if (!cb) continue;
        law("des-star", tracks_element(d, ca->r + cb->r, d.star(F[i], F[j]), s),
            d.fib_str(F[i]) + " , " + d.fib_str(F[j]) + at);
      }
      for (const auto& g : opt.grades)
        law("des-bang", tracks_element(d, g * ca->r, d.bang(g, F[i]), s),
            "grade " + g.str() + ": " + d.fib_str(F[i]) + at);
    }
  }

  law("unit-distance",
      d.leq(unit_space.rho, d.kappa(1)) && d.leq(d.kappa(1), unit_space.rho), "terminal space");

  // pair- and triple-indexed checks over a seeded subsample
  if (spaces.empty()) return rep;
  std::mt19937 rng(opt.seed * 8191u + 17u);
  std::uniform_int_distribution<std::size_t> pick(0, spaces.size() - 1);
  std::size_t pair_budget = std::min<std::size_t>(opt.max_pairs, spaces.size() * spaces.size());
  for (std::size_t t = 0; t < pair_budget; ++t) {
    const auto& A = spaces[pick(rng)];
    const auto& B = spaces[pick(rng)];
    const auto& C = spaces[pick(rng)];
    auto AB = distance_product(d, A, B);
    std::string at = " (carriers " + std::to_string(A.n) + "," + std::to_string(B.n) + ")";

    {
      auto sub = check_distance(d, AB);
      ++rep.cases["product-distance"];
      if (!sub.ok() && rep.violations.size() < opt.max_violations)
        rep.violations.push_back({"product-distance", sub.violations.front().detail + at});
    }

    // the product table agrees with the componentwise sum, entry by entry
    {
      bool ok = true;
      int na = A.n, nb = B.n, nm = na * nb;
      for (int x = 0; x < na && ok; ++x)
        for (int y = 0; y < nb && ok; ++y)
          for (int x2 = 0; x2 < na && ok; ++x2)
            for (int y2 = 0; y2 < nb && ok; ++y2) {
              double want = A.rho.v[static_cast<std::size_t>(x) * na + x2] +
                            B.rho.v[static_cast<std::size_t>(y) * nb + y2];
              double got = AB.rho.v[static_cast<std::size_t>(x * nb + y) * nm + (x2 * nb + y2)];
              ok = got == want || (std::isinf(got) && std::isinf(want));
            }
      law("product-pointwise", ok, at);
    }

    law("product-proj-left", tracks_arrow(d, Grade(1), fin_proj1(A.n, B.n), AB, A), at);
    law("product-proj-right", tracks_arrow(d, Grade(1), fin_proj2(A.n, B.n), AB, B), at);

    // cones out of C: pair the tracked legs with the summed witness
    std::vector<FinArrow> legsA, legsB, legsAB;
    legsA.push_back(fin_const(C.n, A.n, 0));
    legsB.push_back(fin_const(C.n, B.n, 0));
    {
      FinArrow f{C.n, A.n, {}}, g{C.n, B.n, {}};
      for (int i = 0; i < C.n; ++i) {
        f.tbl.push_back(i % A.n);
        g.tbl.push_back((i + 1) % B.n);
      }
      legsA.push_back(std::move(f));
      legsB.push_back(std::move(g));
    }
    for (const auto& f : legsA)
      for (const auto& g : legsB) {
        auto wf = find_arrow_witness(d, f, C, A);
        auto wg = find_arrow_witness(d, g, C, B);
        if (!wf || !wg) continue;
        law("pairing-witness", tracks_arrow(d, wf->r + wg->r, fin_pair(f, g), C, AB),
            "witnesses " + wf->r.str() + " + " + wg->r.str() + at);
      }

    // composition of tracked arrows multiplies the witnesses
    {
      FinArrow f{A.n, B.n, {}}, g{B.n, C.n, {}};
      for (int i = 0; i < A.n; ++i) f.tbl.push_back(i % B.n);
      for (int i = 0; i < B.n; ++i) g.tbl.push_back(i % C.n);
      auto wf = find_arrow_witness(d, f, A, B);
      auto wg = find_arrow_witness(d, g, B, C);
      if (wf && wg) {
        law("composition-witness",
            tracks_arrow(d, wg->r * wf->r, fin_compose(g, f), A, C),
            "witnesses " + wg->r.str() + " * " + wf->r.str() + at);
        // reindexing a certified element along a tracked arrow
        auto FB = d.sample_fibers(B.n, opt.seed ^ 0x55u, 6);
        for (const auto& beta : FB) {
          auto cb = in_descent(d, beta, B);
          if (!cb) continue;
          law("reindex-descent",
              tracks_element(d, cb->r * wf->r, d.reindex(f, beta), A),
              "certificate " + cb->r.str() + " * " + wf->r.str() + at);
        }
      }
    }
  }
  return rep;
}

// Transported certificates for the derived connectives: each new element is
// certified by the grade assembled from the input certificates, then the
// certificate is re-verified numerically.
inline DoctrineReport fragment_transport_report(const QuantaleDoctrine& d,
                                                const std::vector<QDistSpace>& spaces,
                                                const LawSuiteOptions& opt = {}) {
  DoctrineReport rep;
  auto law = [&](const std::string& name, bool ok, const std::string& detail) {
    ++rep.cases[name];
    if (!ok && rep.violations.size() < opt.max_violations) rep.violations.push_back({name, detail});
  };
  for (const auto& s : spaces) {
    std::string at = " (carrier " + std::to_string(s.n) + " " + d.fib_str(s.rho) + ")";
    law("top-transport", tracks_element(d, Grade(0), d.top(s.n), s), at);
    law("bottom-transport", tracks_element(d, Grade(0), d.bottom(s.n), s), at);
    law("kappa-transport", tracks_element(d, Grade(0), d.kappa(s.n), s), at);

    auto F = d.sample_fibers(s.n, opt.seed, std::min<std::size_t>(opt.max_fibers, 12));
    for (const auto& alpha : F) {
      auto ca = in_descent(d, alpha, s);
      if (!ca) continue;
      for (const auto& beta : F) {
        auto cb = in_descent(d, beta, s);
        if (!cb) continue;
        Grade sum = ca->r + cb->r;
        Grade join = d.R.join(ca->r, cb->r).value();
        std::string w = d.fib_str(alpha) + " , " + d.fib_str(beta) + at;
        law("lolli-transport", tracks_element(d, sum, d.lolli(alpha, beta), s), w);
        law("meet-transport", tracks_element(d, join, d.with(alpha, beta), s), w);
        law("join-transport", tracks_element(d, join, d.plus(alpha, beta), s), w);
      }
    }
  }

  // quantifiers along a projection: certificates transport unchanged
  std::size_t limit = std::min<std::size_t>(spaces.size(), 26);
  for (std::size_t i = 0; i < limit; ++i)
    for (std::size_t j = 0; j < limit; ++j) {
      const auto& A = spaces[i];
      const auto& B = spaces[j];
      if (A.n * B.n > 9) continue;
      auto AB = distance_product(d, A, B);
      FinArrow proj = fin_proj2(A.n, B.n);
      auto G = d.sample_fibers(A.n * B.n, opt.seed ^ 0x33u, std::min<std::size_t>(opt.max_fibers, 12));
      for (const auto& gamma : G) {
        auto cg = in_descent(d, gamma, AB);
        if (!cg) continue;
        std::string w = d.fib_str(gamma) + " (carriers " + std::to_string(A.n) + "," +
                        std::to_string(B.n) + ")";
        law("exists-transport", tracks_element(d, cg->r, d.q_exists(proj, gamma), B), w);
        law("forall-transport", tracks_element(d, cg->r, d.q_forall(proj, gamma), B), w);
      }
    }
  return rep;
}

// Restriction to the spaces whose distance is bang-intuitionistic, re-checked
// against the ungraded reflexivity + substitutivity axioms.
struct IntuitionisticRestriction {
  std::vector<std::size_t> kept;  // indices into the input list
  DoctrineReport elementary;
};

inline IntuitionisticRestriction elementary_restriction(const QuantaleDoctrine& d,
                                                        const std::vector<QDistSpace>& spaces,
                                                        const LawSuiteOptions& opt = {}) {
  IntuitionisticRestriction out;
  auto law = [&](const std::string& name, bool ok, const std::string& detail) {
    ++out.elementary.cases[name];
    if (!ok && out.elementary.violations.size() < opt.max_violations)
      out.elementary.violations.push_back({name, detail});
  };
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    const auto& s = spaces[i];
    if (!classify_element(d, s.rho).bang_intuitionistic) continue;
    out.kept.push_back(i);
    std::string at = " (carrier " + std::to_string(s.n) + " " + d.fib_str(s.rho) + ")";
    int n = s.n;
    law("elementary-reflexivity", d.leq(d.kappa(n), d.reindex(fin_diag(n), s.rho)), at);
    // ungraded substitutivity over X x A for small X
    for (int nx : {1, 2}) {
      int full = nx * n * n;
      FinArrow p12{full, nx * n, {}}, p23{full, n * n, {}}, p13{full, nx * n, {}};
      for (int x = 0; x < nx; ++x)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            p12.tbl.push_back(x * n + a);
            p23.tbl.push_back(a * n + b);
            p13.tbl.push_back(x * n + b);
          }
      auto F = d.sample_fibers(nx * n, opt.seed ^ 0x11u, std::min<std::size_t>(opt.max_fibers, 18));
      for (const auto& alpha : F)
        law("elementary-substitutivity",
            d.leq(d.star(d.reindex(p12, alpha), d.reindex(p23, s.rho)), d.reindex(p13, alpha)),
            d.fib_str(alpha) + at);
    }
  }
  return out;
}

}  // namespace grail
