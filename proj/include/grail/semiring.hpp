#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "grail/grade.hpp"

namespace grail {

enum class SemiringKind { Trivial, Nat, NatInf, NonnegReal };

struct LawViolation {
  std::string law;
  std::string detail;
};

// Resource semiring: partially ordered carrier with a commutative additive
// monoid and a multiplicative monoid, both monotone, multiplication
// distributing over addition and 0 annihilating.
struct Semiring {
  SemiringKind kind = SemiringKind::NonnegReal;

  static std::optional<Semiring> by_name(const std::string& n) {
    if (n == "trivial") return Semiring{SemiringKind::Trivial};
    if (n == "nat") return Semiring{SemiringKind::Nat};
    if (n == "nat-inf") return Semiring{SemiringKind::NatInf};
    if (n == "nonneg-real") return Semiring{SemiringKind::NonnegReal};
    return std::nullopt;
  }

  std::string name() const {
    switch (kind) {
      case SemiringKind::Trivial: return "trivial";
      case SemiringKind::Nat: return "nat";
      case SemiringKind::NatInf: return "nat-inf";
      case SemiringKind::NonnegReal: return "nonneg-real";
    }
    return "?";
  }

  bool contains(const Grade& g) const {
    switch (kind) {
      case SemiringKind::Trivial: return g.inf;
      case SemiringKind::Nat: return g.integral() && !g.negative();
      case SemiringKind::NatInf: return g.inf || (g.integral() && !g.negative());
      case SemiringKind::NonnegReal: return !g.inf && !g.negative();
    }
    return false;
  }

  Grade zero() const { return kind == SemiringKind::Trivial ? Grade::infinity() : Grade(0); }
  Grade one() const { return kind == SemiringKind::Trivial ? Grade::infinity() : Grade(1); }

  Grade add(const Grade& a, const Grade& b) const {
    if (kind == SemiringKind::Trivial) return Grade::infinity();
    return a + b;
  }
  Grade mul(const Grade& a, const Grade& b) const {
    if (kind == SemiringKind::Trivial) return Grade::infinity();
    return a * b;  // 0 annihilates, inf absorbs otherwise
  }

  // The order: numeric for nonneg-real, discrete (equality) for nat and
  // nat-inf, trivial on the one-element carrier.
  bool leq(const Grade& a, const Grade& b) const {
    switch (kind) {
      case SemiringKind::Trivial: return true;
      case SemiringKind::Nat:
      case SemiringKind::NatInf: return a == b;
      case SemiringKind::NonnegReal: return a <= b;
    }
    return false;
  }

  // Binary suprema exist only in the chain-ordered instances; the additive
  // connectives of the extended fragment need them.
  bool has_join() const {
    return kind == SemiringKind::NonnegReal || kind == SemiringKind::Trivial;
  }
  std::optional<Grade> join(const Grade& a, const Grade& b) const {
    if (kind == SemiringKind::Trivial) return Grade::infinity();
    if (kind == SemiringKind::NonnegReal) return grade_max(a, b);
    if (a == b) return a;
    return std::nullopt;
  }

  // Finite witness pool for bounded searches (discrete instances). The
  // nonneg-real instance is handled analytically by callers; its pool is the
  // empty set.
  std::vector<Grade> enumerate(long long cap) const {
    std::vector<Grade> out;
    switch (kind) {
      case SemiringKind::Trivial: out.push_back(Grade::infinity()); break;
      case SemiringKind::Nat:
        for (long long i = 0; i <= cap; ++i) out.emplace_back(i);
        break;
      case SemiringKind::NatInf:
        for (long long i = 0; i <= cap; ++i) out.emplace_back(i);
        out.push_back(Grade::infinity());
        break;
      case SemiringKind::NonnegReal: break;
    }
    return out;
  }

  std::vector<Grade> default_samples() const {
    std::vector<Grade> out;
    switch (kind) {
      case SemiringKind::Trivial: out = {Grade::infinity()}; break;
      case SemiringKind::Nat: out = {Grade(0), Grade(1), Grade(2), Grade(3)}; break;
      case SemiringKind::NatInf:
        out = {Grade(0), Grade(1), Grade(2), Grade(3), Grade::infinity()};
        break;
      case SemiringKind::NonnegReal:
        out = {Grade(0), Grade(1, 4), Grade(1, 2), Grade(3, 4), Grade(1), Grade(3, 2), Grade(2), Grade(3)};
        break;
    }
    return out;
  }
};

// Exhaustive law check over a sample set: monoid laws, distributivity,
// annihilation, order axioms and monotonicity, and join laws when present.
inline std::vector<LawViolation> check_semiring_laws(const Semiring& R,
                                                     std::vector<Grade> samples = {}) {
  std::vector<LawViolation> out;
  auto bad = [&](const std::string& law, const std::string& detail) {
    out.push_back({law, detail});
  };
  std::vector<Grade> xs = R.default_samples();
  for (const auto& g : samples)
    if (R.contains(g) && std::find(xs.begin(), xs.end(), g) == xs.end()) xs.push_back(g);

  for (const auto& a : xs) {
    if (!R.contains(a)) bad("carrier", a.str() + " not in carrier");
    if (!R.contains(R.add(a, a)) || !R.contains(R.mul(a, a)))
      bad("closure", "ops leave carrier at " + a.str());
    if (R.add(a, R.zero()) != a) bad("add-unit", a.str());
    if (R.mul(a, R.one()) != a || R.mul(R.one(), a) != a) bad("mul-unit", a.str());
    if (!R.mul(R.zero(), a).is_zero() && !(R.kind == SemiringKind::Trivial))
      bad("annihilation", "0*" + a.str());
    if (!R.mul(a, R.zero()).is_zero() && !(R.kind == SemiringKind::Trivial))
      bad("annihilation", a.str() + "*0");
    if (!R.leq(a, a)) bad("order-refl", a.str());
  }
  for (const auto& a : xs)
    for (const auto& b : xs) {
      if (R.add(a, b) != R.add(b, a)) bad("add-comm", a.str() + "," + b.str());
      if (R.leq(a, b) && R.leq(b, a) && a != b) bad("order-antisym", a.str() + "," + b.str());
      if (R.has_join()) {
        auto j = R.join(a, b);
        if (!j) {
          bad("join-exists", a.str() + "," + b.str());
        } else {
          if (!R.leq(a, *j) || !R.leq(b, *j)) bad("join-upper", a.str() + "," + b.str());
        }
      }
    }
  for (const auto& a : xs)
    for (const auto& b : xs)
      for (const auto& c : xs) {
        if (R.add(R.add(a, b), c) != R.add(a, R.add(b, c)))
          bad("add-assoc", a.str() + "," + b.str() + "," + c.str());
        if (R.mul(R.mul(a, b), c) != R.mul(a, R.mul(b, c)))
          bad("mul-assoc", a.str() + "," + b.str() + "," + c.str());
        if (R.mul(a, R.add(b, c)) != R.add(R.mul(a, b), R.mul(a, c)))
          bad("distrib-left", a.str() + "," + b.str() + "," + c.str());
        if (R.mul(R.add(a, b), c) != R.add(R.mul(a, c), R.mul(b, c)))
          bad("distrib-right", a.str() + "," + b.str() + "," + c.str());
        if (R.leq(a, b) && R.leq(b, c) && !R.leq(a, c))
          bad("order-trans", a.str() + "," + b.str() + "," + c.str());
        if (R.leq(a, b)) {
          if (!R.leq(R.add(a, c), R.add(b, c)))
            bad("add-monotone", a.str() + "<=" + b.str() + " +" + c.str());
          if (!R.leq(R.mul(a, c), R.mul(b, c)) || !R.leq(R.mul(c, a), R.mul(c, b)))
            bad("mul-monotone", a.str() + "<=" + b.str() + " *" + c.str());
        }
        if (R.has_join()) {
          auto j = R.join(a, b);
          if (j && R.leq(a, c) && R.leq(b, c) && !R.leq(*j, c))
            bad("join-least", a.str() + "," + b.str() + "," + c.str());
        }
      }
  return out;
}

}  // namespace grail
