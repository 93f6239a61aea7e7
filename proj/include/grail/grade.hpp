#pragma once

#include <boost/rational.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

namespace grail {

using Rq = boost::rational<long long>;

// Exact grade value: a rational or the distinguished infinity.
// Arithmetic uses the absorption conventions shared by the graded machinery:
// inf + x = inf, and multiplication treats 0 as annihilating (0 * inf = 0).
struct Grade {
  bool inf = false;
  Rq q{0};

  Grade() = default;
  Grade(long long n) : q(n) {}
  Grade(long long n, long long d) : q(n, d) {}
  explicit Grade(Rq v) : q(v) {}

  static Grade infinity() {
    Grade g;
    g.inf = true;
    return g;
  }

  bool is_zero() const { return !inf && q == Rq(0); }
  bool is_one() const { return !inf && q == Rq(1); }
  bool negative() const { return !inf && q < Rq(0); }
  bool integral() const { return !inf && q.denominator() == 1; }

  double to_double() const {
    if (inf) return std::numeric_limits<double>::infinity();
    return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
  }

  friend bool operator==(const Grade& a, const Grade& b) {
    if (a.inf || b.inf) return a.inf == b.inf;
    return a.q == b.q;
  }
  friend bool operator!=(const Grade& a, const Grade& b) { return !(a == b); }
  // Numeric total order with inf on top; used for container keys and the
  // nonneg-real semiring order.
  friend bool operator<(const Grade& a, const Grade& b) {
    if (a.inf) return false;
    if (b.inf) return true;
    return a.q < b.q;
  }
  friend bool operator<=(const Grade& a, const Grade& b) { return a < b || a == b; }
  friend bool operator>(const Grade& a, const Grade& b) { return b < a; }
  friend bool operator>=(const Grade& a, const Grade& b) { return b <= a; }

  friend Grade operator+(const Grade& a, const Grade& b) {
    if (a.inf || b.inf) return infinity();
    return Grade(a.q + b.q);
  }
  friend Grade operator*(const Grade& a, const Grade& b) {
    if (a.is_zero() || b.is_zero()) return Grade(0);
    if (a.inf || b.inf) return infinity();
    return Grade(a.q * b.q);
  }

  std::string str() const {
    if (inf) return "inf";
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
  }
};

inline Grade grade_max(const Grade& a, const Grade& b) { return a < b ? b : a; }
inline Grade grade_min(const Grade& a, const Grade& b) { return a < b ? a : b; }

// Accepts "7", "-3", "3/4", "0.25", "inf".
inline std::optional<Rq> parse_rational(const std::string& s) {
  if (s.empty()) return std::nullopt;
  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '-') {
    neg = true;
    i = 1;
  } else if (s[0] == '+') {
    i = 1;
  }
  if (i >= s.size()) return std::nullopt;
  long long num = 0, den = 1;
  bool seen_digit = false, seen_dot = false, seen_slash = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      if (seen_slash) {
        den = den * 10 + (c - '0');
      } else {
        num = num * 10 + (c - '0');
        if (seen_dot) den *= 10;
      }
      seen_digit = true;
    } else if (c == '.' && !seen_dot && !seen_slash) {
      seen_dot = true;
    } else if (c == '/' && !seen_slash && !seen_dot && seen_digit) {
      seen_slash = true;
      den = 0;
      seen_digit = false;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit || den == 0) return std::nullopt;
  Rq r(num, den);
  return neg ? -r : r;
}

inline std::optional<Grade> parse_grade(const std::string& s) {
  if (s == "inf" || s == "oo") return Grade::infinity();
  auto r = parse_rational(s);
  if (!r) return std::nullopt;
  return Grade(*r);
}

inline std::string rational_str(const Rq& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

// ---- value-side helpers (binary64 carrier of the quantale instance) ----

inline double val_inf() { return std::numeric_limits<double>::infinity(); }

// Scalar action of a grade on a quantale value; 0 annihilates even inf.
inline double val_scale(const Grade& r, double v) {
  if (r.is_zero() || v == 0.0) return 0.0;
  return r.to_double() * v;
}

// Fiber order of the quantale instance: numerically reversed.
inline bool fiber_leq(double a, double b, double eps) { return a >= b - eps; }

// Residual: least v with v + a >= b (truncated difference, inf - inf = 0).
inline double val_residual(double a, double b) {
  if (b <= a) return 0.0;                 // covers inf <= inf via !(b > a) ? careful below
  if (std::isinf(b) && std::isinf(a)) return 0.0;
  if (std::isinf(b)) return val_inf();
  if (std::isinf(a)) return 0.0;
  double d = b - a;
  return d > 0 ? d : 0.0;
}

}  // namespace grail
