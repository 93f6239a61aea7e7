#pragma once

// Metric-space oracles over finite carriers: Hausdorff distance on subsets,
// 1-Wasserstein (exact primal via augmenting paths on integer masses, plus an
// exact finite dual for small bases), total variation (subset sup and half-L1,
// computed independently), and Lipschitz constants of maps between spaces.
//
// Distance values are Grade: exact nonnegative rationals extended with inf.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "grail/grade.hpp"
#include "grail/sexpr.hpp"

namespace grail {

using SRat = boost::rational<long long>;  // signed exact rational for internals

struct MetSpace {
  std::vector<std::string> points;
  std::vector<Grade> dist;  // n*n row-major

  int size() const { return static_cast<int>(points.size()); }
  const Grade& d(int i, int j) const {
    return dist[static_cast<std::size_t>(i) * points.size() + static_cast<std::size_t>(j)];
  }
  Grade& d(int i, int j) {
    return dist[static_cast<std::size_t>(i) * points.size() + static_cast<std::size_t>(j)];
  }
  int point(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
      if (points[static_cast<std::size_t>(i)] == name) return i;
    throw GrailError("metric space: unknown point " + name);
  }

  static MetSpace discrete(std::vector<std::string> pts) {
    MetSpace s;
    s.points = std::move(pts);
    std::size_t n = s.points.size();
    s.dist.assign(n * n, Grade(1));
    for (std::size_t i = 0; i < n; ++i) s.dist[i * n + i] = Grade(0);
    return s;
  }
};

// Diagonal, symmetry, and triangle checks; violations are returned as text.
inline std::vector<std::string> check_metric_space(const MetSpace& s) {
  std::vector<std::string> out;
  int n = s.size();
  for (int i = 0; i < n; ++i) {
    if (!s.d(i, i).is_zero())
      out.push_back("d(" + s.points[static_cast<std::size_t>(i)] + ", same) = " +
                    s.d(i, i).str() + ", expected 0");
    for (int j = 0; j < n; ++j) {
      if (s.d(i, j) != s.d(j, i))
        out.push_back("asymmetry at " + s.points[static_cast<std::size_t>(i)] + ", " +
                      s.points[static_cast<std::size_t>(j)]);
      for (int k = 0; k < n; ++k)
        if (s.d(i, j) + s.d(j, k) < s.d(i, k))
          out.push_back("triangle failure at " + s.points[static_cast<std::size_t>(i)] + ", " +
                        s.points[static_cast<std::size_t>(j)] + ", " +
                        s.points[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

// ---- Hausdorff distance on subsets (bitmasks over the points) ----

inline Grade dist_point_to_set(const MetSpace& s, int i, std::uint64_t mask) {
  Grade best = Grade::infinity();  // inf over the empty set
  for (int j = 0; j < s.size(); ++j)
    if (mask & (1ull << j)) best = grade_min(best, s.d(i, j));
  return best;
}

inline Grade hausdorff(const MetSpace& s, std::uint64_t a, std::uint64_t b) {
  Grade h(0);  // sup over the empty set
  for (int i = 0; i < s.size(); ++i) {
    if (a & (1ull << i)) h = grade_max(h, dist_point_to_set(s, i, b));
    if (b & (1ull << i)) h = grade_max(h, dist_point_to_set(s, i, a));
  }
  return h;
}

// ---- finite distributions with exact rational masses ----

struct Dist {
  std::vector<Rq> p;

  bool operator==(const Dist& o) const { return p == o.p; }
};

inline std::vector<std::string> check_distribution(const Dist& mu) {
  std::vector<std::string> out;
  Rq total(0);
  for (const auto& x : mu.p) {
    if (x < Rq(0)) out.push_back("negative mass " + rational_str(x));
    total += x;
  }
  if (total != Rq(1)) out.push_back("total mass " + rational_str(total) + ", expected 1");
  return out;
}

inline Dist dirac(int n, int i) {
  Dist d;
  d.p.assign(static_cast<std::size_t>(n), Rq(0));
  d.p[static_cast<std::size_t>(i)] = Rq(1);
  return d;
}

inline Dist convex_combine(const Rq& e, const Dist& mu, const Dist& nu) {
  Dist out = mu;
  for (std::size_t i = 0; i < out.p.size(); ++i) out.p[i] = e * mu.p[i] + (Rq(1) - e) * nu.p[i];
  return out;
}

// All distributions over n points whose masses are multiples of 1/denom.
inline std::vector<Dist> enumerate_distributions(int n, long long denom) {
  std::vector<Dist> out;
  std::vector<long long> units(static_cast<std::size_t>(n), 0);
  std::function<void(int, long long)> rec = [&](int i, long long left) {
    if (i == n - 1) {
      units[static_cast<std::size_t>(i)] = left;
      Dist d;
      d.p.reserve(static_cast<std::size_t>(n));
      for (long long u : units) d.p.emplace_back(u, denom);
      out.push_back(std::move(d));
      return;
    }
    for (long long u = 0; u <= left; ++u) {
      units[static_cast<std::size_t>(i)] = u;
      rec(i + 1, left - u);
    }
  };
  rec(0, denom);
  return out;
}

// ---- total variation: subset sup and half-L1, computed independently ----

inline Rq total_variation_subset_sup(const Dist& mu, const Dist& nu) {
  int n = static_cast<int>(mu.p.size());
  Rq best(0);
  for (std::uint64_t e = 0; e < (1ull << n); ++e) {
    Rq diff(0);
    for (int i = 0; i < n; ++i)
      if (e & (1ull << i))
        diff += mu.p[static_cast<std::size_t>(i)] - nu.p[static_cast<std::size_t>(i)];
    if (diff < Rq(0)) diff = -diff;
    if (diff > best) best = diff;
  }
  return best;
}

inline Rq total_variation_half_l1(const Dist& mu, const Dist& nu) {
  Rq sum(0);
  for (std::size_t i = 0; i < mu.p.size(); ++i) {
    Rq d = mu.p[i] - nu.p[i];
    if (d < Rq(0)) d = -d;
    sum += d;
  }
  return sum / Rq(2);
}

inline Rq total_variation(const Dist& mu, const Dist& nu) {
  Rq a = total_variation_subset_sup(mu, nu);
  Rq b = total_variation_half_l1(mu, nu);
  if (a != b) throw GrailError("total variation formulas disagree");  // unreachable on valid input
  return a;
}

// ---- 1-Wasserstein ----

namespace detail {

// Exact min-cost transport of integer masses a (sources) to b (sinks) with
// finite rational edge costs; edges with infinite distance are excluded and
// any mass forced across them makes the result infinite.
struct Transport {
  int n;
  const MetSpace& s;
  std::vector<long long> a, b;             // remaining supply / demand in units
  std::vector<std::vector<long long>> f;   // flow units on (i, j)

  Transport(const MetSpace& sp, std::vector<long long> av, std::vector<long long> bv)
      : n(sp.size()), s(sp), a(std::move(av)), b(std::move(bv)) {
    f.assign(static_cast<std::size_t>(n), std::vector<long long>(static_cast<std::size_t>(n), 0));
  }

  bool finite_edge(int i, int j) const { return !s.d(i, j).inf; }
  SRat cost(int i, int j) const { return SRat(s.d(i, j).q.numerator(), s.d(i, j).q.denominator()); }

  // Bellman-Ford over the residual bipartite graph (nodes 0..n-1 source side,
  // n..2n-1 sink side), then one push along a cheapest path to a sink with
  // remaining demand.  False when no such sink is reachable.
  bool augment() {
    int N = 2 * n;
    std::vector<std::optional<SRat>> dist(static_cast<std::size_t>(N));
    std::vector<int> prev(static_cast<std::size_t>(N), -1);
    for (int i = 0; i < n; ++i)
      if (a[static_cast<std::size_t>(i)] > 0) dist[static_cast<std::size_t>(i)] = SRat(0);
    for (int it = 0; it < N; ++it) {
      bool changed = false;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (!finite_edge(i, j)) continue;
          // forward arc i -> sink j
          if (dist[static_cast<std::size_t>(i)]) {
            SRat cand = *dist[static_cast<std::size_t>(i)] + cost(i, j);
            auto& dj = dist[static_cast<std::size_t>(n + j)];
            if (!dj || cand < *dj) {
              dj = cand;
              prev[static_cast<std::size_t>(n + j)] = i;
              changed = true;
            }
          }
          // backward arc sink j -> i when flow present
          if (f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 0 &&
              dist[static_cast<std::size_t>(n + j)]) {
            SRat cand = *dist[static_cast<std::size_t>(n + j)] - cost(i, j);
            auto& di = dist[static_cast<std::size_t>(i)];
            if (!di || cand < *di) {
              di = cand;
              prev[static_cast<std::size_t>(i)] = n + j;
              changed = true;
            }
          }
        }
      if (!changed) break;
    }
    int best = -1;
    for (int j = 0; j < n; ++j)
      if (b[static_cast<std::size_t>(j)] > 0 && dist[static_cast<std::size_t>(n + j)] &&
          (best < 0 || *dist[static_cast<std::size_t>(n + j)] < *dist[static_cast<std::size_t>(n + best)]))
        best = j;
    if (best < 0) return false;

    // collect the path back to a source with surplus
    std::vector<int> path;
    int cur = n + best;
    while (cur >= 0) {
      path.push_back(cur);
      if (cur < n && a[static_cast<std::size_t>(cur)] > 0 && prev[static_cast<std::size_t>(cur)] < 0)
        break;
      cur = prev[static_cast<std::size_t>(cur)];
    }
    std::reverse(path.begin(), path.end());
    long long push = a[static_cast<std::size_t>(path.front())];
    push = std::min(push, b[static_cast<std::size_t>(best)]);
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      int u = path[k], v = path[k + 1];
      if (u >= n)  // backward arc: limited by existing flow
        push = std::min(push, f[static_cast<std::size_t>(v)][static_cast<std::size_t>(u - n)]);
    }
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      int u = path[k], v = path[k + 1];
      if (u < n)
        f[static_cast<std::size_t>(u)][static_cast<std::size_t>(v - n)] += push;
      else
        f[static_cast<std::size_t>(v)][static_cast<std::size_t>(u - n)] -= push;
    }
    a[static_cast<std::size_t>(path.front())] -= push;
    b[static_cast<std::size_t>(best)] -= push;
    return true;
  }
};

inline long long lcm_ll(long long a, long long b) { return a / std::gcd(a, b) * b; }

}  // namespace detail

// Exact optimal-transport value between two distributions over the points of
// s.  Infinite when mass can only move across infinite-distance pairs.
inline Grade wasserstein1(const MetSpace& s, const Dist& mu, const Dist& nu) {
  int n = s.size();
  long long L = 1;
  for (int i = 0; i < n; ++i) {
    L = detail::lcm_ll(L, mu.p[static_cast<std::size_t>(i)].denominator());
    L = detail::lcm_ll(L, nu.p[static_cast<std::size_t>(i)].denominator());
  }
  std::vector<long long> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    a[static_cast<std::size_t>(i)] =
        boost::rational_cast<long long>(mu.p[static_cast<std::size_t>(i)] * L);
    b[static_cast<std::size_t>(i)] =
        boost::rational_cast<long long>(nu.p[static_cast<std::size_t>(i)] * L);
  }
  detail::Transport t(s, a, b);
  while (true) {
    bool surplus = false;
    for (long long x : t.a) surplus |= x > 0;
    if (!surplus) break;
    if (!t.augment()) return Grade::infinity();
  }
  SRat total(0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (t.f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 0)
        total += SRat(t.f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) * t.cost(i, j);
  total /= SRat(L);
  return Grade(Rq(total.numerator(), total.denominator()));
}

// Dual value: max over non-expansive potentials of sum f d(mu - nu).  The
// candidate value set (signed sums of at most two base distances) hits every
// vertex of the Lipschitz polytope for bases of up to three points, so the
// result is exact there; larger bases may undershoot.  Requires all base
// distances finite.
inline Grade wasserstein1_dual(const MetSpace& s, const Dist& mu, const Dist& nu) {
  int n = s.size();
  std::vector<SRat> base;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (s.d(i, j).inf) throw GrailError("wasserstein dual requires finite distances");
      base.emplace_back(s.d(i, j).q.numerator(), s.d(i, j).q.denominator());
    }
  std::vector<SRat> cand = {SRat(0)};
  for (const auto& x : base) {
    cand.push_back(x);
    cand.push_back(-x);
    for (const auto& y : base) {
      cand.push_back(x + y);
      cand.push_back(x - y);
      cand.push_back(-x - y);
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  std::vector<SRat> diff(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rq d = mu.p[static_cast<std::size_t>(i)] - nu.p[static_cast<std::size_t>(i)];
    diff[static_cast<std::size_t>(i)] = SRat(d.numerator(), d.denominator());
  }

  SRat best(0);
  std::vector<std::size_t> pickv(static_cast<std::size_t>(n), 0);
  std::vector<SRat> f(static_cast<std::size_t>(n));
  while (true) {
    bool feasible = true;
    for (int i = 0; i < n && feasible; ++i) {
      f[static_cast<std::size_t>(i)] = cand[pickv[static_cast<std::size_t>(i)]];
      for (int j = 0; j < i && feasible; ++j) {
        SRat gap = f[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(j)];
        if (gap < SRat(0)) gap = -gap;
        SRat dij(s.d(i, j).q.numerator(), s.d(i, j).q.denominator());
        if (gap > dij) feasible = false;
      }
    }
    if (feasible) {
      SRat v(0);
      for (int i = 0; i < n; ++i) v += f[static_cast<std::size_t>(i)] * diff[static_cast<std::size_t>(i)];
      if (v > best) best = v;
    }
    std::size_t k = 0;
    while (k < pickv.size() && ++pickv[k] == cand.size()) pickv[k++] = 0;
    if (k == pickv.size()) break;
  }
  return Grade(Rq(best.numerator(), best.denominator()));
}

// Grid approximation of the sup-based p-Wasserstein: potentials range over an
// equally spaced grid up to the base diameter; the report is a lower bound
// whose gap shrinks with the step count.  Exact only in the p = 1 case when
// the grid happens to contain the optimal potentials; prefer wasserstein1.
inline double wasserstein_p_grid(const MetSpace& s, const Dist& mu, const Dist& nu, double p,
                                 int steps = 16) {
  int n = s.size();
  double diam = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (s.d(i, j).inf) throw GrailError("grid wasserstein requires finite distances");
      diam = std::max(diam, s.d(i, j).to_double());
    }
  if (diam == 0 || steps <= 0) return 0.0;
  double step = diam / steps;
  std::vector<int> lvl(static_cast<std::size_t>(n), 0);
  double best = 0;
  while (true) {
    bool feasible = true;
    for (int i = 0; i < n && feasible; ++i)
      for (int j = 0; j < i && feasible; ++j)
        if (std::abs(lvl[static_cast<std::size_t>(i)] - lvl[static_cast<std::size_t>(j)]) * step >
            s.d(i, j).to_double() + 1e-12)
          feasible = false;
    if (feasible) {
      double acc = 0;
      for (int i = 0; i < n; ++i)
        acc += std::pow(lvl[static_cast<std::size_t>(i)] * step, p) *
               (boost::rational_cast<double>(mu.p[static_cast<std::size_t>(i)]) -
                boost::rational_cast<double>(nu.p[static_cast<std::size_t>(i)]));
      best = std::max(best, std::pow(std::abs(acc), 1.0 / p));
    }
    std::size_t k = 0;
    while (k < lvl.size() && ++lvl[k] > steps) lvl[k++] = 0;
    if (k == lvl.size()) break;
  }
  return best;
}

// ---- Lipschitz constants ----

// Least r with sigma(f(x), f(y)) <= r * d(x, y) for all pairs: ratios with the
// conventions 0/0 = 0, positive/0 = inf, anything/inf = 0.
inline Grade lipschitz_constant(const std::vector<int>& f, const MetSpace& dom,
                                const MetSpace& cod) {
  Grade best(0);
  for (int i = 0; i < dom.size(); ++i)
    for (int j = i + 1; j < dom.size(); ++j) {
      const Grade& dx = dom.d(i, j);
      Grade dy = cod.d(f[static_cast<std::size_t>(i)], f[static_cast<std::size_t>(j)]);
      if (dx.inf) continue;  // no constraint
      if (dx.is_zero()) {
        if (!dy.is_zero()) return Grade::infinity();
        continue;
      }
      if (dy.inf) return Grade::infinity();
      best = grade_max(best, Grade(dy.q / dx.q));
    }
  return best;
}

}  // namespace grail
