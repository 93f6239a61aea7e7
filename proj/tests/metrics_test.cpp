#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <random>

#include "grail/metrics.hpp"

using namespace grail;

namespace {

MetSpace line_space(std::vector<long long> coords) {
  MetSpace s;
  for (long long c : coords) s.points.push_back("p" + std::to_string(c));
  int n = s.size();
  s.dist.assign(static_cast<std::size_t>(n) * n, Grade(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      s.d(i, j) = Grade(std::llabs(coords[static_cast<std::size_t>(i)] -
                                   coords[static_cast<std::size_t>(j)]));
  return s;
}

// Hausdorff distances between all subsets of a base, as a space of its own.
MetSpace subsets_space(const MetSpace& base) {
  MetSpace s;
  int n = base.size();
  int total = 1 << n;
  for (int m = 0; m < total; ++m) s.points.push_back("s" + std::to_string(m));
  s.dist.assign(static_cast<std::size_t>(total) * total, Grade(0));
  for (int a = 0; a < total; ++a)
    for (int b = 0; b < total; ++b)
      s.d(a, b) = hausdorff(base, static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
  return s;
}

}  // namespace

TEST_CASE("metric space validation catches each defect") {
  MetSpace ok = MetSpace::discrete({"a", "b", "c"});
  CHECK(check_metric_space(ok).empty());

  MetSpace diag = ok;
  diag.d(1, 1) = Grade(1);
  CHECK_FALSE(check_metric_space(diag).empty());

  MetSpace asym = ok;
  asym.d(0, 1) = Grade(2);
  CHECK_FALSE(check_metric_space(asym).empty());

  MetSpace tri = ok;
  tri.d(0, 1) = Grade(5);
  tri.d(1, 0) = Grade(5);
  CHECK_FALSE(check_metric_space(tri).empty());

  // infinite distances are fine as long as the triangle inequality holds
  MetSpace split = MetSpace::discrete({"a", "b"});
  split.d(0, 1) = Grade::infinity();
  split.d(1, 0) = Grade::infinity();
  CHECK(check_metric_space(split).empty());
}

TEST_CASE("hausdorff fixed values and conventions") {
  MetSpace two = MetSpace::discrete({"a", "b"});
  CHECK(hausdorff(two, 0b01, 0b01) == Grade(0));
  CHECK(hausdorff(two, 0b01, 0b11) == Grade(1));
  CHECK(hausdorff(two, 0b00, 0b01) == Grade::infinity());
  CHECK(hausdorff(two, 0b00, 0b00) == Grade(0));

  // a, b, c on a line at 0, 1, 2
  MetSpace abc = line_space({0, 1, 2});
  CHECK(hausdorff(abc, 0b001, 0b110) == Grade(2));  // {a} vs {b,c}
  CHECK(hausdorff(abc, 0b011, 0b110) == Grade(1));  // {a,b} vs {b,c}
  CHECK(hausdorff(abc, 0b111, 0b010) == Grade(1));  // {a,b,c} vs {b}
}

TEST_CASE("hausdorff is a metric on subsets, exhaustively on four points") {
  MetSpace base = line_space({0, 1, 3, 7});
  REQUIRE(check_metric_space(base).empty());
  int total = 1 << base.size();
  std::vector<std::vector<Grade>> h(static_cast<std::size_t>(total),
                                    std::vector<Grade>(static_cast<std::size_t>(total)));
  for (int a = 0; a < total; ++a)
    for (int b = 0; b < total; ++b)
      h[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          hausdorff(base, static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
  for (int a = 0; a < total; ++a) {
    CHECK(h[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] == Grade(0));
    for (int b = 0; b < total; ++b) {
      CHECK(h[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] ==
            h[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]);
      for (int c = 0; c < total; ++c) {
        const Grade& ab = h[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        const Grade& bc = h[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
        const Grade& ac = h[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)];
        if (ac > ab + bc) {
          INFO(a << " " << b << " " << c);
          CHECK(ac <= ab + bc);
        }
      }
    }
  }
}

TEST_CASE("total variation: two formulas agree exactly") {
  Dist mu{{Rq(3, 4), Rq(1, 4), Rq(0)}};
  Dist nu{{Rq(1, 4), Rq(1, 4), Rq(1, 2)}};
  CHECK(check_distribution(mu).empty());
  CHECK(total_variation(mu, mu) == Rq(0));
  CHECK(total_variation(mu, nu) == Rq(1, 2));
  CHECK(total_variation(dirac(3, 0), dirac(3, 2)) == Rq(1));

  std::mt19937 rng(20240817);
  for (int t = 0; t < 200; ++t) {
    int n = 2 + static_cast<int>(rng() % 4);
    long long denom = 1 + static_cast<long long>(rng() % 12);
    auto draw = [&] {
      std::vector<long long> units(static_cast<std::size_t>(n), 0);
      for (long long u = 0; u < denom; ++u) units[rng() % static_cast<unsigned>(n)] += 1;
      Dist d;
      for (long long u : units) d.p.emplace_back(u, denom);
      return d;
    };
    Dist a = draw(), b = draw();
    Rq sup = total_variation_subset_sup(a, b);
    Rq half = total_variation_half_l1(a, b);
    CHECK(sup == half);
    CHECK(sup >= Rq(0));
    CHECK(sup <= Rq(1));
    CHECK(total_variation_subset_sup(b, a) == sup);
  }
}

TEST_CASE("wasserstein1 fixed values") {
  MetSpace two = MetSpace::discrete({"a", "b"});
  Dist mu{{Rq(3, 4), Rq(1, 4)}};
  Dist nu{{Rq(1, 4), Rq(3, 4)}};
  CHECK(wasserstein1(two, mu, mu) == Grade(0));
  CHECK(wasserstein1(two, mu, nu) == Grade(1, 2));
  CHECK(wasserstein1(two, dirac(2, 0), dirac(2, 1)) == Grade(1));

  MetSpace abc = line_space({0, 1, 3});
  CHECK(wasserstein1(abc, dirac(3, 0), Dist{{Rq(0), Rq(1, 2), Rq(1, 2)}}) == Grade(2));
  CHECK(wasserstein1(abc, dirac(3, 0), dirac(3, 2)) == Grade(3));

  // disconnected space: moving mass across the gap costs infinity
  MetSpace split = MetSpace::discrete({"a", "b"});
  split.d(0, 1) = Grade::infinity();
  split.d(1, 0) = Grade::infinity();
  CHECK(wasserstein1(split, dirac(2, 0), dirac(2, 1)) == Grade::infinity());
  CHECK(wasserstein1(split, mu, mu) == Grade(0));
}

TEST_CASE("wasserstein1 primal equals the finite dual on small bases") {
  std::vector<MetSpace> spaces = {line_space({0, 1, 3}), line_space({0, 2, 7}),
                                  MetSpace::discrete({"a", "b", "c"})};
  {
    MetSpace mixed = MetSpace::discrete({"a", "b", "c"});
    mixed.d(0, 1) = mixed.d(1, 0) = Grade(1, 2);
    mixed.d(1, 2) = mixed.d(2, 1) = Grade(3, 4);
    mixed.d(0, 2) = mixed.d(2, 0) = Grade(5, 4);
    REQUIRE(check_metric_space(mixed).empty());
    spaces.push_back(mixed);
  }
  auto dists = enumerate_distributions(3, 4);
  REQUIRE(dists.size() == 15);
  for (const auto& s : spaces)
    for (const auto& mu : dists)
      for (const auto& nu : dists) {
        Grade primal = wasserstein1(s, mu, nu);
        Grade dual = wasserstein1_dual(s, mu, nu);
        INFO(s.points[0] << ": primal " << primal.str() << " dual " << dual.str());
        CHECK(std::abs(primal.to_double() - dual.to_double()) <= 1e-3);
        CHECK(wasserstein1(s, nu, mu) == primal);
      }
}

TEST_CASE("convex combination contracts wasserstein1 by its weight") {
  MetSpace abc = line_space({0, 1, 3});
  auto dists = enumerate_distributions(3, 2);
  std::vector<Rq> es = {Rq(0), Rq(1, 4), Rq(1, 2), Rq(1)};
  for (const auto& mu : dists)
    for (const auto& nu : dists)
      for (const auto& sigma : dists)
        for (const auto& e : es) {
          Grade lhs = wasserstein1(abc, convex_combine(e, mu, sigma), convex_combine(e, nu, sigma));
          Grade rhs = Grade(e) * wasserstein1(abc, mu, nu);
          INFO(rational_str(e));
          CHECK(lhs <= rhs);
        }
}

TEST_CASE("grid wasserstein is a lower bound, exact on integer grids") {
  MetSpace two = MetSpace::discrete({"a", "b"});
  Dist mu = dirac(2, 0), nu = dirac(2, 1);
  CHECK(wasserstein_p_grid(two, mu, nu, 1.0, 1) == Catch::Approx(1.0));
  MetSpace abc = line_space({0, 1, 3});
  for (const auto& a : enumerate_distributions(3, 2))
    for (const auto& b : enumerate_distributions(3, 2)) {
      double exact = wasserstein1(abc, a, b).to_double();
      double grid = wasserstein_p_grid(abc, a, b, 1.0, 12);
      CHECK(grid <= exact + 1e-9);
      CHECK(grid >= 0.0);
    }
}

TEST_CASE("lipschitz constants with edge conventions") {
  MetSpace two = MetSpace::discrete({"a", "b"});
  CHECK(lipschitz_constant({0, 1}, two, two) == Grade(1));  // identity
  CHECK(lipschitz_constant({0, 0}, two, two) == Grade(0));  // constant

  MetSpace stretch = MetSpace::discrete({"a", "b"});
  stretch.d(0, 1) = stretch.d(1, 0) = Grade(3);
  CHECK(lipschitz_constant({0, 1}, two, stretch) == Grade(3));
  CHECK(lipschitz_constant({0, 1}, stretch, two) == Grade(1, 3));

  // domain pair at distance zero mapped apart: no finite constant
  MetSpace glued = MetSpace::discrete({"a", "b"});
  glued.d(0, 1) = glued.d(1, 0) = Grade(0);
  CHECK(lipschitz_constant({0, 1}, glued, two) == Grade::infinity());
  CHECK(lipschitz_constant({0, 1}, glued, glued) == Grade(0));

  // domain pair at infinite distance imposes no constraint
  MetSpace split = MetSpace::discrete({"a", "b"});
  split.d(0, 1) = split.d(1, 0) = Grade::infinity();
  CHECK(lipschitz_constant({0, 1}, split, two) == Grade(0));
  CHECK(lipschitz_constant({0, 1}, two, split) == Grade::infinity());
}

TEST_CASE("union on subsets of a three-point base is non-expansive") {
  MetSpace base = line_space({0, 1, 3});
  MetSpace subs = subsets_space(base);
  REQUIRE(check_metric_space(subs).empty());

  Grade worst(0);
  int total = 1 << base.size();
  for (int fixed = 0; fixed < total; ++fixed) {
    std::vector<int> f;
    for (int a = 0; a < total; ++a) f.push_back(a | fixed);
    Grade l = lipschitz_constant(f, subs, subs);
    worst = grade_max(worst, l);
    CHECK(l <= Grade(1));
  }
  CHECK(worst == Grade(1));
}

TEST_CASE("distribution helpers") {
  CHECK(enumerate_distributions(3, 4).size() == 15);
  CHECK(enumerate_distributions(2, 1).size() == 2);
  Dist bad{{Rq(1, 2), Rq(1, 4)}};
  CHECK_FALSE(check_distribution(bad).empty());
  Dist mix = convex_combine(Rq(1, 4), dirac(2, 0), dirac(2, 1));
  CHECK(mix.p == std::vector<Rq>{Rq(1, 4), Rq(3, 4)});
}
