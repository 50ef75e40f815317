#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "percolab/bounds.hpp"
#include "percolab/model.hpp"
#include "percolab/rng.hpp"

using namespace percolab;

namespace {

SplitPoint pt(std::vector<std::int64_t> u0, std::vector<std::int64_t> u1) {
  return SplitPoint{std::move(u0), std::move(u1)};
}

SplitPoint random_point(SmallRng& rng, int k, int d, std::int64_t r) {
  SplitPoint p = origin_point(k, d);
  for (auto& c : p.u0) c = rng.range(-r, r);
  for (auto& c : p.u1) c = rng.range(-r, r);
  return p;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("l1 norm") {
  const std::int64_t zero[] = {0, 0, 0};
  CHECK(l1_norm(zero) == 0);
  const std::int64_t mixed[] = {1, -2, 3};
  CHECK(l1_norm(mixed) == 6);
  const std::int64_t neg[] = {-5};
  CHECK(l1_norm(neg) == 5);
}

TEST_CASE("coupling cases") {
  const ModelParams p{1, 1, 1.0, 0.5};
  // Same fiber, long distance 1: 2/(1+1) = 1.
  CHECK(coupling(pt({0}, {0}), pt({0}, {1}), p) == doctest::Approx(1.0).epsilon(1e-15));
  // Nearest neighbor in the short direction.
  CHECK(coupling(pt({0}, {3}), pt({1}, {3}), p) == 1.0);
  // No self loops.
  CHECK(coupling(pt({2}, {5}), pt({2}, {5}), p) == 0.0);
  // Differing in both components.
  CHECK(coupling(pt({0}, {0}), pt({1}, {1}), p) == 0.0);
  // Short distance 2 is not a bond.
  CHECK(coupling(pt({0}, {0}), pt({2}, {0}), p) == 0.0);
  // d=1, eps=1, long distance 2: 2/(1+4).
  CHECK(coupling(pt({0}, {0}), pt({0}, {2}), p) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("coupling validates dimensions") {
  const ModelParams p{1, 1, 1.0, 0.5};
  CHECK_THROWS_AS(coupling(pt({}, {0}), pt({0}, {1}), p), std::invalid_argument);
  CHECK_THROWS_AS(coupling(pt({0}, {0, 1}), pt({0}, {1, 0}), p), std::invalid_argument);
}

TEST_CASE("bond probability") {
  ModelParams p{1, 1, 1.0, 0.0};
  CHECK(bond_probability(pt({0}, {0}), pt({0}, {5}), p) == 0.0);
  p.beta = 0.5;
  CHECK(bond_probability(pt({0}, {2}), pt({1}, {2}), p) == 0.5);
  const ModelParams q{0, 1, 0.5, 0.25};
  CHECK(bond_probability(pt({}, {0}), pt({}, {3}), q) ==
        doctest::Approx(0.25 * 2.0 / (1.0 + std::pow(3.0, 1.5))).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((ModelParams{-1, 1, 1.0, 0.5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{0, 0, 1.0, 0.5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{0, 1, 0.0, 0.5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{0, 1, 1.0, 1.5}.validate()), std::invalid_argument);
  CHECK_NOTHROW((ModelParams{0, 1, 0.5, 1.0}.validate()));
}

TEST_CASE("box indexing round trip") {
  Box b;
  b.lo0 = {-2};
  b.hi0 = {1};
  b.lo1 = {0, -1};
  b.hi1 = {2, 1};
  b.validate();
  CHECK(b.site_count() == 4 * 9);
  CHECK(b.fiber_size() == 9);
  for (std::uint32_t i = 0; i < b.site_count(); ++i)
    CHECK(b.index_of(b.site_at(i)) == i);
  CHECK_THROWS_AS(b.index_of(pt({5}, {0, 0})), std::invalid_argument);
  // Index order is lexicographic order on (u0, u1).
  for (std::uint32_t i = 0; i + 1 < b.site_count(); ++i)
    CHECK(lex_less(b.site_at(i), b.site_at(i + 1)));
}

TEST_CASE("enumerate_edges small fixtures") {
  // Three-site fiber: two nearest pairs plus the distance-2 pair.
  {
    const ModelParams p{0, 1, 1.0, 0.5};
    Box b;
    b.lo1 = {0};
    b.hi1 = {2};
    const auto edges = enumerate_edges(b, p);
    REQUIRE(edges.size() == 3);
    int close = 0, far = 0;
    for (const Edge& e : edges) {
      if (e.probability == doctest::Approx(0.5).epsilon(1e-15)) ++close;
      if (e.probability == doctest::Approx(0.2).epsilon(1e-15)) ++far;
    }
    CHECK(close == 2);
    CHECK(far == 1);
  }
  // Two fibers of one site each: a single short edge.
  {
    const ModelParams p{1, 1, 1.0, 0.3};
    Box b;
    b.lo0 = {0};
    b.hi0 = {1};
    b.lo1 = {0};
    b.hi1 = {0};
    const auto edges = enumerate_edges(b, p);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].probability == doctest::Approx(0.3));
  }
  // Single site: no pairs.
  {
    const ModelParams p{0, 1, 1.0, 0.5};
    Box b;
    b.lo1 = {7};
    b.hi1 = {7};
    CHECK(enumerate_edges(b, p).empty());
  }
}

TEST_CASE("enumerate_edges count formula") {
  // fibers * C(f,2) + nearest-neighbor u0 pairs * f, on a rectangular box.
  const ModelParams p{1, 1, 0.5, 0.2};
  Box b;
  b.lo0 = {0};
  b.hi0 = {2};
  b.lo1 = {0};
  b.hi1 = {3};
  const auto edges = enumerate_edges_indexed(b, p);
  const std::size_t fibers = 3, f = 4, nn_pairs = 2;
  CHECK(edges.size() == fibers * (f * (f - 1) / 2) + nn_pairs * f);
  // Canonical order: ascending (a, b), no duplicates.
  for (std::size_t i = 0; i < edges.size(); ++i) {
    CHECK(edges[i].a < edges[i].b);
    if (i > 0)
      CHECK((edges[i - 1].a < edges[i].a ||
             (edges[i - 1].a == edges[i].a && edges[i - 1].b < edges[i].b)));
  }
}

TEST_CASE("coupling symmetry and translation invariance") {
  const ModelParams p{2, 1, 0.7, 0.4};
  SmallRng rng(12345);
  for (int trial = 0; trial < 200; ++trial) {
    const SplitPoint u = random_point(rng, p.k, p.d, 6);
    const SplitPoint v = random_point(rng, p.k, p.d, 6);
    const SplitPoint t = random_point(rng, p.k, p.d, 9);
    const double j = coupling(u, v, p);
    CHECK(j == coupling(v, u, p));
    CHECK(j >= 0.0);
    CHECK(j <= 1.0);
    SplitPoint ut = u, vt = v;
    for (int i = 0; i < p.k; ++i) {
      ut.u0[i] += t.u0[i];
      vt.u0[i] += t.u0[i];
    }
    for (int i = 0; i < p.d; ++i) {
      ut.u1[i] += t.u1[i];
      vt.u1[i] += t.u1[i];
    }
    CHECK(j == coupling(ut, vt, p));
  }
}

TEST_CASE("neighborhood sums are monotone in box size and bounded") {
  const ModelParams p{1, 1, 0.5, 0.3};
  const SplitPoint u = origin_point(1, 1);
  double prev = 0.0;
  for (std::int64_t r = 1; r <= 5; ++r) {
    const Box b = Box::centered(1, 1, r, 4 * r);
    double sum = 0.0;
    for (const Edge& e : enumerate_edges(b, p))
      if (e.u == u || e.v == u) sum += e.probability;
    CHECK(sum >= prev);
    prev = sum;
  }
  // Analytic majorant: beta (2k + 2 sum_n N_d(n) 2/(1+n^(d+eps))).
  const auto shells = l1_shell_counts(p.d, 4096);
  double series = 0.0;
  for (std::uint32_t n = 1; n < shells.size(); ++n)
    series += static_cast<double>(shells[n]) * 2.0 / (1.0 + std::pow(n, p.exponent()));
  CHECK(prev <= p.beta * (2.0 * p.k + 2.0 * series));
}

}  // TEST_SUITE
