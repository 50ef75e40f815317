#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "percolab/bounds.hpp"
#include "percolab/model.hpp"
#include "percolab/rng.hpp"

using namespace percolab;

namespace {

std::vector<ShellRow> shell_table(std::vector<double> means) {
  std::vector<ShellRow> rows;
  for (std::uint32_t i = 0; i < means.size(); ++i)
    rows.push_back({i, Estimate{means[i], 0.0, 1000}});
  return rows;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("fiber_sums at beta zero") {
  const auto rows = fiber_sums(ModelParams{1, 1, 1.0, 0.0}, Box::centered(1, 1, 3, 3), 500,
                               RngSeed{21, 0});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].sum.mean == 1.0);
  CHECK(rows[0].sum.std_err == 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].sum.mean == 0.0);
}

TEST_CASE("fiber_sums with no short directions reduces to chi") {
  const ModelParams p{0, 1, 0.5, 0.2};
  const Box box = Box::centered(0, 1, 0, 8);
  const auto rows = fiber_sums(p, box, 4000, RngSeed{22, 0});
  REQUIRE(rows.size() == 1);
  const ChiEstimate chi = estimate_chi(p, box, 4000, RngSeed{22, 0});
  CHECK(rows[0].sum.mean == doctest::Approx(chi.cluster_size.mean).epsilon(1e-15));
}

TEST_CASE("fiber sums decay along the short shells at small beta") {
  const auto rows =
      fiber_sums(ModelParams{1, 1, 1.0, 0.08}, Box::centered(1, 1, 5, 6), 20000, RngSeed{29, 0});
  for (std::size_t n = 2; n < rows.size(); ++n) {
    const double tol = 4.0 * (rows[n - 1].sum.std_err + rows[n].sum.std_err) + 1e-12;
    CHECK(rows[n].sum.mean <= rows[n - 1].sum.mean + tol);
  }
}

TEST_CASE("find_n0") {
  // All shells above zero vanish.
  CHECK(find_n0(shell_table({1.0, 0.0, 0.0}), 0.5) == 1);
  // Shells (0.9, 0.4, 0.2) with lambda 0.5.
  CHECK(find_n0(shell_table({0.9, 0.4, 0.2}), 0.5) == 1);
  // Lambda 0.3 only admits the suffix from shell 2.
  CHECK(find_n0(shell_table({0.9, 0.4, 0.2}), 0.3) == 2);
  // Lambda below every shell: no qualifying suffix.
  CHECK_THROWS_AS(find_n0(shell_table({0.9, 0.4, 0.2}), 0.1), std::invalid_argument);
  // Vacuous when the table has no shells above zero (k = 0).
  CHECK(find_n0(shell_table({0.9}), 0.5) == 1);
  // The two-sigma allowance is subtracted from the point estimate.
  std::vector<ShellRow> noisy = shell_table({0.9, 0.52});
  noisy[1].sum.std_err = 0.02;
  CHECK(find_n0(noisy, 0.5) == 1);
  CHECK_THROWS_AS(find_n0(shell_table({0.9, 0.52}), 0.5), std::invalid_argument);
}

TEST_CASE("mass_from_lambda") {
  CHECK(mass_from_lambda(std::exp(-2.0), 1, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // Close to one: no decay budget left.
  CHECK_THROWS_AS(mass_from_lambda(0.999999, 1, 0.5), std::invalid_argument);
  // Small delta approaches the raw rate.
  CHECK(mass_from_lambda(0.5, 2, 1e-9) ==
        doctest::Approx(-std::log(0.5) / 2.0).epsilon(1e-6));
  CHECK_THROWS_AS(mass_from_lambda(1.5, 1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(mass_from_lambda(0.5, 1, 0.0), std::invalid_argument);
}

TEST_CASE("mass relation round-trips") {
  SmallRng rng(321);
  for (int trial = 0; trial < 100; ++trial) {
    const double lambda = rng.uniform(0.05, 0.95);
    const std::uint32_t n0 = static_cast<std::uint32_t>(rng.range(1, 6));
    const double raw = -std::log(lambda) / n0;
    const double delta = rng.uniform(0.05, 0.9) * raw;
    const MassParams mp = MassParams::from(lambda, n0, delta);
    CHECK(std::abs(std::exp(-(mp.m + mp.delta)) - std::pow(lambda, 1.0 / n0)) <= 1e-12);
  }
}

TEST_CASE("l1 shell counts") {
  const auto k0 = l1_shell_counts(0, 5);
  CHECK(k0 == std::vector<std::uint64_t>{1, 0, 0, 0, 0, 0});
  const auto k1 = l1_shell_counts(1, 5);
  CHECK(k1 == std::vector<std::uint64_t>{1, 2, 2, 2, 2, 2});
  const auto k2 = l1_shell_counts(2, 5);
  CHECK(k2 == std::vector<std::uint64_t>{1, 4, 8, 12, 16, 20});
  const auto k3 = l1_shell_counts(3, 3);
  CHECK(k3[1] == 6);
  CHECK(k3[2] == 18);
  CHECK(k3[3] == 38);
}

TEST_CASE("chi_m partial sums") {
  const Box box = Box::centered(1, 1, 3, 3);
  // beta = 0: exactly the origin term.
  {
    const MassParams mass = MassParams::from(0.5, 1, 0.2);
    const ChiM chi =
        chi_m_partial(ModelParams{1, 1, 1.0, 0.0}, box, 500, RngSeed{33, 0}, mass);
    CHECK(chi.partial == 1.0);
    CHECK(chi.partial_std_err == 0.0);
    CHECK(chi.tail_bound > 0.0);  // analytic tail ignores the measured zeros
    CHECK(chi.tail_valid);
  }
  // m = 0 reduces the partial sum to the chi estimate.
  {
    const ModelParams p{1, 1, 1.0, 0.2};
    const MassParams mass{0.5, 1, 0.1, 0.0};
    const ChiM chi = chi_m_partial(p, box, 3000, RngSeed{33, 0}, mass);
    const ChiEstimate ce = estimate_chi(p, box, 3000, RngSeed{33, 0});
    CHECK(chi.partial == doctest::Approx(ce.cluster_size.mean).epsilon(1e-12));
  }
  // Partial sums grow with the box.
  {
    const ModelParams p{1, 1, 1.0, 0.2};
    const MassParams mass = MassParams::from(0.5, 1, 0.2);
    const ChiM small = chi_m_partial(p, Box::centered(1, 1, 2, 2), 3000, RngSeed{34, 0}, mass);
    const ChiM large = chi_m_partial(p, Box::centered(1, 1, 3, 4), 3000, RngSeed{34, 0}, mass);
    CHECK(large.partial >= small.partial - 1e-12);
  }
  // k = 0 has no shell tail.
  {
    const MassParams mass = MassParams::from(0.5, 1, 0.2);
    const ChiM chi = chi_m_partial(ModelParams{0, 1, 0.5, 0.1}, Box::centered(0, 1, 0, 6), 500,
                                   RngSeed{35, 0}, mass);
    CHECK(chi.tail_bound == 0.0);
  }
}

TEST_CASE("iterate_bound") {
  // At or below the base scale the trivial bound applies.
  CHECK(iterate_bound(0.1, 4.0, 1, 1.0, 0.1, 2.0, 4.0) == 1.0);
  CHECK(iterate_bound(0.1, 4.0, 1, 1.0, 0.1, 2.0, 1.0) == 1.0);
  // beta = 0 leaves only the alpha^n remainder.
  {
    const double b = iterate_bound(0.1, 1.0, 1, 1.0, 0.0, 1.0, 8.0);
    CHECK(b == doctest::Approx(std::pow(0.1, 3)).epsilon(1e-12));
  }
  // Inadmissible alpha.
  CHECK_THROWS_AS(iterate_bound(0.25, 4.0, 1, 1.0, 0.1, 2.0, 8.0), std::invalid_argument);
  CHECK_THROWS_AS(iterate_bound(0.0, 4.0, 1, 1.0, 0.1, 2.0, 8.0), std::invalid_argument);
}

TEST_CASE("final_constant closed form") {
  // d=1, eps=1, alpha=0.1, L0=4, beta=0.1, chi_m=2:
  // 4 * 0.8 / (1 - 0.4) + 2 * 8^2.
  CHECK(std::abs(final_constant(0.1, 4.0, 1, 1.0, 0.1, 2.0) - (16.0 / 3.0 + 128.0)) <= 1e-12);
  // beta = 0: only the tail term.
  CHECK(final_constant(0.1, 4.0, 1, 1.0, 0.0, 1.0) == doctest::Approx(128.0));
  // Approaching the admissibility boundary blows up.
  const double near = 0.25 * (1.0 - 1e-12);
  CHECK(final_constant(near, 4.0, 1, 1.0, 0.1, 2.0) > 1e9);
  CHECK_THROWS_AS(final_constant(0.1, 0.5, 1, 1.0, 0.1, 2.0), std::invalid_argument);
}

TEST_CASE("final_constant dominates the iterated bound") {
  SmallRng rng(513);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = trial % 2 + 1;
    const double eps = rng.uniform(0.25, 2.0);
    const double alpha = rng.uniform(0.05, 0.95) * std::pow(2.0, -(d + eps));
    const double L0 = rng.uniform(1.0, 16.0);
    const double beta = rng.uniform(0.0, 1.0);
    const double chi_m = rng.uniform(1.0, 5.0);
    const double C = final_constant(alpha, L0, d, eps, beta, chi_m);
    for (int i = 0; i < 50; ++i) {
      const double L = L0 * (1.0 + 1e-6) * std::pow(1e6, i / 49.0);
      const double lhs = iterate_bound(alpha, L0, d, eps, beta, chi_m, L) *
                         (1.0 + std::pow(L, d + eps));
      CHECK(C >= lhs - 1e-9 * C);
    }
  }
}

TEST_CASE("iterate_bound decreases along realistic scales") {
  // Subcritical-sized constants; checked on a dyadic-free grid.
  const double alpha = 0.1, L0 = 2.0, eps = 1.0, beta = 0.05, chi_m = 1.5;
  double prev = 2.0;
  for (double L = 2.0 * L0 + 0.1; L < 400.0; L *= 1.13) {
    const double b = iterate_bound(alpha, L0, 1, eps, beta, chi_m, L);
    CHECK(b <= prev + 1e-12);
    prev = b;
  }
}

TEST_CASE("fit_decay recovers synthetic parameters") {
  const ModelParams p{1, 1, 1.0, 0.1};
  const double m = 0.7, q = p.exponent(), c = 1.0;
  std::vector<TauPoint> table;
  for (std::int64_t s = 0; s <= 6; ++s) {
    for (std::int64_t r = 0; r <= 8; r += 2) {
      SplitPoint x{{s}, {r}};
      const double mean = c * std::exp(-m * static_cast<double>(s)) /
                          (1.0 + std::pow(static_cast<double>(r), q));
      table.push_back({x, Estimate{mean, 1e-12, 1000000}});
    }
  }
  const DecayFit fit = fit_decay(table, p);
  CHECK(fit.mode == "full");
  REQUIRE(fit.m_hat.has_value());
  REQUIRE(fit.q_hat.has_value());
  CHECK(std::abs(*fit.m_hat - m) <= 1e-6);
  CHECK(std::abs(*fit.q_hat - q) <= 1e-6);
  CHECK(std::abs(fit.c_hat - c) <= 1e-6);
  CHECK(fit.residual_rms <= 1e-6);

  // Homogeneity: scaling every mean scales only the amplitude.
  std::vector<TauPoint> scaled = table;
  for (TauPoint& pt : scaled) pt.est.mean *= 3.5;
  const DecayFit fit2 = fit_decay(scaled, p);
  CHECK(std::abs(*fit2.m_hat - *fit.m_hat) <= 1e-9);
  CHECK(std::abs(*fit2.q_hat - *fit.q_hat) <= 1e-9);
  CHECK(fit2.c_hat == doctest::Approx(3.5 * fit.c_hat).epsilon(1e-9));
}

TEST_CASE("fit_decay degenerate designs") {
  const ModelParams p{1, 1, 1.0, 0.1};
  // All short distances equal: long-only fit, no mass estimate.
  {
    std::vector<TauPoint> table;
    for (std::int64_t r = 1; r <= 9; ++r)
      table.push_back({SplitPoint{{2}, {r}},
                       Estimate{0.5 / (1.0 + std::pow(r, 2.0)), 1e-9, 100000}});
    const DecayFit fit = fit_decay(table, p);
    CHECK(fit.mode == "long_only");
    CHECK_FALSE(fit.m_hat.has_value());
    REQUIRE(fit.q_hat.has_value());
    CHECK(std::abs(*fit.q_hat - 2.0) <= 1e-5);
  }
  // All long distances equal: short-only fit, no exponent estimate.
  {
    std::vector<TauPoint> table;
    for (std::int64_t s = 0; s <= 6; ++s)
      table.push_back({SplitPoint{{s}, {3}}, Estimate{0.4 * std::exp(-0.5 * s), 1e-9, 100000}});
    const DecayFit fit = fit_decay(table, p);
    CHECK(fit.mode == "short_only");
    CHECK_FALSE(fit.q_hat.has_value());
    REQUIRE(fit.m_hat.has_value());
    CHECK(std::abs(*fit.m_hat - 0.5) <= 1e-6);
  }
  // Too few usable points.
  {
    std::vector<TauPoint> table;
    table.push_back({SplitPoint{{0}, {1}}, Estimate{0.0, 0.0, 100}});
    table.push_back({SplitPoint{{0}, {2}}, Estimate{0.001, 0.01, 100}});  // below 4 sigma
    CHECK_THROWS_AS(fit_decay(table, p), std::invalid_argument);
  }
  // Fixed-q mode.
  {
    std::vector<TauPoint> table;
    for (std::int64_t r = 1; r <= 9; ++r)
      table.push_back({SplitPoint{{0}, {r}},
                       Estimate{0.7 / (1.0 + std::pow(r, 1.5)), 1e-9, 100000}});
    const ModelParams q{1, 1, 0.5, 0.1};
    const DecayFit fit = fit_decay(table, q, 1.5);
    CHECK(fit.mode == "fixed_q");
    CHECK(std::abs(fit.c_hat - 0.7) <= 1e-6);
  }
}

TEST_CASE("verify_theorem_bound") {
  const ModelParams p{1, 1, 1.0, 0.1};
  std::vector<TauPoint> table;
  table.push_back({SplitPoint{{0}, {1}}, Estimate{0.2, 0.01, 1000}});
  table.push_back({SplitPoint{{1}, {0}}, Estimate{0.1, 0.01, 1000}});
  // A zero constant fails wherever tau is positive.
  {
    const BoundReport rep = verify_theorem_bound(table, 0.0, 0.5, p);
    CHECK_FALSE(rep.all_pass());
    CHECK(rep.violations.size() == 2);
  }
  // A generous constant passes.
  {
    const BoundReport rep = verify_theorem_bound(table, 10.0, 0.5, p);
    CHECK(rep.all_pass());
    CHECK(rep.worst_slack > 0.0);
  }
  // All-zero estimates pass for any positive constant.
  {
    std::vector<TauPoint> zeros;
    zeros.push_back({SplitPoint{{2}, {3}}, Estimate{0.0, 0.0, 1000}});
    const BoundReport rep = verify_theorem_bound(zeros, 0.5, 1.0, p);
    CHECK(rep.all_pass());
  }
}

TEST_CASE("certificate consistency check") {
  const ModelParams p{1, 1, 1.0, 0.05};
  BoundCertificate cert;
  cert.lambda = 0.5;
  cert.n0 = 1;
  cert.delta = 0.5 * -std::log(0.5);
  cert.m = -std::log(0.5) - cert.delta;
  cert.chi_m = 1.5;
  cert.L0 = 2.0;
  cert.alpha = 0.125;
  cert.C = final_constant(cert.alpha, cert.L0, p.d, p.epsilon, p.beta, cert.chi_m);
  CHECK_NOTHROW(cert.check(p));
  BoundCertificate bad = cert;
  bad.C = 1.0;  // below the tail term 2*(2*L0)^2 = 32
  CHECK_THROWS_AS(bad.check(p), std::logic_error);
  bad = cert;
  bad.m = cert.m * 1.1;
  CHECK_THROWS_AS(bad.check(p), std::logic_error);
}

}  // TEST_SUITE
