#include "percolab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace percolab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Estimate shell_estimate(std::uint64_t sum, std::uint64_t sumsq, std::uint64_t n) {
  Estimate e;
  e.n_samples = n;
  const double dn = static_cast<double>(n);
  e.mean = static_cast<double>(sum) / dn;
  if (n > 1) {
    const double var =
        (static_cast<double>(sumsq) - static_cast<double>(sum) * e.mean) / (dn - 1.0);
    e.std_err = var > 0.0 ? std::sqrt(var / dn) : 0.0;
  }
  return e;
}

}  // namespace

std::vector<ShellRow> fiber_sums_from_stats(const ClusterStatsTable& stats) {
  std::vector<ShellRow> rows;
  rows.reserve(stats.shell_sum.size());
  for (std::uint32_t n = 0; n < stats.shell_sum.size(); ++n)
    rows.push_back({n, shell_estimate(stats.shell_sum[n], stats.shell_sumsq[n],
                                      stats.n_samples)});
  return rows;
}

std::vector<ShellRow> fiber_sums(const ModelParams& p, const Box& box,
                                 std::uint64_t n_samples, RngSeed seed, int workers) {
  const SplitPoint origin = origin_point(p.k, p.d);
  return fiber_sums_from_stats(collect_cluster_stats(origin, box, p, n_samples, seed, workers));
}

std::uint32_t find_n0(const std::vector<ShellRow>& shells, double lambda) {
  require(lambda > 0.0 && lambda < 1.0, "lambda must be in (0,1)");
  require(!shells.empty(), "empty shell table");
  for (std::size_t i = 0; i < shells.size(); ++i)
    require(shells[i].shell == i, "shell table must be contiguous from 0");
  // Qualifying shell: point estimate minus two standard errors strictly
  // below lambda.
  auto qualifies = [&](const ShellRow& r) {
    return r.sum.mean - 2.0 * r.sum.std_err < lambda;
  };
  // Smallest n0 >= 1 such that all shells n >= n0 qualify. Shell indices in
  // the table are contiguous from 0.
  std::uint32_t n0 = static_cast<std::uint32_t>(shells.size());  // sentinel: none qualify
  for (std::size_t i = shells.size(); i-- > 1;) {
    if (qualifies(shells[i]))
      n0 = static_cast<std::uint32_t>(i);
    else
      break;
  }
  if (shells.size() == 1) return 1;  // no short directions: vacuous
  if (n0 == shells.size())
    throw std::invalid_argument("no shell suffix stays below lambda=" + std::to_string(lambda) +
                                "; box or beta too aggressive");
  return std::max<std::uint32_t>(n0, 1);
}

double mass_from_lambda(double lambda, std::uint32_t n0, double delta) {
  require(lambda > 0.0 && lambda < 1.0, "lambda must be in (0,1)");
  require(n0 >= 1, "n0 must be >= 1");
  require(delta > 0.0, "delta must be > 0");
  const double m = -std::log(lambda) / static_cast<double>(n0) - delta;
  if (!(m > 0.0))
    throw std::invalid_argument("delta leaves no positive mass: -ln(lambda)/n0 = " +
                                std::to_string(-std::log(lambda) / n0) + ", delta = " +
                                std::to_string(delta));
  return m;
}

MassParams MassParams::from(double lambda, std::uint32_t n0, double delta) {
  return MassParams{lambda, n0, delta, mass_from_lambda(lambda, n0, delta)};
}

std::vector<std::uint64_t> l1_shell_counts(int k, std::uint32_t n_max) {
  require(k >= 0, "k must be >= 0");
  std::vector<std::uint64_t> cur(n_max + 1, 0);
  cur[0] = 1;
  for (int j = 0; j < k; ++j) {
    // next[n] = cur[n] + 2 * sum_{c=1..n} cur[n-c], via prefix sums.
    std::vector<std::uint64_t> next(n_max + 1, 0);
    std::uint64_t prefix = 0;
    for (std::uint32_t n = 0; n <= n_max; ++n) {
      next[n] = cur[n] + 2 * prefix;
      prefix += cur[n];
    }
    cur = std::move(next);
  }
  return cur;
}

ChiM chi_m_from_shells(const std::vector<ShellRow>& shells, int k, const MassParams& mass) {
  require(mass.delta > 0.0, "mass margin delta must be > 0");
  require(mass.m >= 0.0, "mass must be >= 0");
  require(!shells.empty(), "empty shell table");

  ChiM out;
  out.max_shell = static_cast<std::uint32_t>(shells.size() - 1);
  for (const ShellRow& row : shells) {
    const double tilt = std::exp(mass.m * static_cast<double>(row.shell));
    out.partial += tilt * row.sum.mean;
    out.partial_std_err += tilt * row.sum.std_err;
  }

  // Analytic tail over shells beyond the box: per shell n, the fiber sum of
  // one x0 is at most lambda^floor(n/n0) <= (1/lambda) e^-(m+delta)n, and
  // the exact shell cardinality N_k(n) multiplies it. The e^(m n) tilt
  // leaves (1/lambda) N_k(n) e^(-delta n). With no short directions the
  // tail is empty and the bound holds vacuously.
  out.tail_valid = out.max_shell >= mass.n0 || k == 0;
  const double c1 = 1.0 / mass.lambda;
  std::uint32_t table_hi = out.max_shell + 1024;
  std::vector<std::uint64_t> counts = l1_shell_counts(k, table_hi);
  double tail = 0.0;
  for (std::uint32_t n = out.max_shell + 1;; ++n) {
    if (n > table_hi) {
      if (table_hi >= (1u << 20)) break;  // delta pathologically small
      table_hi *= 2;
      counts = l1_shell_counts(k, table_hi);
    }
    const double term =
        c1 * static_cast<double>(counts[n]) * std::exp(-mass.delta * static_cast<double>(n));
    tail += term;
    if (term < 1e-18 * (tail + 1.0)) break;
  }
  out.tail_bound = tail;
  return out;
}

ChiM chi_m_partial(const ModelParams& p, const Box& box, std::uint64_t n_samples, RngSeed seed,
                   const MassParams& mass, int workers) {
  return chi_m_from_shells(fiber_sums(p, box, n_samples, seed, workers), p.k, mass);
}

namespace {

void check_scale_args(double alpha, double L0, int d, double epsilon, double beta,
                      double chi_m) {
  require(d >= 1, "d must be >= 1");
  require(epsilon > 0.0, "epsilon must be > 0");
  const double admissible = std::pow(2.0, -(static_cast<double>(d) + epsilon));
  require(alpha > 0.0 && alpha < admissible, "alpha outside (0, 2^-(d+eps))");
  require(L0 > 0.0, "L0 must be > 0");
  require(beta >= 0.0 && beta <= 1.0, "beta outside [0,1]");
  require(chi_m > 0.0, "chi_m must be > 0");
}

}  // namespace

double iterate_bound(double alpha, double L0, int d, double epsilon, double beta, double chi_m,
                     double L) {
  check_scale_args(alpha, L0, d, epsilon, beta, chi_m);
  require(L > 0.0, "L must be > 0");
  if (L <= L0) return 1.0;  // T_m <= 1 always; nothing to iterate

  const double dexp = static_cast<double>(d) + epsilon;
  // Smallest n with L 2^-n <= L0. Halving is exact in floating point.
  int n = 0;
  for (double scale = L; scale > L0; scale *= 0.5) ++n;

  const double q = alpha * std::pow(2.0, dexp);
  double series = 0.0, qpow = 1.0, apow = 1.0;
  for (int j = 0; j < n; ++j) {
    series += qpow;
    qpow *= q;
    apow *= alpha;
  }
  const double volume_factor = std::pow(2.0, dexp) * 2.0 * beta * chi_m * chi_m;
  return volume_factor * series / (1.0 + std::pow(L, dexp)) + apow;
}

double final_constant(double alpha, double L0, int d, double epsilon, double beta,
                      double chi_m) {
  check_scale_args(alpha, L0, d, epsilon, beta, chi_m);
  require(L0 >= 1.0, "L0 must be >= 1 for the tail constant to dominate");
  const double dexp = static_cast<double>(d) + epsilon;
  const double q = alpha * std::pow(2.0, dexp);
  const double series_limit = std::pow(2.0, dexp) * 2.0 * beta * chi_m * chi_m / (1.0 - q);
  return series_limit + 2.0 * std::pow(2.0 * L0, dexp);
}

namespace {

struct WlsResult {
  double intercept = 0.0;
  double slope = 0.0;
  double sse = 0.0;
};

/// Weighted least squares z ~ intercept + slope * s. fit_slope == false
/// pins the slope to zero.
WlsResult wls(const std::vector<double>& s, const std::vector<double>& z,
              const std::vector<double>& w, bool fit_slope) {
  double Sw = 0, Sws = 0, Swss = 0, Swz = 0, Swsz = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    Sw += w[i];
    Sws += w[i] * s[i];
    Swss += w[i] * s[i] * s[i];
    Swz += w[i] * z[i];
    Swsz += w[i] * s[i] * z[i];
  }
  WlsResult r;
  const double denom = Sw * Swss - Sws * Sws;
  if (fit_slope && denom > 1e-12 * Sw * Swss) {
    r.slope = (Sw * Swsz - Sws * Swz) / denom;
    r.intercept = (Swz - r.slope * Sws) / Sw;
  } else {
    r.intercept = Swz / Sw;
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double e = z[i] - r.intercept - r.slope * s[i];
    r.sse += w[i] * e * e;
  }
  return r;
}

}  // namespace

DecayFit fit_decay(const std::vector<TauPoint>& table, const ModelParams& p,
                   std::optional<double> fixed_q) {
  p.validate();

  std::vector<double> s, r, y, w;
  std::set<std::uint64_t> distinct_s, distinct_r;
  std::uint64_t s_min = ~0ull, s_max = 0, r_min = ~0ull, r_max = 0;
  for (const TauPoint& pt : table) {
    if (!(pt.est.mean > 0.0)) continue;
    if (!(pt.est.mean > 4.0 * pt.est.std_err)) continue;
    if (!(pt.est.std_err > 0.0)) continue;  // no noise model to weight by
    const std::uint64_t si = l1_norm(pt.x.u0);
    const std::uint64_t ri = l1_norm(pt.x.u1);
    s.push_back(static_cast<double>(si));
    r.push_back(static_cast<double>(ri));
    y.push_back(std::log(pt.est.mean));
    w.push_back(1.0 / (pt.est.std_err * pt.est.std_err));
    distinct_s.insert(si);
    distinct_r.insert(ri);
    s_min = std::min(s_min, si);
    s_max = std::max(s_max, si);
    r_min = std::min(r_min, ri);
    r_max = std::max(r_max, ri);
  }
  if (s.size() < 3) throw std::invalid_argument("insufficient signal points for decay fit");

  const bool vary_s = distinct_s.size() >= 2;
  const bool vary_r = distinct_r.size() >= 2;

  DecayFit fit;
  fit.n_points = static_cast<std::uint32_t>(s.size());
  fit.s_min = s_min;
  fit.s_max = s_max;
  fit.r_min = r_min;
  fit.r_max = r_max;

  // For a given q the model is linear: ln(mean) + ln(1 + r^q) = ln c - m s.
  std::vector<double> z(s.size());
  auto sse_at = [&](double q) {
    for (std::size_t i = 0; i < s.size(); ++i)
      z[i] = y[i] + std::log1p(std::pow(r[i], q));
    return wls(s, z, w, vary_s);
  };

  double q_used = 0.0;
  WlsResult best;
  if (fixed_q) {
    q_used = *fixed_q;
    best = sse_at(q_used);
    fit.mode = "fixed_q";
    fit.q_hat = q_used;
  } else if (!vary_r) {
    // All long distances equal: q is not identifiable and the 1/(1+r^q)
    // factor folds into the amplitude.
    for (std::size_t i = 0; i < s.size(); ++i) z[i] = y[i];
    best = wls(s, z, w, vary_s);
    fit.mode = "short_only";
  } else {
    const double q_lo = 0.01;
    const double q_hi = 4.0 * p.exponent() + 4.0;
    const int grid = 512;
    double best_q = q_lo;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
      const double q = q_lo + (q_hi - q_lo) * i / grid;
      const double sse = sse_at(q).sse;
      if (sse < best_sse) {
        best_sse = sse;
        best_q = q;
      }
    }
    // Golden-section refinement around the grid minimum.
    double a = std::max(q_lo, best_q - (q_hi - q_lo) / grid);
    double b = std::min(q_hi, best_q + (q_hi - q_lo) / grid);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), dpt = a + gr * (b - a);
    double fc = sse_at(c).sse, fd = sse_at(dpt).sse;
    while (b - a > 1e-10) {
      if (fc < fd) {
        b = dpt;
        dpt = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = sse_at(c).sse;
      } else {
        a = c;
        c = dpt;
        fc = fd;
        dpt = a + gr * (b - a);
        fd = sse_at(dpt).sse;
      }
    }
    q_used = 0.5 * (a + b);
    best = sse_at(q_used);
    fit.mode = vary_s ? "full" : "long_only";
    fit.q_hat = q_used;
  }

  if (vary_s) fit.m_hat = -best.slope;
  fit.c_hat = std::exp(best.intercept);
  double Sw = 0;
  for (double wi : w) Sw += wi;
  fit.residual_rms = std::sqrt(best.sse / Sw);
  return fit;
}

BoundReport verify_theorem_bound(const std::vector<TauPoint>& table, double C, double m,
                                 const ModelParams& p) {
  p.validate();
  BoundReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (const TauPoint& pt : table) {
    BoundCheckPoint c;
    c.x = pt.x;
    c.mean = pt.est.mean;
    c.std_err = pt.est.std_err;
    const double sdist = static_cast<double>(l1_norm(pt.x.u0));
    const double rdist = static_cast<double>(l1_norm(pt.x.u1));
    c.bound = C * std::exp(-m * sdist) / (1.0 + std::pow(rdist, p.exponent()));
    c.slack = c.bound - (c.mean - 2.0 * c.std_err);
    c.pass = c.slack >= -1e-12;
    ++rep.n_points;
    if (c.pass)
      ++rep.n_pass;
    else
      rep.violations.push_back(c);
    rep.worst_slack = std::min(rep.worst_slack, c.slack);
  }
  return rep;
}

void BoundCertificate::check(const ModelParams& p) const {
  const double lhs = std::exp(-(m + delta));
  const double rhs = std::pow(lambda, 1.0 / static_cast<double>(n0));
  if (std::abs(lhs - rhs) > 1e-12)
    throw std::logic_error("certificate mass relation violated");
  const double admissible = std::pow(2.0, -p.exponent());
  if (!(alpha > 0.0 && alpha < admissible))
    throw std::logic_error("certificate alpha not admissible");
  const double tail = 2.0 * std::pow(2.0 * L0, p.exponent());
  if (!(C >= tail - 1e-9 * tail))
    throw std::logic_error("certificate constant below its tail term");
}

}  // namespace percolab
