#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "percolab/model.hpp"
#include "percolab/rng.hpp"
#include "percolab/sampler.hpp"

namespace percolab {

/// Estimated shell sum: for each n, sum over sites with ||x0|| = n (all x1
/// in the box) of tau_0x.
struct ShellRow {
  std::uint32_t shell = 0;
  Estimate sum;
};

/// Shell sums per short-direction L1 distance, from cluster-growth samples
/// rooted at the origin. Requires the origin inside the box.
std::vector<ShellRow> fiber_sums(const ModelParams& p, const Box& box, std::uint64_t n_samples,
                                 RngSeed seed, int workers = 0);
std::vector<ShellRow> fiber_sums_from_stats(const ClusterStatsTable& stats);

/// Smallest n0 >= 1 such that every tabulated shell n >= n0 satisfies
/// mean - 2 std_err < lambda. Throws if no suffix qualifies. A table with
/// no shells above 0 (k = 0) yields n0 = 1 vacuously.
std::uint32_t find_n0(const std::vector<ShellRow>& shells, double lambda);

/// Mass from the relation e^-(m+delta) = lambda^(1/n0):
///   m = -ln(lambda)/n0 - delta.  Throws if m <= 0.
double mass_from_lambda(double lambda, std::uint32_t n0, double delta);

/// Bundled mass context: lambda, n0, the margin delta, and the resulting m.
struct MassParams {
  double lambda = 0.5;
  std::uint32_t n0 = 1;
  double delta = 0.0;
  double m = 0.0;

  static MassParams from(double lambda, std::uint32_t n0, double delta);
};

/// Truncated tilted susceptibility sum_x e^(m||x0||) tau_0x over the box,
/// plus an analytic tail bound for shells beyond the box:
///   tail = sum_{n > max_shell} (1/lambda) N_k(n) e^(-delta n),
/// with N_k(n) the exact L1 shell cardinality of Z^k. The tail bound is
/// valid once max_shell >= n0 (tail_valid).
struct ChiM {
  double partial = 0.0;
  double partial_std_err = 0.0;
  double tail_bound = 0.0;
  std::uint32_t max_shell = 0;
  bool tail_valid = false;

  double total() const { return partial + tail_bound; }
};
ChiM chi_m_partial(const ModelParams& p, const Box& box, std::uint64_t n_samples, RngSeed seed,
                   const MassParams& mass, int workers = 0);
ChiM chi_m_from_shells(const std::vector<ShellRow>& shells, int k, const MassParams& mass);

/// Number of points of Z^k at L1 distance exactly n, for n = 0..n_max.
/// Exact dynamic programming.
std::vector<std::uint64_t> l1_shell_counts(int k, std::uint32_t n_max);

/// Multi-scale upper bound on the tilted sup T_m(L) for L > L0:
/// with n the smallest integer such that L 2^-n <= L0,
/// A = 2^(d+eps) 2 beta chi_m^2 and q = alpha 2^(d+eps) < 1,
///   bound = A (sum_{j<n} q^j) / (1 + L^(d+eps)) + alpha^n,
/// using T_m <= 1 at the base scale. Returns 1 when L <= L0.
double iterate_bound(double alpha, double L0, int d, double epsilon, double beta, double chi_m,
                     double L);

/// Closed form dominating iterate_bound * (1 + L^(d+eps)) over all L > L0:
///   C = 2^(d+eps) 2 beta chi_m^2 / (1 - alpha 2^(d+eps)) + 2 (2 L0)^(d+eps).
/// Requires L0 >= 1 for the tail term to dominate the alpha^n remainder.
double final_constant(double alpha, double L0, int d, double epsilon, double beta,
                      double chi_m);

/// One measured connectivity point.
struct TauPoint {
  SplitPoint x;
  Estimate est;
};

/// Weighted least-squares fit of ln(mean) to
///   ln c - m ||x0|| - ln(1 + ||x1||^q),
/// weights 1/std_err^2, restricted to points with mean > 4 std_err.
/// Degenerate designs fall back to long-only (all ||x0|| equal; m_hat
/// unset) or short-only (all ||x1|| equal; q_hat unset) fits.
struct DecayFit {
  std::optional<double> m_hat;
  std::optional<double> q_hat;
  double c_hat = 0.0;
  double residual_rms = 0.0;
  std::string mode;  ///< "full", "long_only", "short_only", "fixed_q"
  std::uint32_t n_points = 0;
  std::uint64_t s_min = 0, s_max = 0;  ///< ||x0|| range of the window
  std::uint64_t r_min = 0, r_max = 0;  ///< ||x1|| range of the window
};
DecayFit fit_decay(const std::vector<TauPoint>& table, const ModelParams& p,
                   std::optional<double> fixed_q = std::nullopt);

/// Pointwise check of mean - 2 std_err <= C e^(-m||x0||) / (1+||x1||^(d+eps)).
struct BoundCheckPoint {
  SplitPoint x;
  double mean = 0.0;
  double std_err = 0.0;
  double bound = 0.0;
  double slack = 0.0;  ///< bound - (mean - 2 std_err)
  bool pass = false;
};
struct BoundReport {
  std::uint64_t n_points = 0;
  std::uint64_t n_pass = 0;
  double worst_slack = 0.0;
  std::vector<BoundCheckPoint> violations;
  bool all_pass() const { return n_pass == n_points; }
};
BoundReport verify_theorem_bound(const std::vector<TauPoint>& table, double C, double m,
                                 const ModelParams& p);

/// Constants produced by the multi-scale pipeline, with provenance notes.
struct BoundCertificate {
  double lambda = 0.0;
  std::uint32_t n0 = 1;
  double delta = 0.0;
  double m = 0.0;
  double chi_m = 0.0;
  double chi_m_partial_sum = 0.0;
  double chi_m_tail = 0.0;
  double L0 = 0.0;
  double alpha = 0.0;
  double C = 0.0;
  std::string lambda_provenance;
  std::string n0_provenance;
  std::string delta_provenance;
  std::string m_provenance;
  std::string chi_m_provenance;
  std::string L0_provenance;
  std::string alpha_provenance;
  std::string C_provenance;

  /// Internal consistency: mass relation round-trips, alpha admissible,
  /// C >= 2 (2 L0)^(d+eps). Throws std::logic_error on violation.
  void check(const ModelParams& p) const;
};

}  // namespace percolab
