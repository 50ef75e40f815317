#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "percolab/model.hpp"
#include "percolab/rng.hpp"

namespace percolab {

/// Monte Carlo estimate. For indicator estimators std_err is the Bernoulli
/// formula sqrt(mean(1-mean)/n); for cluster sizes it is the sample
/// standard deviation over sqrt(n).
struct Estimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::uint64_t n_samples = 0;

  static Estimate bernoulli(std::uint64_t hits, std::uint64_t n);
};

/// Coordinate hash of a site; identical across boxes, so an edge receives
/// the same uniform draw in every box that contains it.
std::uint64_t point_hash(const SplitPoint& p);

/// Canonical key of the unordered edge {u,v}.
std::uint64_t edge_key(const SplitPoint& u, const SplitPoint& v);

/// One sampled bond configuration. open_edges holds site-index pairs (a<b)
/// in canonical enumeration order; rebuilding from (box, params, seed)
/// reproduces the identical set.
struct Configuration {
  Box box;
  ModelParams params;
  RngSeed seed;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> open_edges;
};

/// Draws every candidate edge of the box independently with its bond
/// probability. Serial reference path; the estimators below sample edges
/// lazily but reproduce exactly the same per-edge draws.
Configuration sample_configuration(const Box& box, const ModelParams& p, RngSeed seed);

/// Connected components of the open subgraph. comp[i] is the smallest site
/// index in i's component, so the labeling is canonical and idempotent.
std::vector<std::uint32_t> components(const Configuration& c);

/// Open cluster of `origin` inside the cutoff box. Sites ascending.
struct Cluster {
  std::vector<std::uint32_t> sites;
  bool touched_boundary = false;
};

/// Breadth-first cluster growth with lazy edge sampling. Each edge's state
/// is a pure function of (seed, edge identity), so inspection order and
/// repeat inspections cannot change the result. touched_boundary flags
/// clusters reaching the cutoff surface (truncation diagnostic).
Cluster grow_cluster(const SplitPoint& origin, const ModelParams& p, const Box& cutoff,
                     RngSeed seed);

/// P{x <-> y} on the box, n independent samples. Deterministic in
/// (inputs, seed); independent of `workers` (0 = all available cores).
Estimate estimate_tau(const SplitPoint& x, const SplitPoint& y, const Box& box,
                      const ModelParams& p, std::uint64_t n, RngSeed seed, int workers = 0);

/// P{x <-> y inside S}: connectivity along paths whose sites all lie in S.
/// Requires x in S.
Estimate estimate_tau_restricted(const SplitPoint& x, const SplitPoint& y,
                                 const std::vector<SplitPoint>& S, const Box& box,
                                 const ModelParams& p, std::uint64_t n, RngSeed seed,
                                 int workers = 0);

/// Mean cluster size of the origin, truncated to the cutoff box.
/// boundary_fraction is the fraction of samples whose cluster touched the
/// cutoff surface.
struct ChiEstimate {
  Estimate cluster_size;
  double boundary_fraction = 0.0;
};
ChiEstimate estimate_chi(const ModelParams& p, const Box& cutoff, std::uint64_t n,
                         RngSeed seed, int workers = 0);

/// Tilted connectivity T_m(x,y) = e^(m ||x0-y0||) tau_xy.
Estimate estimate_tilted_tau(const SplitPoint& x, const SplitPoint& y, double m,
                             const Box& box, const ModelParams& p, std::uint64_t n,
                             RngSeed seed, int workers = 0);

/// Per-site tally of n cluster-growth samples from one origin. One pass
/// serves the tau table, chi, the shell table, gamma_L, and the tilted sup;
/// all accumulators are integers, so totals are exactly independent of the
/// worker partition.
struct ClusterStatsTable {
  Box box;
  SplitPoint origin;
  std::uint64_t n_samples = 0;
  std::vector<std::uint64_t> site_hits;   ///< per site: samples containing it
  std::vector<std::uint32_t> site_shell;  ///< per site: ||z0 - origin0||
  std::vector<std::uint32_t> site_cyl;    ///< per site: ||z1 - origin1||
  std::vector<std::uint64_t> shell_sum;   ///< per shell: sum of member counts
  std::vector<std::uint64_t> shell_sumsq;
  std::uint64_t size_sum = 0;
  std::uint64_t size_sumsq = 0;
  std::uint64_t boundary_touches = 0;

  Estimate tau_at(std::uint32_t site) const;
  Estimate tau_at(const SplitPoint& z) const;
};

ClusterStatsTable collect_cluster_stats(const SplitPoint& origin, const Box& box,
                                        const ModelParams& p, std::uint64_t n, RngSeed seed,
                                        int workers = 0);

/// gamma_L = sum over u in C_L(x), v outside C_L(x) of T_m(x,u) p_uv,
/// with v truncated to the box. T_m(x,u) is estimated from one set of
/// cluster-growth samples shared by all u; the p_uv factors are exact.
/// std_err is the conservative sum of the per-term standard errors.
struct GammaEstimate {
  double L = 0.0;
  Estimate value;
};
GammaEstimate estimate_gamma_L(const SplitPoint& x, double L, double m, const Box& box,
                               const ModelParams& p, std::uint64_t n, RngSeed seed,
                               int workers = 0);

/// Same, for a whole grid of L values from a single set of samples.
std::vector<GammaEstimate> estimate_gamma_scan(const SplitPoint& x,
                                               const std::vector<double>& Ls, double m,
                                               const Box& box, const ModelParams& p,
                                               std::uint64_t n, RngSeed seed,
                                               int workers = 0);
std::vector<GammaEstimate> gamma_scan_from_stats(const ClusterStatsTable& stats,
                                                 const std::vector<double>& Ls, double m,
                                                 const ModelParams& p);

/// Plug-in sup of T_m(0,u) over u outside the cylinder C_L(0), within the
/// box. Reports the maximizing site; no bias correction.
struct SupEstimate {
  Estimate value;
  SplitPoint argmax;
};
SupEstimate estimate_tm_sup(double L, double m, const Box& box, const ModelParams& p,
                            std::uint64_t n, RngSeed seed, int workers = 0);
SupEstimate tm_sup_from_stats(const ClusterStatsTable& stats, double L, double m);

}  // namespace percolab
