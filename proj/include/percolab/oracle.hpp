#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "percolab/model.hpp"
#include "percolab/rng.hpp"
#include "percolab/sampler.hpp"

namespace percolab {

/// Thrown when a graph exceeds the exact-enumeration budget.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraphEdge {
  std::uint32_t a = 0, b = 0;  ///< a < b
  double p = 0.0;
};

/// Simple weighted graph: carrier for exact connectivity computations.
/// Sites are 0..n_sites-1; site_points optionally records lattice
/// coordinates when the graph came from a model box.
struct WeightedGraph {
  std::uint32_t n_sites = 0;
  std::vector<GraphEdge> edges;
  std::vector<SplitPoint> site_points;

  void validate() const;  ///< simple, sorted, probabilities in [0,1]
};

/// Default edge cap for exact enumeration (2^24 configurations).
/// Overridden by the PERCOLAB_CAP environment variable when set.
std::uint32_t default_cap();

/// Exact P{x <-> y}: sum over all 2^|E| configurations of the configuration
/// probability times the connectivity indicator. Compensated summation in
/// fixed block order; results do not depend on thread count.
double exact_tau(const WeightedGraph& g, std::uint32_t x, std::uint32_t y,
                 std::uint32_t cap = default_cap());

/// Exact P{x <-> y inside S}: enumeration on the subgraph induced by S.
/// Requires x in S; returns 0 when y is not in S.
double exact_tau_restricted(const WeightedGraph& g, std::uint32_t x, std::uint32_t y,
                            const std::vector<std::uint32_t>& S,
                            std::uint32_t cap = default_cap());

/// Independent second oracle: deletion-contraction recursion
///   tau(g) = p_e tau(g/e) + (1-p_e) tau(g-e).
double exact_tau_dc(const WeightedGraph& g, std::uint32_t x, std::uint32_t y,
                    std::uint32_t cap = default_cap());

/// Hammersley-Simon-Lieb check: for x in S, y not in S,
///   tau_xy <= sum over u in S, v not in S of tau^S_xu p_uv tau_vy.
/// Both sides computed exactly; holds means slack >= -1e-12.
struct HslReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
};
HslReport check_hsl(const WeightedGraph& g, std::uint32_t x, std::uint32_t y,
                    const std::vector<std::uint32_t>& S, std::uint32_t cap = default_cap());

/// FKG-type lower bound: tau_xy >= max over simple paths x..y of the
/// product of edge probabilities (hence >= p_xy when the direct edge
/// exists).
struct FkgReport {
  double tau = 0.0;
  double best_path_bound = 0.0;
  bool holds = false;
};
FkgReport check_fkg_lower(const WeightedGraph& g, std::uint32_t x, std::uint32_t y,
                          std::uint32_t cap = default_cap());

/// The model's edges and probabilities on a finite box, as a WeightedGraph.
WeightedGraph model_subgraph(const Box& box, const ModelParams& p,
                             std::uint32_t cap = default_cap());

/// Monte Carlo tau on a WeightedGraph (per-edge draws keyed by edge index);
/// used to cross-check estimators against the exact oracle.
Estimate estimate_tau_graph(const WeightedGraph& g, std::uint32_t x, std::uint32_t y,
                            std::uint64_t n, RngSeed seed, int workers = 0);

}  // namespace percolab
