#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "percolab/model.hpp"
#include "percolab/oracle.hpp"
#include "percolab/rng.hpp"

namespace percolab {

/// One admissible inequality-check instance: a weighted graph, a site pair,
/// and a separating set S with x in S and y outside.
struct CheckInstance {
  std::string name;
  WeightedGraph graph;
  std::uint32_t x = 0, y = 0;
  std::vector<std::uint32_t> S;
};

/// Erdos-Renyi style small graph: 3..max_sites sites, random edges with
/// probabilities in [0.05, 0.95], at most max_edges edges.
WeightedGraph random_graph(SmallRng& rng, std::uint32_t max_sites = 8,
                           std::uint32_t max_edges = 12);

/// Random admissible (g, x, y, S) on a random graph.
CheckInstance random_check_instance(SmallRng& rng, std::uint32_t index);

/// Model boxes across (k,d) in {(0,1),(1,1),(1,2)}, beta in {0.1,0.3},
/// epsilon in {0.5,1}, sized to stay within the enumeration cap, each with
/// a random admissible (x, y, S).
std::vector<CheckInstance> model_box_instances(std::uint32_t count, SmallRng& rng);

/// Instance for Monte Carlo vs exact comparison; exact_value is the
/// enumeration result, kept within [0.05, 0.95] so the four-sigma test has
/// resolution at moderate sample counts.
struct McInstance {
  std::string name;
  WeightedGraph graph;
  std::uint32_t x = 0, y = 0;
  double exact_value = 0.0;
};
std::vector<McInstance> mc_instances(std::uint32_t count, SmallRng& rng,
                                     std::uint32_t max_edges = 10);

}  // namespace percolab
