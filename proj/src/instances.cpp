#include "percolab/instances.hpp"

#include <algorithm>

namespace percolab {

namespace {

std::vector<std::uint32_t> random_separating_set(SmallRng& rng, std::uint32_t n_sites,
                                                 std::uint32_t x, std::uint32_t y) {
  std::vector<std::uint32_t> S;
  S.push_back(x);
  for (std::uint32_t s = 0; s < n_sites; ++s) {
    if (s == x || s == y) continue;
    if (rng.next_unit() < 0.5) S.push_back(s);
  }
  std::sort(S.begin(), S.end());
  return S;
}

}  // namespace

WeightedGraph random_graph(SmallRng& rng, std::uint32_t max_sites, std::uint32_t max_edges) {
  WeightedGraph g;
  g.n_sites = static_cast<std::uint32_t>(rng.range(3, static_cast<std::int64_t>(max_sites)));
  for (std::uint32_t a = 0; a < g.n_sites; ++a)
    for (std::uint32_t b = a + 1; b < g.n_sites; ++b)
      if (rng.next_unit() < 0.5) g.edges.push_back({a, b, rng.uniform(0.05, 0.95)});
  while (g.edges.size() > max_edges) {
    const std::size_t drop = rng.below(g.edges.size());
    g.edges.erase(g.edges.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  return g;
}

CheckInstance random_check_instance(SmallRng& rng, std::uint32_t index) {
  CheckInstance inst;
  inst.name = "random-" + std::to_string(index);
  inst.graph = random_graph(rng);
  inst.x = static_cast<std::uint32_t>(rng.below(inst.graph.n_sites));
  do {
    inst.y = static_cast<std::uint32_t>(rng.below(inst.graph.n_sites));
  } while (inst.y == inst.x);
  inst.S = random_separating_set(rng, inst.graph.n_sites, inst.x, inst.y);
  return inst;
}

std::vector<CheckInstance> model_box_instances(std::uint32_t count, SmallRng& rng) {
  struct Combo {
    int k, d;
  };
  const Combo dims[] = {{0, 1}, {1, 1}, {1, 2}};
  const double betas[] = {0.1, 0.3};
  const double epsilons[] = {0.5, 1.0};

  std::vector<CheckInstance> out;
  out.reserve(count);
  std::uint32_t idx = 0;
  while (out.size() < count) {
    for (const Combo& c : dims) {
      for (const double beta : betas) {
        for (const double eps : epsilons) {
          if (out.size() >= count) return out;
          ModelParams p{c.k, c.d, eps, beta};
          Box box;
          if (c.k == 0 && c.d == 1) {
            const std::int64_t len = rng.range(4, 6);  // up to C(6,2)=15 edges
            box.lo1 = {0};
            box.hi1 = {len - 1};
          } else if (c.k == 1 && c.d == 1) {
            box.lo0 = {0};
            box.hi0 = {rng.range(1, 2)};
            box.lo1 = {0};
            box.hi1 = {2};  // <= 3 fibers of 3 sites: 9..12 edges
          } else {
            box.lo0 = {0};
            box.hi0 = {1};
            box.lo1 = {0, 0};
            box.hi1 = {1, 1};  // 2 fibers of 4 sites: 16 edges
          }
          CheckInstance inst;
          inst.name = "box-" + std::to_string(idx++) + "-k" + std::to_string(c.k) + "d" +
                      std::to_string(c.d);
          // Generation ignores the enumeration cap; the checks enforce it.
          inst.graph = model_subgraph(box, p, 30);
          inst.x = static_cast<std::uint32_t>(rng.below(inst.graph.n_sites));
          do {
            inst.y = static_cast<std::uint32_t>(rng.below(inst.graph.n_sites));
          } while (inst.y == inst.x);
          inst.S = random_separating_set(rng, inst.graph.n_sites, inst.x, inst.y);
          out.push_back(std::move(inst));
        }
      }
    }
  }
  return out;
}

std::vector<McInstance> mc_instances(std::uint32_t count, SmallRng& rng,
                                     std::uint32_t max_edges) {
  std::vector<McInstance> out;
  out.reserve(count);
  std::uint32_t idx = 0;
  while (out.size() < count) {
    WeightedGraph g = random_graph(rng, 6, max_edges);
    const std::uint32_t x = static_cast<std::uint32_t>(rng.below(g.n_sites));
    std::uint32_t y;
    do {
      y = static_cast<std::uint32_t>(rng.below(g.n_sites));
    } while (y == x);
    const double exact = exact_tau(g, x, y);
    // Keep tau away from 0 and 1 so sampling noise is informative.
    if (exact < 0.05 || exact > 0.95) continue;
    McInstance inst;
    inst.name = "mc-" + std::to_string(idx++);
    inst.graph = std::move(g);
    inst.x = x;
    inst.y = y;
    inst.exact_value = exact;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace percolab
