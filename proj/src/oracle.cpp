#include "percolab/oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <string>

#include "percolab/union_find.hpp"

namespace percolab {

namespace {

constexpr std::uint64_t kGraphEdgeSalt = 0x9216d5d98979fb1bull;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

/// Neumaier compensated addition.
void kadd(double& sum, double& comp, double v) {
  const double t = sum + v;
  if (std::abs(sum) >= std::abs(v))
    comp += (sum - t) + v;
  else
    comp += (v - t) + sum;
  sum = t;
}

void check_cap(std::size_t n_edges, std::uint32_t cap) {
  if (n_edges > cap)
    throw CapExceeded("graph has " + std::to_string(n_edges) + " edges, enumeration cap is " +
                      std::to_string(cap));
}

std::uint32_t uf_find(std::vector<std::uint32_t>& parent, std::uint32_t x) {
  while (x != parent[x]) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

void WeightedGraph::validate() const {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const GraphEdge& e = edges[i];
    require(e.a < e.b, "edge endpoints not in canonical order");
    require(e.b < n_sites, "edge endpoint out of range");
    require(e.p >= 0.0 && e.p <= 1.0, "edge probability outside [0,1]");
    if (i > 0) {
      const GraphEdge& prev = edges[i - 1];
      require(prev.a < e.a || (prev.a == e.a && prev.b < e.b), "edges not sorted or duplicated");
    }
  }
  if (!site_points.empty())
    require(site_points.size() == n_sites, "site_points length mismatch");
}

std::uint32_t default_cap() {
  static const std::uint32_t cap = [] {
    if (const char* s = std::getenv("PERCOLAB_CAP")) {
      char* end = nullptr;
      const unsigned long v = std::strtoul(s, &end, 10);
      if (end != s && *end == '\0' && v >= 1 && v <= 30) return static_cast<std::uint32_t>(v);
      std::fprintf(stderr, "percolab: ignoring invalid PERCOLAB_CAP=%s\n", s);
    }
    return 24u;
  }();
  return cap;
}

double exact_tau(const WeightedGraph& g, std::uint32_t x, std::uint32_t y, std::uint32_t cap) {
  g.validate();
  require(x < g.n_sites && y < g.n_sites, "site out of range");
  check_cap(g.edges.size(), cap);
  if (x == y) return 1.0;

  const std::uint32_t n_edges = static_cast<std::uint32_t>(g.edges.size());
  const std::uint64_t total = 1ull << n_edges;
  // Fixed block decomposition: partial sums are merged in block order, so
  // the result is bit-identical for any thread count.
  const std::uint64_t n_blocks = std::min<std::uint64_t>(total, 512);
  const std::uint64_t block_len = total / n_blocks;
  std::vector<double> block_sum(n_blocks, 0.0);
  std::vector<double> block_comp(n_blocks, 0.0);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_blocks); ++b) {
    double sum = 0.0, comp = 0.0;
    std::vector<std::uint32_t> parent(g.n_sites);
    const std::uint64_t lo = static_cast<std::uint64_t>(b) * block_len;
    for (std::uint64_t mask = lo; mask < lo + block_len; ++mask) {
      double pr = 1.0;
      for (std::uint32_t e = 0; e < n_edges; ++e)
        pr *= (mask >> e & 1) ? g.edges[e].p : 1.0 - g.edges[e].p;
      if (pr == 0.0) continue;
      std::iota(parent.begin(), parent.end(), 0u);
      for (std::uint32_t e = 0; e < n_edges; ++e) {
        if (!(mask >> e & 1)) continue;
        const std::uint32_t ra = uf_find(parent, g.edges[e].a);
        const std::uint32_t rb = uf_find(parent, g.edges[e].b);
        if (ra != rb) parent[ra] = rb;
      }
      if (uf_find(parent, x) == uf_find(parent, y)) kadd(sum, comp, pr);
    }
    block_sum[static_cast<std::size_t>(b)] = sum;
    block_comp[static_cast<std::size_t>(b)] = comp;
  }

  double sum = 0.0, comp = 0.0;
  for (std::uint64_t b = 0; b < n_blocks; ++b) {
    kadd(sum, comp, block_sum[b]);
    kadd(sum, comp, block_comp[b]);
  }
  return sum + comp;
}

double exact_tau_restricted(const WeightedGraph& g, std::uint32_t x, std::uint32_t y,
                            const std::vector<std::uint32_t>& S, std::uint32_t cap) {
  g.validate();
  require(x < g.n_sites && y < g.n_sites, "site out of range");
  std::vector<std::uint32_t> remap(g.n_sites, 0xffffffffu);
  std::uint32_t next = 0;
  for (std::uint32_t s : S) {
    require(s < g.n_sites, "restriction site out of range");
    if (remap[s] == 0xffffffffu) remap[s] = next++;
  }
  require(remap[x] != 0xffffffffu, "x not in restriction set");
  if (remap[y] == 0xffffffffu) return 0.0;

  WeightedGraph sub;
  sub.n_sites = next;
  for (const GraphEdge& e : g.edges) {
    if (remap[e.a] == 0xffffffffu || remap[e.b] == 0xffffffffu) continue;
    std::uint32_t a = remap[e.a], b = remap[e.b];
    if (a > b) std::swap(a, b);
    sub.edges.push_back({a, b, e.p});
  }
  std::sort(sub.edges.begin(), sub.edges.end(), [](const GraphEdge& l, const GraphEdge& r) {
    return l.a < r.a || (l.a == r.a && l.b < r.b);
  });
  return exact_tau(sub, remap[x], remap[y], cap);
}

namespace {

double dc_recurse(std::vector<GraphEdge> edges, std::uint32_t x, std::uint32_t y) {
  if (x == y) return 1.0;
  if (edges.empty()) return 0.0;
  const GraphEdge e = edges.back();
  edges.pop_back();

  const double deleted = dc_recurse(edges, x, y);

  // Contract e: merge b into a, drop loops, combine parallel edges.
  std::vector<GraphEdge> contracted;
  contracted.reserve(edges.size());
  for (const GraphEdge& f : edges) {
    std::uint32_t a = f.a == e.b ? e.a : f.a;
    std::uint32_t b = f.b == e.b ? e.a : f.b;
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    bool merged = false;
    for (GraphEdge& h : contracted) {
      if (h.a == a && h.b == b) {
        h.p = 1.0 - (1.0 - h.p) * (1.0 - f.p);
        merged = true;
        break;
      }
    }
    if (!merged) contracted.push_back({a, b, f.p});
  }
  const std::uint32_t cx = x == e.b ? e.a : x;
  const std::uint32_t cy = y == e.b ? e.a : y;
  const double kept = dc_recurse(std::move(contracted), cx, cy);

  return e.p * kept + (1.0 - e.p) * deleted;
}

}  // namespace

double exact_tau_dc(const WeightedGraph& g, std::uint32_t x, std::uint32_t y,
                    std::uint32_t cap) {
  g.validate();
  require(x < g.n_sites && y < g.n_sites, "site out of range");
  check_cap(g.edges.size(), cap);
  return dc_recurse(g.edges, x, y);
}

HslReport check_hsl(const WeightedGraph& g, std::uint32_t x, std::uint32_t y,
                    const std::vector<std::uint32_t>& S, std::uint32_t cap) {
  g.validate();
  require(x < g.n_sites && y < g.n_sites, "site out of range");
  std::vector<std::uint8_t> in_S(g.n_sites, 0);
  for (std::uint32_t s : S) {
    require(s < g.n_sites, "restriction site out of range");
    in_S[s] = 1;
  }
  require(in_S[x], "x must be in S");
  require(!in_S[y], "y must be outside S");

  HslReport rep;
  rep.lhs = exact_tau(g, x, y, cap);

  std::vector<double> tau_vy(g.n_sites, -1.0);
  std::vector<double> tau_xu_S(g.n_sites, -1.0);
  double sum = 0.0, comp = 0.0;
  for (const GraphEdge& e : g.edges) {
    if (in_S[e.a] == in_S[e.b]) continue;  // not a crossing edge
    const std::uint32_t u = in_S[e.a] ? e.a : e.b;
    const std::uint32_t v = in_S[e.a] ? e.b : e.a;
    if (tau_xu_S[u] < 0.0) tau_xu_S[u] = exact_tau_restricted(g, x, u, S, cap);
    if (tau_vy[v] < 0.0) tau_vy[v] = exact_tau(g, v, y, cap);
    kadd(sum, comp, tau_xu_S[u] * e.p * tau_vy[v]);
  }
  rep.rhs = sum + comp;
  rep.slack = rep.rhs - rep.lhs;
  rep.holds = rep.slack >= -1e-12;
  return rep;
}

FkgReport check_fkg_lower(const WeightedGraph& g, std::uint32_t x, std::uint32_t y,
                          std::uint32_t cap) {
  g.validate();
  require(x < g.n_sites && y < g.n_sites, "site out of range");
  FkgReport rep;
  rep.tau = exact_tau(g, x, y, cap);

  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(g.n_sites);
  for (const GraphEdge& e : g.edges) {
    if (e.p <= 0.0) continue;
    adj[e.a].emplace_back(e.b, e.p);
    adj[e.b].emplace_back(e.a, e.p);
  }

  double best = (x == y) ? 1.0 : 0.0;
  std::vector<std::uint8_t> visited(g.n_sites, 0);
  auto dfs = [&](auto&& self, std::uint32_t u, double prod) -> void {
    if (u == y) {
      best = std::max(best, prod);
      return;
    }
    visited[u] = 1;
    for (const auto& [v, p] : adj[u]) {
      if (visited[v]) continue;
      const double next = prod * p;
      if (next > best) self(self, v, next);
    }
    visited[u] = 0;
  };
  if (x != y) dfs(dfs, x, 1.0);
  rep.best_path_bound = best;
  rep.holds = rep.tau >= best - 1e-12;
  return rep;
}

WeightedGraph model_subgraph(const Box& box, const ModelParams& p, std::uint32_t cap) {
  const auto edges = enumerate_edges_indexed(box, p);
  check_cap(edges.size(), cap);
  WeightedGraph g;
  g.n_sites = static_cast<std::uint32_t>(box.site_count());
  g.edges.reserve(edges.size());
  for (const IndexedEdge& e : edges) g.edges.push_back({e.a, e.b, e.probability});
  g.site_points.reserve(g.n_sites);
  for (std::uint32_t i = 0; i < g.n_sites; ++i) g.site_points.push_back(box.site_at(i));
  return g;
}

Estimate estimate_tau_graph(const WeightedGraph& g, std::uint32_t x, std::uint32_t y,
                            std::uint64_t n, RngSeed seed, int workers) {
  g.validate();
  require(x < g.n_sites && y < g.n_sites, "site out of range");
  require(n >= 1, "n_samples must be >= 1");
  if (x == y) return Estimate{1.0, 0.0, n};

  std::vector<std::uint64_t> keys(g.edges.size());
  for (std::size_t i = 0; i < keys.size(); ++i)
    keys[i] = mix64(kGraphEdgeSalt + static_cast<std::uint64_t>(i));

  std::uint64_t hits = 0;
  const std::int64_t sn = static_cast<std::int64_t>(n);
  const int nw = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel num_threads(nw) reduction(+ : hits)
  {
    std::vector<std::uint32_t> parent(g.n_sites);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < sn; ++i) {
      const std::uint64_t skey = sample_key(seed.at(static_cast<std::uint64_t>(i)));
      std::iota(parent.begin(), parent.end(), 0u);
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (edge_uniform(skey, keys[e]) >= g.edges[e].p) continue;
        const std::uint32_t ra = uf_find(parent, g.edges[e].a);
        const std::uint32_t rb = uf_find(parent, g.edges[e].b);
        if (ra != rb) parent[ra] = rb;
      }
      if (uf_find(parent, x) == uf_find(parent, y)) ++hits;
    }
  }
  return Estimate::bernoulli(hits, n);
}

}  // namespace percolab
