#include "percolab/sampler.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "percolab/union_find.hpp"

namespace percolab {

namespace {

constexpr std::uint64_t kPointHashInit = 0x243f6a8885a308d3ull;
constexpr std::uint64_t kSplitSep = 0x452821e638d01377ull;
constexpr std::uint64_t kEdgeSalt = 0x6a09e667f3bcc909ull;
constexpr std::uint32_t kNoTarget = 0xffffffffu;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::uint64_t combine_keys(std::uint64_t first, std::uint64_t second) {
  return mix64(first + mix64(second + kEdgeSalt));
}

int resolve_workers(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

/// Flattened box geometry plus the per-run probability tables.
struct Geom {
  int k = 0;
  std::uint32_t n_sites = 0;
  std::uint32_t fiber = 1;
  std::vector<std::uint32_t> ext0;      // u0 axis extents
  std::vector<std::uint64_t> stride0;   // u0 axis strides, in sites
  std::vector<std::uint64_t> site_hash;
  std::vector<std::uint16_t> fiber_l1;  // L1 distance between fiber offsets
  std::vector<double> p_long;           // bond probability by long distance
  double p_short = 0.0;
  std::vector<std::uint8_t> on_boundary;
};

std::vector<std::uint64_t> make_site_hashes(const Box& box) {
  const std::uint32_t n = static_cast<std::uint32_t>(box.site_count());
  std::vector<std::uint64_t> h(n);
  for (std::uint32_t i = 0; i < n; ++i) h[i] = point_hash(box.site_at(i));
  return h;
}

Geom build_geom(const Box& box, const ModelParams& p) {
  p.validate();
  box.validate();
  require(box.k() == p.k && box.d() == p.d, "box dimensions do not match (k,d)");
  require(box.fiber_size() <= 4096, "fiber too large for sampling tables");
  require(box.site_count() <= (1u << 22), "box too large for sampling tables");

  Geom g;
  g.k = p.k;
  g.n_sites = static_cast<std::uint32_t>(box.site_count());
  g.fiber = static_cast<std::uint32_t>(box.fiber_size());
  g.p_short = p.beta;

  g.ext0.resize(static_cast<std::size_t>(p.k));
  g.stride0.assign(static_cast<std::size_t>(p.k), g.fiber);
  for (int j = 0; j < p.k; ++j)
    g.ext0[static_cast<std::size_t>(j)] =
        static_cast<std::uint32_t>(box.hi0[static_cast<std::size_t>(j)] -
                                   box.lo0[static_cast<std::size_t>(j)] + 1);
  for (std::size_t j = g.stride0.size(); j-- > 1;)
    g.stride0[j - 1] = g.stride0[j] * g.ext0[j];

  g.site_hash = make_site_hashes(box);

  // Pairwise long distances between fiber offsets; the first fiber's sites
  // realize every offset.
  g.fiber_l1.resize(static_cast<std::size_t>(g.fiber) * g.fiber);
  std::uint64_t max_r = 0;
  {
    std::vector<SplitPoint> pts(g.fiber);
    for (std::uint32_t i = 0; i < g.fiber; ++i) pts[i] = box.site_at(i);
    for (std::uint32_t i = 0; i < g.fiber; ++i)
      for (std::uint32_t j = 0; j < g.fiber; ++j) {
        const std::uint64_t r = l1_dist(pts[i].u1, pts[j].u1);
        g.fiber_l1[static_cast<std::size_t>(i) * g.fiber + j] =
            static_cast<std::uint16_t>(r);
        max_r = std::max(max_r, r);
      }
  }
  g.p_long.assign(max_r + 1, 0.0);
  for (std::uint64_t r = 1; r <= max_r; ++r)
    g.p_long[r] = p.beta * 2.0 / (1.0 + std::pow(static_cast<double>(r), p.exponent()));

  g.on_boundary.assign(g.n_sites, 0);
  for (std::uint32_t i = 0; i < g.n_sites; ++i) {
    const SplitPoint s = box.site_at(i);
    bool edge_site = false;
    for (std::size_t j = 0; j < s.u0.size(); ++j)
      edge_site |= (s.u0[j] == box.lo0[j] || s.u0[j] == box.hi0[j]);
    for (std::size_t j = 0; j < s.u1.size(); ++j)
      edge_site |= (s.u1[j] == box.lo1[j] || s.u1[j] == box.hi1[j]);
    g.on_boundary[i] = edge_site ? 1 : 0;
  }
  return g;
}

bool edge_open(const Geom& g, std::uint64_t skey, std::uint32_t a, std::uint32_t b, double p) {
  const std::uint32_t lo = a < b ? a : b;
  const std::uint32_t hi = a < b ? b : a;
  return edge_uniform(skey, combine_keys(g.site_hash[lo], g.site_hash[hi])) < p;
}

struct Scratch {
  std::vector<std::uint64_t> mark;
  std::vector<std::uint32_t> queue;
  std::uint64_t tag = 0;

  explicit Scratch(std::uint32_t n) : mark(n, 0) { queue.reserve(256); }
};

struct BfsResult {
  std::uint32_t size = 0;
  bool found_target = false;
  bool touched_boundary = false;
};

/// Breadth-first exploration of the open cluster of `origin` under the
/// sample key. Edge states are pure functions of (skey, edge identity), so
/// no edge memoization is needed: re-inspection returns the same verdict.
/// `allowed` (optional) restricts the walk to a site subset; `target`
/// short-circuits the search. Visited sites are sc.queue[0 .. size).
BfsResult bfs(const Geom& g, std::uint32_t origin, std::uint64_t skey, Scratch& sc,
              std::uint32_t target, const std::uint8_t* allowed) {
  ++sc.tag;
  sc.queue.clear();
  sc.mark[origin] = sc.tag;
  sc.queue.push_back(origin);
  BfsResult res;
  res.touched_boundary = g.on_boundary[origin] != 0;
  if (origin == target) {
    res.size = 1;
    res.found_target = true;
    return res;
  }
  std::size_t head = 0;
  while (head < sc.queue.size()) {
    const std::uint32_t a = sc.queue[head++];
    const std::uint32_t base = (a / g.fiber) * g.fiber;
    const std::uint16_t* dist_row = g.fiber_l1.data() + std::size_t(a - base) * g.fiber;
    // Long-range partners inside the fiber.
    for (std::uint32_t ob = 0; ob < g.fiber; ++ob) {
      const std::uint32_t b = base + ob;
      if (sc.mark[b] == sc.tag) continue;  // covers b == a
      const double p = g.p_long[dist_row[ob]];
      if (p <= 0.0) continue;
      if (allowed && !allowed[b]) continue;
      if (!edge_open(g, skey, a, b, p)) continue;
      sc.mark[b] = sc.tag;
      sc.queue.push_back(b);
      res.touched_boundary |= g.on_boundary[b] != 0;
      if (b == target) {
        res.size = static_cast<std::uint32_t>(sc.queue.size());
        res.found_target = true;
        return res;
      }
    }
    // Nearest-neighbor short steps.
    if (g.p_short > 0.0) {
      for (int j = 0; j < g.k; ++j) {
        const std::uint64_t stride = g.stride0[static_cast<std::size_t>(j)];
        const std::uint32_t off =
            static_cast<std::uint32_t>((a / stride) % g.ext0[static_cast<std::size_t>(j)]);
        for (int dir = 0; dir < 2; ++dir) {
          std::uint32_t b;
          if (dir == 0) {
            if (off + 1 >= g.ext0[static_cast<std::size_t>(j)]) continue;
            b = a + static_cast<std::uint32_t>(stride);
          } else {
            if (off == 0) continue;
            b = a - static_cast<std::uint32_t>(stride);
          }
          if (sc.mark[b] == sc.tag) continue;
          if (allowed && !allowed[b]) continue;
          if (!edge_open(g, skey, a, b, g.p_short)) continue;
          sc.mark[b] = sc.tag;
          sc.queue.push_back(b);
          res.touched_boundary |= g.on_boundary[b] != 0;
          if (b == target) {
            res.size = static_cast<std::uint32_t>(sc.queue.size());
            res.found_target = true;
            return res;
          }
        }
      }
    }
  }
  res.size = static_cast<std::uint32_t>(sc.queue.size());
  return res;
}

/// Shared indicator-estimator loop: counts samples where x and y connect,
/// optionally restricted to an allowed site mask.
std::uint64_t count_connected(const Geom& g, std::uint32_t xi, std::uint32_t yi,
                              std::uint64_t n, RngSeed seed, int workers,
                              const std::uint8_t* allowed) {
  std::uint64_t hits = 0;
  const std::int64_t sn = static_cast<std::int64_t>(n);
#pragma omp parallel num_threads(resolve_workers(workers)) reduction(+ : hits)
  {
    Scratch sc(g.n_sites);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < sn; ++i) {
      const std::uint64_t skey = sample_key(seed.at(static_cast<std::uint64_t>(i)));
      if (bfs(g, xi, skey, sc, yi, allowed).found_target) ++hits;
    }
  }
  return hits;
}

}  // namespace

Estimate Estimate::bernoulli(std::uint64_t hits, std::uint64_t n) {
  Estimate e;
  e.n_samples = n;
  if (n == 0) return e;
  e.mean = static_cast<double>(hits) / static_cast<double>(n);
  e.std_err = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n));
  return e;
}

std::uint64_t point_hash(const SplitPoint& p) {
  std::uint64_t h = kPointHashInit;
  for (std::int64_t c : p.u0) h = mix64(h ^ static_cast<std::uint64_t>(c));
  h = mix64(h ^ kSplitSep);
  for (std::int64_t c : p.u1) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return h;
}

std::uint64_t edge_key(const SplitPoint& u, const SplitPoint& v) {
  const std::uint64_t hu = point_hash(u);
  const std::uint64_t hv = point_hash(v);
  return lex_less(u, v) ? combine_keys(hu, hv) : combine_keys(hv, hu);
}

Configuration sample_configuration(const Box& box, const ModelParams& p, RngSeed seed) {
  Configuration c{box, p, seed, {}};
  const auto edges = enumerate_edges_indexed(box, p);
  const auto hashes = make_site_hashes(box);
  const std::uint64_t skey = sample_key(seed);
  for (const auto& e : edges) {
    if (edge_uniform(skey, combine_keys(hashes[e.a], hashes[e.b])) < e.probability)
      c.open_edges.emplace_back(e.a, e.b);
  }
  return c;
}

std::vector<std::uint32_t> components(const Configuration& c) {
  const std::uint32_t n = static_cast<std::uint32_t>(c.box.site_count());
  UnionFind uf(n);
  for (const auto& [a, b] : c.open_edges) uf.unite(a, b);
  std::vector<std::uint32_t> comp(n);
  std::vector<std::uint32_t> label(n, kNoTarget);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t r = uf.find(i);
    if (label[r] == kNoTarget) label[r] = i;  // smallest member, scan is ascending
    comp[i] = label[r];
  }
  return comp;
}

Cluster grow_cluster(const SplitPoint& origin, const ModelParams& p, const Box& cutoff,
                     RngSeed seed) {
  const Geom g = build_geom(cutoff, p);
  require(cutoff.contains(origin), "origin outside cutoff box");
  Scratch sc(g.n_sites);
  const BfsResult r = bfs(g, cutoff.index_of(origin), sample_key(seed), sc, kNoTarget, nullptr);
  Cluster out;
  out.sites.assign(sc.queue.begin(), sc.queue.begin() + r.size);
  std::sort(out.sites.begin(), out.sites.end());
  out.touched_boundary = r.touched_boundary;
  return out;
}

Estimate estimate_tau(const SplitPoint& x, const SplitPoint& y, const Box& box,
                      const ModelParams& p, std::uint64_t n, RngSeed seed, int workers) {
  require(n >= 1, "n_samples must be >= 1");
  require(box.contains(x) && box.contains(y), "x or y outside box");
  if (x == y) return Estimate{1.0, 0.0, n};
  const Geom g = build_geom(box, p);
  const std::uint64_t hits =
      count_connected(g, box.index_of(x), box.index_of(y), n, seed, workers, nullptr);
  return Estimate::bernoulli(hits, n);
}

Estimate estimate_tau_restricted(const SplitPoint& x, const SplitPoint& y,
                                 const std::vector<SplitPoint>& S, const Box& box,
                                 const ModelParams& p, std::uint64_t n, RngSeed seed,
                                 int workers) {
  require(n >= 1, "n_samples must be >= 1");
  require(box.contains(x) && box.contains(y), "x or y outside box");
  const Geom g = build_geom(box, p);
  std::vector<std::uint8_t> allowed(g.n_sites, 0);
  bool x_in_S = false;
  for (const auto& s : S) {
    require(box.contains(s), "restriction set leaves the box");
    allowed[box.index_of(s)] = 1;
    x_in_S |= (s == x);
  }
  require(x_in_S, "x not in restriction set");
  if (x == y) return Estimate{1.0, 0.0, n};
  const std::uint32_t yi = box.index_of(y);
  if (!allowed[yi]) return Estimate::bernoulli(0, n);
  const std::uint64_t hits =
      count_connected(g, box.index_of(x), yi, n, seed, workers, allowed.data());
  return Estimate::bernoulli(hits, n);
}

Estimate estimate_tilted_tau(const SplitPoint& x, const SplitPoint& y, double m,
                             const Box& box, const ModelParams& p, std::uint64_t n,
                             RngSeed seed, int workers) {
  require(m >= 0.0, "m must be >= 0");
  Estimate e = estimate_tau(x, y, box, p, n, seed, workers);
  const double tilt = std::exp(m * static_cast<double>(l1_dist(x.u0, y.u0)));
  e.mean *= tilt;
  e.std_err *= tilt;
  return e;
}

Estimate ClusterStatsTable::tau_at(std::uint32_t site) const {
  return Estimate::bernoulli(site_hits[site], n_samples);
}

Estimate ClusterStatsTable::tau_at(const SplitPoint& z) const {
  return tau_at(box.index_of(z));
}

ClusterStatsTable collect_cluster_stats(const SplitPoint& origin, const Box& box,
                                        const ModelParams& p, std::uint64_t n, RngSeed seed,
                                        int workers) {
  require(n >= 1, "n_samples must be >= 1");
  require(box.contains(origin), "origin outside box");
  const Geom g = build_geom(box, p);

  ClusterStatsTable t;
  t.box = box;
  t.origin = origin;
  t.n_samples = n;
  t.site_hits.assign(g.n_sites, 0);
  t.site_shell.resize(g.n_sites);
  t.site_cyl.resize(g.n_sites);
  std::uint32_t max_shell = 0;
  for (std::uint32_t i = 0; i < g.n_sites; ++i) {
    const SplitPoint z = box.site_at(i);
    t.site_shell[i] = static_cast<std::uint32_t>(l1_dist(z.u0, origin.u0));
    t.site_cyl[i] = static_cast<std::uint32_t>(l1_dist(z.u1, origin.u1));
    max_shell = std::max(max_shell, t.site_shell[i]);
  }
  t.shell_sum.assign(max_shell + 1, 0);
  t.shell_sumsq.assign(max_shell + 1, 0);

  const std::uint32_t oi = box.index_of(origin);
  const std::int64_t sn = static_cast<std::int64_t>(n);

#pragma omp parallel num_threads(resolve_workers(workers))
  {
    Scratch sc(g.n_sites);
    std::vector<std::uint64_t> hits(g.n_sites, 0);
    std::vector<std::uint64_t> shell_sum(max_shell + 1, 0);
    std::vector<std::uint64_t> shell_sumsq(max_shell + 1, 0);
    std::vector<std::uint64_t> shell_cnt(max_shell + 1, 0);
    std::uint64_t size_sum = 0, size_sumsq = 0, touches = 0;

#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < sn; ++i) {
      const std::uint64_t skey = sample_key(seed.at(static_cast<std::uint64_t>(i)));
      const BfsResult r = bfs(g, oi, skey, sc, kNoTarget, nullptr);
      if (r.touched_boundary) ++touches;
      const std::uint64_t len = r.size;
      size_sum += len;
      size_sumsq += len * len;
      std::memset(shell_cnt.data(), 0, shell_cnt.size() * sizeof(std::uint64_t));
      for (std::uint32_t qi = 0; qi < r.size; ++qi) {
        const std::uint32_t s = sc.queue[qi];
        ++hits[s];
        ++shell_cnt[t.site_shell[s]];
      }
      for (std::uint32_t sh = 0; sh <= max_shell; ++sh) {
        const std::uint64_t c = shell_cnt[sh];
        shell_sum[sh] += c;
        shell_sumsq[sh] += c * c;
      }
    }

#pragma omp critical
    {
      for (std::uint32_t i = 0; i < g.n_sites; ++i) t.site_hits[i] += hits[i];
      for (std::uint32_t sh = 0; sh <= max_shell; ++sh) {
        t.shell_sum[sh] += shell_sum[sh];
        t.shell_sumsq[sh] += shell_sumsq[sh];
      }
      t.size_sum += size_sum;
      t.size_sumsq += size_sumsq;
      t.boundary_touches += touches;
    }
  }
  return t;
}

namespace {

/// Sample mean and standard error from integer (sum, sum of squares).
Estimate moments_estimate(std::uint64_t sum, std::uint64_t sumsq, std::uint64_t n) {
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

ChiEstimate estimate_chi(const ModelParams& p, const Box& cutoff, std::uint64_t n,
                         RngSeed seed, int workers) {
  const SplitPoint origin = origin_point(p.k, p.d);
  const ClusterStatsTable t = collect_cluster_stats(origin, cutoff, p, n, seed, workers);
  ChiEstimate out;
  out.cluster_size = moments_estimate(t.size_sum, t.size_sumsq, n);
  out.boundary_fraction = static_cast<double>(t.boundary_touches) / static_cast<double>(n);
  return out;
}

std::vector<GammaEstimate> gamma_scan_from_stats(const ClusterStatsTable& stats,
                                                 const std::vector<double>& Ls, double m,
                                                 const ModelParams& p) {
  require(m >= 0.0, "m must be >= 0");
  const Box& box = stats.box;
  const std::uint32_t fiber = static_cast<std::uint32_t>(box.fiber_size());
  const std::uint32_t n_sites = static_cast<std::uint32_t>(box.site_count());
  const std::uint64_t n = stats.n_samples;

  // Long-range probabilities and fiber-offset distances (v never leaves the
  // fiber of u: short bonds keep u1 fixed, so they cannot cross a cylinder
  // boundary).
  std::vector<SplitPoint> fpts(fiber);
  for (std::uint32_t i = 0; i < fiber; ++i) fpts[i] = box.site_at(i);
  std::vector<double> p_long;
  {
    std::uint64_t max_r = 0;
    for (std::uint32_t i = 0; i < fiber; ++i)
      max_r = std::max(max_r, l1_dist(fpts[i].u1, fpts[0].u1));
    for (std::uint32_t i = 0; i < fiber; ++i)
      for (std::uint32_t j = i + 1; j < fiber; ++j)
        max_r = std::max(max_r, l1_dist(fpts[i].u1, fpts[j].u1));
    p_long.assign(max_r + 1, 0.0);
    for (std::uint64_t r = 1; r <= max_r; ++r)
      p_long[r] = p.beta * 2.0 / (1.0 + std::pow(static_cast<double>(r), p.exponent()));
  }

  std::vector<GammaEstimate> out;
  out.reserve(Ls.size());
  std::vector<double> w1(fiber);
  for (const double L : Ls) {
    // w1[uoff] = sum of p_uv over fiber offsets v outside the cylinder.
    for (std::uint32_t uo = 0; uo < fiber; ++uo) {
      double w = 0.0;
      for (std::uint32_t vo = 0; vo < fiber; ++vo) {
        if (static_cast<double>(stats.site_cyl[vo]) <= L) continue;
        w += p_long[l1_dist(fpts[uo].u1, fpts[vo].u1)];
      }
      w1[uo] = w;
    }
    double value = 0.0, se = 0.0;
    for (std::uint32_t u = 0; u < n_sites; ++u) {
      if (static_cast<double>(stats.site_cyl[u]) > L) continue;
      if (stats.site_hits[u] == 0) continue;
      const double weight = w1[u % fiber];
      if (weight == 0.0) continue;
      const double tilt = std::exp(m * static_cast<double>(stats.site_shell[u]));
      const Estimate tau = Estimate::bernoulli(stats.site_hits[u], n);
      value += tilt * tau.mean * weight;
      se += tilt * tau.std_err * weight;
    }
    GammaEstimate ge;
    ge.L = L;
    ge.value = Estimate{value, se, n};
    out.push_back(ge);
  }
  return out;
}

std::vector<GammaEstimate> estimate_gamma_scan(const SplitPoint& x,
                                               const std::vector<double>& Ls, double m,
                                               const Box& box, const ModelParams& p,
                                               std::uint64_t n, RngSeed seed, int workers) {
  const ClusterStatsTable stats = collect_cluster_stats(x, box, p, n, seed, workers);
  return gamma_scan_from_stats(stats, Ls, m, p);
}

GammaEstimate estimate_gamma_L(const SplitPoint& x, double L, double m, const Box& box,
                               const ModelParams& p, std::uint64_t n, RngSeed seed,
                               int workers) {
  return estimate_gamma_scan(x, {L}, m, box, p, n, seed, workers).front();
}

SupEstimate tm_sup_from_stats(const ClusterStatsTable& stats, double L, double m) {
  require(m >= 0.0, "m must be >= 0");
  const std::uint32_t n_sites = static_cast<std::uint32_t>(stats.box.site_count());
  bool any = false;
  SupEstimate best;
  double best_value = -1.0;
  for (std::uint32_t u = 0; u < n_sites; ++u) {
    if (static_cast<double>(stats.site_cyl[u]) <= L) continue;
    any = true;
    const double tilt = std::exp(m * static_cast<double>(stats.site_shell[u]));
    const Estimate tau = Estimate::bernoulli(stats.site_hits[u], stats.n_samples);
    const double v = tilt * tau.mean;
    if (v > best_value) {
      best_value = v;
      best.value = Estimate{v, tilt * tau.std_err, stats.n_samples};
      best.argmax = stats.box.site_at(u);
    }
  }
  require(any, "no box sites outside the cylinder");
  return best;
}

SupEstimate estimate_tm_sup(double L, double m, const Box& box, const ModelParams& p,
                            std::uint64_t n, RngSeed seed, int workers) {
  const SplitPoint origin = origin_point(p.k, p.d);
  const ClusterStatsTable stats = collect_cluster_stats(origin, box, p, n, seed, workers);
  return tm_sup_from_stats(stats, L, m);
}

}  // namespace percolab
