// Benchmark comparing the lazy BFS kernels against the serial
// full-configuration reference, and single-threaded against OpenMP runs.
// Each comparison also asserts that both paths produce identical results.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "percolab/instances.hpp"
#include "percolab/model.hpp"
#include "percolab/oracle.hpp"
#include "percolab/rng.hpp"
#include "percolab/sampler.hpp"
#include "percolab/union_find.hpp"

using namespace percolab;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void fail(const char* what) {
  std::fprintf(stderr, "bench: mismatch in %s\n", what);
  std::exit(1);
}

}  // namespace

int main() {
  const ModelParams params{1, 1, 1.0, 0.08};
  const Box box = Box::centered(1, 1, 8, 32);
  const RngSeed seed{424242, 0};
  const std::uint64_t n = 20000;
  const SplitPoint x = origin_point(1, 1);
  SplitPoint y = origin_point(1, 1);
  y.u0[0] = 4;
  y.u1[0] = 7;

  std::printf("box %llu sites, beta %.3f, %llu samples\n",
              static_cast<unsigned long long>(box.site_count()), params.beta,
              static_cast<unsigned long long>(n));

  // Lazy BFS connectivity vs full configuration + union-find, per sample.
  {
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t hits_ref = 0;
    const std::uint32_t xi = box.index_of(x), yi = box.index_of(y);
    for (std::uint64_t i = 0; i < n; ++i) {
      const Configuration c = sample_configuration(box, params, seed.at(i));
      const auto comp = components(c);
      if (comp[xi] == comp[yi]) ++hits_ref;
    }
    const double t_ref = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const Estimate est = estimate_tau(x, y, box, params, n, seed, 1);
    const double t_bfs = seconds_since(t1);

    const std::uint64_t hits_bfs =
        static_cast<std::uint64_t>(est.mean * static_cast<double>(n) + 0.5);
    if (hits_bfs != hits_ref) fail("tau kernel vs reference");
    std::printf("tau     reference %8.1f us/sample   lazy bfs %8.2f us/sample   speedup %6.1fx\n",
                1e6 * t_ref / static_cast<double>(n), 1e6 * t_bfs / static_cast<double>(n),
                t_ref / t_bfs);
  }

  // Cluster statistics: one worker vs all cores. Totals must be identical.
  {
    const auto t0 = std::chrono::steady_clock::now();
    const ClusterStatsTable serial = collect_cluster_stats(x, box, params, n, seed, 1);
    const double t1w = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const ClusterStatsTable parallel = collect_cluster_stats(x, box, params, n, seed, 0);
    const double tnw = seconds_since(t1);

    if (serial.site_hits != parallel.site_hits || serial.size_sum != parallel.size_sum ||
        serial.size_sumsq != parallel.size_sumsq ||
        serial.boundary_touches != parallel.boundary_touches)
      fail("cluster stats across worker counts");
    std::printf("stats   1 worker  %8.2f us/sample   %d workers %7.2f us/sample   speedup %6.1fx\n",
                1e6 * t1w / static_cast<double>(n), omp_get_max_threads(),
                1e6 * tnw / static_cast<double>(n), t1w / tnw);
  }

  // Exact enumeration: OpenMP block decomposition vs a forced single
  // thread. Sums must agree bit for bit.
  {
    SmallRng rng(246810);
    WeightedGraph g = random_graph(rng, 8, 12);
    while (g.edges.size() < 12) g = random_graph(rng, 8, 12);
    const int max_threads = omp_get_max_threads();

    omp_set_num_threads(1);
    const auto t0 = std::chrono::steady_clock::now();
    double serial = 0.0;
    for (int rep = 0; rep < 200; ++rep) serial = exact_tau(g, 0, 1);
    const double t1w = seconds_since(t0);

    omp_set_num_threads(max_threads);
    const auto t1 = std::chrono::steady_clock::now();
    double parallel = 0.0;
    for (int rep = 0; rep < 200; ++rep) parallel = exact_tau(g, 0, 1);
    const double tnw = seconds_since(t1);

    if (serial != parallel) fail("exact enumeration across thread counts");
    std::printf("oracle  1 thread  %8.2f ms/eval     %d threads %7.2f ms/eval     speedup %6.1fx\n",
                1e3 * t1w / 200.0, max_threads, 1e3 * tnw / 200.0, t1w / tnw);
  }

  std::printf("all comparisons agree\n");
  return 0;
}
