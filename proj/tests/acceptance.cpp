// Acceptance suite. Each criterion prints exactly one [PASS]/[FAIL] line;
// run with no arguments for the full suite or with a criterion number.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "percolab/bounds.hpp"
#include "percolab/cli.hpp"
#include "percolab/instances.hpp"
#include "percolab/model.hpp"
#include "percolab/oracle.hpp"
#include "percolab/rng.hpp"
#include "percolab/sampler.hpp"

using namespace percolab;
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("percolab_acceptance_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

WeightedGraph make_graph(std::uint32_t n, std::vector<GraphEdge> edges) {
  WeightedGraph g;
  g.n_sites = n;
  g.edges = std::move(edges);
  return g;
}

// 1. Exact oracle: closed forms to 1e-12 and deletion-contraction
//    cross-validation on 100 seeded graphs.
bool criterion1(std::string& detail) {
  bool ok = true;
  ok &= std::abs(exact_tau(make_graph(3, {{0, 1, 0.3}, {1, 2, 0.5}}), 0, 2) - 0.15) <= 1e-12;
  ok &= std::abs(exact_tau(make_graph(4, {{0, 1, 0.25}, {1, 3, 0.6}, {2, 3, 0.9}}), 0, 3) -
                 0.15) <= 1e-12;
  // Parallel composition p + q - pq (second route through a certain link).
  const double p = 0.3, q = 0.5;
  ok &= std::abs(exact_tau(make_graph(3, {{0, 1, p}, {0, 2, 1.0}, {1, 2, q}}), 0, 1) -
                 (p + q - p * q)) <= 1e-12;
  ok &= std::abs(exact_tau(make_graph(3, {{0, 1, 0.5}, {0, 2, 0.5}, {1, 2, 0.5}}), 0, 2) -
                 0.625) <= 1e-12;

  SmallRng rng(11011);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const WeightedGraph g = random_graph(rng, 7, 12);
    const std::uint32_t x = static_cast<std::uint32_t>(rng.below(g.n_sites));
    const std::uint32_t y = static_cast<std::uint32_t>(rng.below(g.n_sites));
    worst = std::max(worst, std::abs(exact_tau(g, x, y) - exact_tau_dc(g, x, y)));
  }
  ok &= worst <= 1e-12;
  detail = "closed forms ok, dc-vs-enumeration worst |diff| = " + std::to_string(worst);
  return ok;
}

// 2. Monte Carlo vs exact oracle on 20 seeded instances at n = 1e5:
//    at least 19 within four standard errors.
bool criterion2(std::string& detail) {
  SmallRng rng(22022);
  const auto instances = mc_instances(20, rng, 10);
  int within = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const McInstance& inst = instances[i];
    const Estimate est = estimate_tau_graph(inst.graph, inst.x, inst.y, 100000,
                                            RngSeed{777000 + i, 0});
    if (std::abs(est.mean - inst.exact_value) <= 4.0 * est.std_err) ++within;
  }
  detail = std::to_string(within) + "/20 within 4 stderr";
  return within >= 19;
}

std::vector<CheckInstance> suite_instances() {
  SmallRng rng(33033);
  std::vector<CheckInstance> instances;
  for (std::uint32_t i = 0; i < 200; ++i)
    instances.push_back(random_check_instance(rng, i));
  for (CheckInstance& inst : model_box_instances(50, rng))
    instances.push_back(std::move(inst));
  return instances;
}

// 3. HSL inequality on 200 random admissible instances and 50 model boxes
//    across (k,d), beta, epsilon grids: zero violations at slack >= -1e-12.
bool criterion3(std::string& detail) {
  const auto instances = suite_instances();
  int violations = 0;
  double worst = 1e300;
  for (const CheckInstance& inst : instances) {
    const HslReport rep = check_hsl(inst.graph, inst.x, inst.y, inst.S);
    worst = std::min(worst, rep.slack);
    if (!rep.holds) ++violations;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", worst);
  detail = std::to_string(instances.size()) + " instances, " + std::to_string(violations) +
           " violations, min slack " + buf;
  return violations == 0;
}

// 4. FKG lower bounds on the same 250 instances, plus the direct-edge floor
//    tau + 4 stderr >= p_xy in simulation. Zero violations.
bool criterion4(std::string& detail) {
  const auto instances = suite_instances();
  int violations = 0;
  for (const CheckInstance& inst : instances) {
    const FkgReport rep = check_fkg_lower(inst.graph, inst.x, inst.y);
    if (!rep.holds) ++violations;
  }
  int floor_checks = 0;
  SmallRng rng(44044);
  for (const CheckInstance& inst : instances) {
    if (inst.name.rfind("box-", 0) != 0 || inst.graph.edges.empty()) continue;
    const GraphEdge& e = inst.graph.edges[rng.below(inst.graph.edges.size())];
    if (e.p <= 0.0) continue;
    const Estimate est = estimate_tau_graph(
        inst.graph, e.a, e.b, 20000,
        RngSeed{888000ull + static_cast<std::uint64_t>(floor_checks), 0});
    ++floor_checks;
    if (est.mean + 4.0 * est.std_err < e.p - 1e-12) ++violations;
  }
  detail = std::to_string(instances.size()) + " bound checks + " +
           std::to_string(floor_checks) + " simulated floors, " + std::to_string(violations) +
           " violations";
  return violations == 0;
}

// 5. Shared per-edge randomness: raising beta from 0.1 to 0.2 adds open
//    edges and never disconnects a connected pair. Ten seeded configs.
bool criterion5(std::string& detail) {
  const Box box = Box::centered(1, 1, 3, 8);
  int violations = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const RngSeed seed{550000 + s, 0};
    const Configuration lo = sample_configuration(box, ModelParams{1, 1, 1.0, 0.1}, seed);
    const Configuration hi = sample_configuration(box, ModelParams{1, 1, 1.0, 0.2}, seed);
    const std::set<std::pair<std::uint32_t, std::uint32_t>> hi_set(hi.open_edges.begin(),
                                                                   hi.open_edges.end());
    for (const auto& e : lo.open_edges)
      if (!hi_set.contains(e)) ++violations;
    // Component refinement: pairs connected at low beta stay connected.
    const auto comp_lo = components(lo);
    const auto comp_hi = components(hi);
    for (std::uint32_t i = 0; i < box.site_count(); ++i)
      if (comp_hi[i] != comp_hi[comp_lo[i]]) ++violations;
  }
  detail = "10 seeded configs, " + std::to_string(violations) + " violations";
  return violations == 0;
}

// 6. Multi-scale machinery: final_constant dominates the iterated bound on
//    a 200-point log grid for 20 admissible tuples (1e-9 relative slack),
//    and the mass relation round-trips to 1e-12.
bool criterion6(std::string& detail) {
  SmallRng rng(66066);
  int grid_failures = 0;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = static_cast<int>(rng.range(1, 2));
    const double eps = rng.uniform(0.25, 2.0);
    const double alpha = rng.uniform(0.05, 0.95) * std::pow(2.0, -(d + eps));
    const double L0 = rng.uniform(1.0, 16.0);
    const double beta = rng.uniform(0.0, 1.0);
    const double chi_m = rng.uniform(1.0, 5.0);
    const double C = final_constant(alpha, L0, d, eps, beta, chi_m);
    for (int i = 0; i < 200; ++i) {
      const double L = L0 * (1.0 + 1e-6) * std::pow(1e6, i / 199.0);
      const double lhs =
          iterate_bound(alpha, L0, d, eps, beta, chi_m, L) * (1.0 + std::pow(L, d + eps));
      const double rel = (lhs - C) / C;
      worst_rel = std::max(worst_rel, rel);
      if (rel > 1e-9) ++grid_failures;
    }
  }
  int roundtrip_failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double lambda = rng.uniform(0.02, 0.98);
    const std::uint32_t n0 = static_cast<std::uint32_t>(rng.range(1, 8));
    const double raw = -std::log(lambda) / n0;
    const MassParams mp = MassParams::from(lambda, n0, rng.uniform(0.05, 0.9) * raw);
    if (std::abs(std::exp(-(mp.m + mp.delta)) - std::pow(lambda, 1.0 / n0)) > 1e-12)
      ++roundtrip_failures;
  }
  detail = "20 tuples x 200 L, worst relative excess " + std::to_string(worst_rel) + "; " +
           std::to_string(roundtrip_failures) + " round-trip failures";
  return grid_failures == 0 && roundtrip_failures == 0;
}

// 7. Desk-scale certificate: k=1, d=1, eps=1, beta=0.05 on a 33 x 129 box,
//    2e5 cluster samples; every measured point under the certified bound.
bool criterion7(std::string& detail) {
  const fs::path dir = fresh_dir("c7");
  write_text(dir / "certify.cfg",
             "k = 1\n"
             "d = 1\n"
             "epsilon = 1.0\n"
             "beta = 0.05\n"
             "box_lo0 = -16\n"
             "box_hi0 = 16\n"
             "box_lo1 = -64\n"
             "box_hi1 = 64\n"
             "n_samples = 200000\n"
             "seed = 70707\n");
  cli::RunOptions opts;
  opts.config_path = (dir / "certify.cfg").string();
  opts.out_dir = (dir / "out").string();
  const int rc = cli::run_command("certify", opts);
  if (rc != cli::kOk) {
    detail = "certify exit code " + std::to_string(rc);
    return false;
  }
  const auto cert = nlohmann::json::parse(read_text(dir / "out" / "certificate.json"));
  const auto& ver = cert["verification"];
  detail = "C = " + std::to_string(cert["C"]["value"].get<double>()) +
           ", m = " + std::to_string(cert["m"]["value"].get<double>()) + ", " +
           std::to_string(ver["n_pass"].get<std::uint64_t>()) + "/" +
           std::to_string(ver["n_points"].get<std::uint64_t>()) + " points under the bound";
  return ver["all_pass"].get<bool>() && ver["n_points"].get<std::uint64_t>() == 33u * 129u;
}

// 8. Long-direction exponent: k=0, d=1, eps=0.5, beta=0.1, x in [8,64],
//    1e6 samples; fitted q within [1.3, 1.7].
bool criterion8(std::string& detail) {
  const fs::path dir = fresh_dir("c8");
  write_text(dir / "fit.cfg",
             "k = 0\n"
             "d = 1\n"
             "epsilon = 0.5\n"
             "beta = 0.1\n"
             "box_lo1 = -96\n"
             "box_hi1 = 96\n"
             "n_samples = 1000000\n"
             "seed = 80808\n"
             "long_points = 8 64 4\n");
  cli::RunOptions opts;
  opts.config_path = (dir / "fit.cfg").string();
  opts.out_dir = (dir / "out").string();
  const int rc = cli::run_command("fit", opts);
  if (rc != cli::kOk) {
    detail = "fit exit code " + std::to_string(rc);
    return false;
  }
  const auto fit = nlohmann::json::parse(read_text(dir / "out" / "fit.json"));
  if (fit["q_hat"].is_null()) {
    detail = "no exponent fitted";
    return false;
  }
  const double q = fit["q_hat"].get<double>();
  detail = "q_hat = " + std::to_string(q) + " (target 1.5)";
  return q >= 1.3 && q <= 1.7;
}

// 9. cmd_simulate payloads are byte-identical across --workers 1 and 8.
bool criterion9(std::string& detail) {
  const fs::path dir = fresh_dir("c9");
  write_text(dir / "sim.cfg",
             "k = 1\n"
             "d = 1\n"
             "epsilon = 1.0\n"
             "beta = 0.15\n"
             "box_lo0 = -3\n"
             "box_hi0 = 3\n"
             "box_lo1 = -12\n"
             "box_hi1 = 12\n"
             "n_samples = 20000\n"
             "seed = 90909\n"
             "measure = tau chi tm\n"
             "m = 0.3\n"
             "point = 1 | 0\n"
             "point = 0 | 3\n"
             "point = 2 | -5\n"
             "point = 3 | 9\n");
  auto run = [&](int workers, const char* out) {
    const std::string cmd = std::string(PERCOLAB_CLI_BIN) + " simulate --config " +
                            (dir / "sim.cfg").string() + " --out " + (dir / out).string() +
                            " --workers " + std::to_string(workers) + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  if (run(1, "w1") != 0 || run(8, "w8") != 0 || run(1, "w1b") != 0) {
    detail = "simulate run failed";
    return false;
  }
  const std::string a = read_text(dir / "w1" / "simulate.csv");
  const std::string b = read_text(dir / "w8" / "simulate.csv");
  const std::string c = read_text(dir / "w1b" / "simulate.csv");
  detail = "csv bytes: " + std::to_string(a.size());
  return !a.empty() && a == b && a == c;
}

struct Criterion {
  int id;
  const char* label;
  double budget_seconds;  // 0 = no stated budget
  bool (*run)(std::string&);
};

const Criterion kCriteria[] = {
    {1, "oracle correctness", 10.0, criterion1},
    {2, "MC-oracle agreement", 60.0, criterion2},
    {3, "HSL inequality suite", 300.0, criterion3},
    {4, "FKG lower bound suite", 0.0, criterion4},
    {5, "monotone coupling in beta", 0.0, criterion5},
    {6, "multi-scale machinery", 0.0, criterion6},
    {7, "desk-scale certificate", 900.0, criterion7},
    {8, "long-direction exponent", 600.0, criterion8},
    {9, "worker-count determinism", 0.0, criterion9},
};

}  // namespace

int main(int argc, char** argv) {
  const int which = argc > 1 ? std::atoi(argv[1]) : 0;
  bool all_ok = true;
  for (const Criterion& c : kCriteria) {
    if (which != 0 && c.id != which) continue;
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      ok = false;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0.0 && secs > c.budget_seconds) ok = false;
    std::string budget;
    if (c.budget_seconds > 0.0)
      budget = " / budget " + std::to_string(static_cast<int>(c.budget_seconds)) + " s";
    std::printf("[%s] criterion %d: %s — %s (%.1f s%s)\n", ok ? "PASS" : "FAIL", c.id, c.label,
                detail.c_str(), secs, budget.c_str());
    all_ok &= ok;
  }
  return all_ok ? 0 : 1;
}
