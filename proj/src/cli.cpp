#include "percolab/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "percolab/bounds.hpp"
#include "percolab/config.hpp"
#include "percolab/csv.hpp"
#include "percolab/instances.hpp"
#include "percolab/model.hpp"
#include "percolab/oracle.hpp"
#include "percolab/sampler.hpp"

#ifndef PERCOLAB_VERSION
#define PERCOLAB_VERSION "0.0.0"
#endif

namespace percolab::cli {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

// Fixed stream offsets so pipeline stages draw disjoint sample indices.
constexpr std::uint64_t kStreamConstants = 1ull << 40;
constexpr std::uint64_t kStreamVerify = 2ull << 40;

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("failed writing '" + p.string() + "'");
}

std::string join_coords(const std::vector<std::int64_t>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

constexpr const char* kCsvHeader =
    "quantity,k,d,epsilon,beta,m,L,x0,x1,mean,stderr,n_samples,seed,stream,extra\n";

std::string csv_row(const std::string& quantity, const ExperimentConfig& cfg,
                    const std::string& m, const std::string& L, const SplitPoint* x,
                    const Estimate& est, const std::string& extra) {
  std::ostringstream os;
  os << quantity << ',' << cfg.params.k << ',' << cfg.params.d << ','
     << format_double(cfg.params.epsilon) << ',' << format_double(cfg.params.beta) << ',' << m
     << ',' << L << ',' << (x ? join_coords(x->u0) : "") << ','
     << (x ? join_coords(x->u1) : "") << ',' << format_double(est.mean) << ','
     << format_double(est.std_err) << ',' << est.n_samples << ',' << cfg.seed.seed << ','
     << cfg.seed.stream << ',' << extra << '\n';
  return os.str();
}

struct Manifest {
  std::string command;
  const ExperimentConfig* cfg = nullptr;
  const RunOptions* opts = nullptr;
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;

  void emit(const fs::path& out_dir) const {
    ordered_json j;
    j["tool"] = "percolab";
    j["version"] = version_string();
    j["command"] = command;
    j["workers"] = opts->workers;
    j["seed"] = cfg->seed.seed;
    j["stream"] = cfg->seed.stream;
    j["config"] = serialize_config(*cfg);
    j["outputs"] = outputs;
    j["wall_seconds"] = wall_seconds;
    j["generated_at"] = std::chrono::duration_cast<std::chrono::seconds>(
                            std::chrono::system_clock::now().time_since_epoch())
                            .count();
    write_file(out_dir / "manifest.json", j.dump(2) + "\n");

    std::cout << "percolab " << command << " (" << version_string() << ")\n";
    std::cout << "  seed " << cfg->seed.seed << " stream " << cfg->seed.stream << " workers "
              << opts->workers << "\n";
    for (const std::string& o : outputs) std::cout << "  wrote " << o << "\n";
    std::cout << "  wall time " << format_double(wall_seconds) << " s\n";
  }
};

ExperimentConfig load(const std::string& command, const RunOptions& opts) {
  ExperimentConfig cfg = load_config(opts.config_path, command);
  if (opts.seed_override) cfg.seed.seed = *opts.seed_override;
  return cfg;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const SplitPoint origin = origin_point(cfg.params.k, cfg.params.d);
  if (!cfg.box.contains(origin))
    throw ConfigError("simulate measures from the origin; the box must contain it");

  const ClusterStatsTable stats =
      collect_cluster_stats(origin, cfg.box, cfg.params, cfg.n_samples, cfg.seed, opts.workers);
  const std::vector<SplitPoint> points = cfg.measurement_points();

  std::string csv = kCsvHeader;
  for (const std::string& q : cfg.measure) {
    if (q == "tau") {
      for (const SplitPoint& pt : points)
        csv += csv_row("tau", cfg, "", "", &pt, stats.tau_at(pt), "");
    } else if (q == "chi") {
      Estimate size;
      {
        const double dn = static_cast<double>(stats.n_samples);
        size.n_samples = stats.n_samples;
        size.mean = static_cast<double>(stats.size_sum) / dn;
        if (stats.n_samples > 1) {
          const double var = (static_cast<double>(stats.size_sumsq) -
                              static_cast<double>(stats.size_sum) * size.mean) /
                             (dn - 1.0);
          size.std_err = var > 0.0 ? std::sqrt(var / dn) : 0.0;
        }
      }
      const double bf =
          static_cast<double>(stats.boundary_touches) / static_cast<double>(stats.n_samples);
      csv += csv_row("chi", cfg, "", "", nullptr, size, format_double(bf));
    } else if (q == "tm") {
      for (const SplitPoint& pt : points) {
        Estimate e = stats.tau_at(pt);
        const double tilt = std::exp(cfg.m * static_cast<double>(l1_norm(pt.u0)));
        e.mean *= tilt;
        e.std_err *= tilt;
        csv += csv_row("tm", cfg, format_double(cfg.m), "", &pt, e, "");
      }
    } else if (q == "gamma") {
      std::vector<double> Ls;
      for (std::int64_t L : cfg.L_values) Ls.push_back(static_cast<double>(L));
      for (const GammaEstimate& g : gamma_scan_from_stats(stats, Ls, cfg.m, cfg.params))
        csv += csv_row("gamma", cfg, format_double(cfg.m), format_double(g.L), nullptr,
                       g.value, "");
    } else if (q == "tmsup") {
      for (std::int64_t L : cfg.L_values) {
        SupEstimate s;
        try {
          s = tm_sup_from_stats(stats, static_cast<double>(L), cfg.m);
        } catch (const std::invalid_argument& e) {
          throw ConfigError("L_values: " + std::string(e.what()));
        }
        csv += csv_row("tmsup", cfg, format_double(cfg.m),
                       format_double(static_cast<double>(L)), &s.argmax, s.value, "");
      }
    }
  }

  const fs::path out_dir(opts.out_dir);
  write_file(out_dir / "simulate.csv", csv);

  Manifest man{"simulate", &cfg, &opts, {"simulate.csv", "manifest.json"}, elapsed_since(t0)};
  man.emit(out_dir);
  return kOk;
}

int cmd_certify(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const SplitPoint origin = origin_point(cfg.params.k, cfg.params.d);
  if (!cfg.box.contains(origin))
    throw ConfigError("certify measures from the origin; the box must contain it");
  const fs::path out_dir(opts.out_dir);

  auto stage_fail = [](const std::string& stage, const std::exception& e) {
    std::cout << "[certify] stage " << stage << " failed: " << e.what() << "\n";
    return kVerificationFailed;
  };

  std::cout << "[certify] stage fiber_sums: " << cfg.n_samples << " cluster samples\n";
  const ClusterStatsTable stats = collect_cluster_stats(
      origin, cfg.box, cfg.params, cfg.n_samples,
      RngSeed{cfg.seed.seed, cfg.seed.stream + kStreamConstants}, opts.workers);
  const std::vector<ShellRow> shells = fiber_sums_from_stats(stats);
  {
    std::string csv = "shell,mean,stderr,n_samples\n";
    for (const ShellRow& r : shells)
      csv += std::to_string(r.shell) + "," + format_double(r.sum.mean) + "," +
             format_double(r.sum.std_err) + "," + std::to_string(r.sum.n_samples) + "\n";
    write_file(out_dir / "shells.csv", csv);
  }

  std::uint32_t n0 = 0;
  try {
    n0 = find_n0(shells, cfg.lambda);
  } catch (const std::invalid_argument& e) {
    return stage_fail("find_n0", e);
  }
  std::cout << "[certify] stage find_n0: n0 = " << n0 << " (lambda = " << cfg.lambda << ")\n";

  MassParams mass;
  try {
    const double m_raw = -std::log(cfg.lambda) / static_cast<double>(n0);
    mass = MassParams::from(cfg.lambda, n0, cfg.delta_frac * m_raw);
  } catch (const std::invalid_argument& e) {
    return stage_fail("mass_from_lambda", e);
  }
  std::cout << "[certify] stage mass: m = " << format_double(mass.m)
            << ", delta = " << format_double(mass.delta) << "\n";

  ChiM chi;
  try {
    chi = chi_m_from_shells(shells, cfg.params.k, mass);
  } catch (const std::invalid_argument& e) {
    return stage_fail("chi_m_partial", e);
  }
  std::cout << "[certify] stage chi_m: partial = " << format_double(chi.partial)
            << ", tail bound = " << format_double(chi.tail_bound)
            << (chi.tail_valid ? "" : " (tail bound needs max shell >= n0)") << "\n";

  const double alpha = cfg.alpha_frac * std::pow(2.0, -cfg.params.exponent());

  std::uint32_t max_cyl = 0;
  for (std::uint32_t c : stats.site_cyl) max_cyl = std::max(max_cyl, c);
  const std::uint64_t L_hi = cfg.gamma_L_max.value_or(max_cyl > 0 ? max_cyl - 1 : 0);
  if (L_hi < 1)
    return stage_fail("gamma_scan",
                      std::invalid_argument("box has no room for a cylinder scan"));
  std::vector<double> Ls;
  for (std::uint64_t L = 1; L <= L_hi; ++L) Ls.push_back(static_cast<double>(L));
  const std::vector<GammaEstimate> gammas = gamma_scan_from_stats(stats, Ls, mass.m, cfg.params);
  {
    std::string csv = "L,mean,stderr,n_samples\n";
    for (const GammaEstimate& g : gammas)
      csv += format_double(g.L) + "," + format_double(g.value.mean) + "," +
             format_double(g.value.std_err) + "," + std::to_string(g.value.n_samples) + "\n";
    write_file(out_dir / "gamma_scan.csv", csv);
  }

  double L0 = 0.0;
  for (const GammaEstimate& g : gammas) {
    if (g.value.mean + 2.0 * g.value.std_err < alpha) {
      L0 = g.L;
      break;
    }
  }
  if (L0 == 0.0)
    return stage_fail("select_L0",
                      std::invalid_argument("gamma_L never drops below alpha = " +
                                            format_double(alpha) + " within the box"));
  std::cout << "[certify] stage select_L0: L0 = " << format_double(L0)
            << " (alpha = " << format_double(alpha) << ")\n";

  double C = 0.0;
  try {
    C = final_constant(alpha, L0, cfg.params.d, cfg.params.epsilon, cfg.params.beta,
                       chi.total());
  } catch (const std::invalid_argument& e) {
    return stage_fail("final_constant", e);
  }
  std::cout << "[certify] stage final_constant: C = " << format_double(C) << "\n";

  BoundCertificate cert;
  cert.lambda = cfg.lambda;
  cert.n0 = n0;
  cert.delta = mass.delta;
  cert.m = mass.m;
  cert.chi_m = chi.total();
  cert.chi_m_partial_sum = chi.partial;
  cert.chi_m_tail = chi.tail_bound;
  cert.L0 = L0;
  cert.alpha = alpha;
  cert.C = C;
  cert.lambda_provenance = "config (default 0.5)";
  cert.n0_provenance = "measured: smallest qualifying shell suffix, point estimate - 2 sigma";
  cert.delta_provenance = "policy: delta_frac * (-ln(lambda)/n0)";
  cert.m_provenance = "derived: e^-(m+delta) = lambda^(1/n0)";
  cert.chi_m_provenance = "measured partial sum + analytic shell tail";
  cert.L0_provenance = "measured: first grid L with gamma_L + 2 sigma < alpha";
  cert.alpha_provenance = "policy: alpha_frac * 2^-(d+eps)";
  cert.C_provenance = "derived: geometric series limit + 2(2 L0)^(d+eps)";
  cert.check(cfg.params);

  std::cout << "[certify] stage verify: " << cfg.n_samples << " cluster samples\n";
  const ClusterStatsTable vstats = collect_cluster_stats(
      origin, cfg.box, cfg.params, cfg.n_samples,
      RngSeed{cfg.seed.seed, cfg.seed.stream + kStreamVerify}, opts.workers);

  std::vector<TauPoint> table;
  if (cfg.points.empty()) {
    const std::uint32_t n_sites = static_cast<std::uint32_t>(cfg.box.site_count());
    table.reserve(n_sites);
    for (std::uint32_t i = 0; i < n_sites; ++i)
      table.push_back({cfg.box.site_at(i), vstats.tau_at(i)});
  } else {
    for (const SplitPoint& pt : cfg.points) table.push_back({pt, vstats.tau_at(pt)});
  }
  const BoundReport report = verify_theorem_bound(table, C, mass.m, cfg.params);
  {
    std::string csv = "x0,x1,mean,stderr,bound,slack,pass\n";
    for (const TauPoint& pt : table) {
      const double s = static_cast<double>(l1_norm(pt.x.u0));
      const double r = static_cast<double>(l1_norm(pt.x.u1));
      const double bound = C * std::exp(-mass.m * s) / (1.0 + std::pow(r, cfg.params.exponent()));
      const double slack = bound - (pt.est.mean - 2.0 * pt.est.std_err);
      csv += join_coords(pt.x.u0) + "," + join_coords(pt.x.u1) + "," +
             format_double(pt.est.mean) + "," + format_double(pt.est.std_err) + "," +
             format_double(bound) + "," + format_double(slack) + "," +
             (slack >= -1e-12 ? "1" : "0") + "\n";
    }
    write_file(out_dir / "verify.csv", csv);
  }

  ordered_json j;
  j["params"] = {{"k", cfg.params.k},
                 {"d", cfg.params.d},
                 {"epsilon", cfg.params.epsilon},
                 {"beta", cfg.params.beta}};
  j["box"] = {{"lo0", cfg.box.lo0}, {"hi0", cfg.box.hi0}, {"lo1", cfg.box.lo1},
              {"hi1", cfg.box.hi1}};
  j["n_samples"] = cfg.n_samples;
  j["seed"] = cfg.seed.seed;
  auto field = [](double v, const std::string& prov) {
    return ordered_json{{"value", v}, {"provenance", prov}};
  };
  j["lambda"] = field(cert.lambda, cert.lambda_provenance);
  j["n0"] = ordered_json{{"value", cert.n0}, {"provenance", cert.n0_provenance}};
  j["delta"] = field(cert.delta, cert.delta_provenance);
  j["m"] = field(cert.m, cert.m_provenance);
  j["chi_m"] = ordered_json{{"value", cert.chi_m},
                            {"partial", cert.chi_m_partial_sum},
                            {"tail_bound", cert.chi_m_tail},
                            {"tail_valid", chi.tail_valid},
                            {"provenance", cert.chi_m_provenance}};
  j["alpha"] = field(cert.alpha, cert.alpha_provenance);
  j["L0"] = field(cert.L0, cert.L0_provenance);
  j["C"] = field(cert.C, cert.C_provenance);
  j["verification"] = ordered_json{{"n_points", report.n_points},
                                   {"n_pass", report.n_pass},
                                   {"worst_slack", report.worst_slack},
                                   {"all_pass", report.all_pass()}};
  write_file(out_dir / "certificate.json", j.dump(2) + "\n");

  std::cout << "[certify] verification: " << report.n_pass << "/" << report.n_points
            << " points under the bound, worst slack " << format_double(report.worst_slack)
            << "\n";

  Manifest man{"certify",
               &cfg,
               &opts,
               {"shells.csv", "gamma_scan.csv", "verify.csv", "certificate.json",
                "manifest.json"},
               elapsed_since(t0)};
  man.emit(out_dir);
  return report.all_pass() ? kOk : kVerificationFailed;
}

int cmd_oracle_check(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint32_t cap = cfg.cap.value_or(default_cap());
  SmallRng rng(cfg.seed.seed);

  const bool run_hsl = std::find(cfg.suites.begin(), cfg.suites.end(), "hsl") != cfg.suites.end();
  const bool run_fkg = std::find(cfg.suites.begin(), cfg.suites.end(), "fkg") != cfg.suites.end();
  const bool run_mc = std::find(cfg.suites.begin(), cfg.suites.end(), "mc") != cfg.suites.end();

  std::vector<CheckInstance> instances;
  if (run_hsl || run_fkg) {
    for (std::uint32_t i = 0; i < cfg.n_random; ++i)
      instances.push_back(random_check_instance(rng, i));
    for (CheckInstance& inst :
         model_box_instances(static_cast<std::uint32_t>(cfg.n_model_boxes), rng))
      instances.push_back(std::move(inst));
  }

  std::string out;
  std::uint64_t hsl_fail = 0, fkg_fail = 0, mc_fail = 0, mc_total = 0, cap_skipped = 0;

  auto instance_json = [](const CheckInstance& inst) {
    ordered_json j;
    j["name"] = inst.name;
    j["sites"] = inst.graph.n_sites;
    j["edges"] = inst.graph.edges.size();
    j["x"] = inst.x;
    j["y"] = inst.y;
    return j;
  };

  if (run_hsl) {
    for (const CheckInstance& inst : instances) {
      ordered_json j = instance_json(inst);
      j["type"] = "hsl";
      j["S"] = inst.S;
      try {
        const HslReport rep = check_hsl(inst.graph, inst.x, inst.y, inst.S, cap);
        j["lhs"] = rep.lhs;
        j["rhs"] = rep.rhs;
        j["slack"] = rep.slack;
        j["holds"] = rep.holds;
        if (!rep.holds) ++hsl_fail;
      } catch (const CapExceeded& e) {
        j["error"] = e.what();
        ++cap_skipped;
      }
      out += j.dump() + "\n";
    }
  }

  if (run_fkg) {
    for (const CheckInstance& inst : instances) {
      ordered_json j = instance_json(inst);
      j["type"] = "fkg";
      try {
        const FkgReport rep = check_fkg_lower(inst.graph, inst.x, inst.y, cap);
        j["tau"] = rep.tau;
        j["best_path_bound"] = rep.best_path_bound;
        j["holds"] = rep.holds;
        if (!rep.holds) ++fkg_fail;
      } catch (const CapExceeded& e) {
        j["error"] = e.what();
        ++cap_skipped;
      }
      out += j.dump() + "\n";
    }
    // Direct-edge floor in simulation: tau estimate + 4 sigma must reach
    // the bond probability.
    std::uint32_t floor_checks = 0;
    for (const CheckInstance& inst : instances) {
      if (inst.name.rfind("box-", 0) != 0 || inst.graph.edges.empty()) continue;
      if (floor_checks >= 10) break;
      ++floor_checks;
      const GraphEdge& e = inst.graph.edges[rng.below(inst.graph.edges.size())];
      const Estimate est =
          estimate_tau_graph(inst.graph, e.a, e.b, 20000,
                             RngSeed{cfg.seed.seed, floor_checks * (1ull << 32)}, opts.workers);
      const bool holds = est.mean + 4.0 * est.std_err >= e.p - 1e-12;
      ordered_json j;
      j["type"] = "fkg_mc_floor";
      j["name"] = inst.name;
      j["edge"] = {e.a, e.b};
      j["p"] = e.p;
      j["mean"] = est.mean;
      j["stderr"] = est.std_err;
      j["holds"] = holds;
      if (!holds) ++fkg_fail;
      out += j.dump() + "\n";
    }
  }

  if (run_mc) {
    const auto mcs = mc_instances(static_cast<std::uint32_t>(cfg.n_mc_instances), rng);
    for (const McInstance& inst : mcs) {
      const Estimate est = estimate_tau_graph(inst.graph, inst.x, inst.y, cfg.mc_samples,
                                              RngSeed{cfg.seed.seed, 0}, opts.workers);
      const double diff = std::abs(est.mean - inst.exact_value);
      const bool within = diff <= 4.0 * est.std_err + 1e-12;
      ++mc_total;
      if (!within) ++mc_fail;
      ordered_json j;
      j["type"] = "mc";
      j["name"] = inst.name;
      j["exact"] = inst.exact_value;
      j["mean"] = est.mean;
      j["stderr"] = est.std_err;
      j["n"] = cfg.mc_samples;
      j["within_4se"] = within;
      out += j.dump() + "\n";
    }
  }

  const fs::path out_dir(opts.out_dir);
  write_file(out_dir / "oracle_check.jsonl", out);

  // MC agreement tolerates the expected four-sigma tail; inequalities do not.
  const bool mc_ok = mc_total == 0 || static_cast<double>(mc_fail) <= 0.05 * mc_total;
  std::cout << "oracle-check: hsl violations " << hsl_fail << ", fkg violations " << fkg_fail
            << ", mc outliers " << mc_fail << "/" << mc_total << ", cap-skipped "
            << cap_skipped << "\n";

  Manifest man{"oracle-check", &cfg, &opts, {"oracle_check.jsonl", "manifest.json"},
               elapsed_since(t0)};
  man.emit(out_dir);
  return (hsl_fail == 0 && fkg_fail == 0 && mc_ok) ? kOk : kVerificationFailed;
}

std::vector<TauPoint> read_tau_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input_csv '" + path + "'");
  std::vector<TauPoint> table;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto cols = split_csv_line(line);
    if (cols.size() < 15 || cols[0] != "tau") continue;
    TauPoint pt;
    std::istringstream s0(cols[7]), s1(cols[8]);
    std::int64_t v;
    while (s0 >> v) pt.x.u0.push_back(v);
    while (s1 >> v) pt.x.u1.push_back(v);
    pt.est.mean = std::stod(cols[9]);
    pt.est.std_err = std::stod(cols[10]);
    pt.est.n_samples = std::stoull(cols[11]);
    table.push_back(std::move(pt));
  }
  return table;
}

int cmd_fit(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<TauPoint> table;
  if (cfg.input_csv) {
    table = read_tau_csv(*cfg.input_csv);
  } else {
    const SplitPoint origin = origin_point(cfg.params.k, cfg.params.d);
    if (!cfg.box.contains(origin))
      throw ConfigError("fit measures from the origin; the box must contain it");
    const ClusterStatsTable stats = collect_cluster_stats(origin, cfg.box, cfg.params,
                                                          cfg.n_samples, cfg.seed, opts.workers);
    for (const SplitPoint& pt : cfg.measurement_points())
      table.push_back({pt, stats.tau_at(pt)});
  }

  DecayFit fit;
  try {
    fit = fit_decay(table, cfg.params, cfg.fixed_q);
  } catch (const std::invalid_argument& e) {
    std::cout << "fit failed: " << e.what() << "\n";
    return kVerificationFailed;
  }

  ordered_json j;
  j["mode"] = fit.mode;
  if (fit.m_hat)
    j["m_hat"] = *fit.m_hat;
  else
    j["m_hat"] = nullptr;
  if (fit.q_hat)
    j["q_hat"] = *fit.q_hat;
  else
    j["q_hat"] = nullptr;
  j["c_hat"] = fit.c_hat;
  j["residual_rms"] = fit.residual_rms;
  j["target_exponent"] = cfg.params.exponent();
  j["window"] = ordered_json{{"n_points", fit.n_points},
                             {"s_min", fit.s_min},
                             {"s_max", fit.s_max},
                             {"r_min", fit.r_min},
                             {"r_max", fit.r_max}};
  const fs::path out_dir(opts.out_dir);
  write_file(out_dir / "fit.json", j.dump(2) + "\n");

  std::cout << "fit: mode " << fit.mode;
  if (fit.m_hat) std::cout << ", m_hat " << format_double(*fit.m_hat);
  if (fit.q_hat) std::cout << ", q_hat " << format_double(*fit.q_hat);
  std::cout << ", c_hat " << format_double(fit.c_hat) << ", residual rms "
            << format_double(fit.residual_rms) << "\n";

  Manifest man{"fit", &cfg, &opts, {"fit.json", "manifest.json"}, elapsed_since(t0)};
  man.emit(out_dir);
  return kOk;
}

}  // namespace

const char* version_string() { return PERCOLAB_VERSION; }

int run_command(const std::string& command, const RunOptions& opts) {
  try {
    const ExperimentConfig cfg = load(command, opts);
    std::filesystem::create_directories(opts.out_dir);
    if (command == "simulate") return cmd_simulate(cfg, opts);
    if (command == "oracle-check") return cmd_oracle_check(cfg, opts);
    if (command == "certify") return cmd_certify(cfg, opts);
    if (command == "fit") return cmd_fit(cfg, opts);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace percolab::cli
