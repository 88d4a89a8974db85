// fdeq: spectral densities of self-adjoint polynomial matrix models and their
// Monte Carlo cross-checks.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdeq/combinatorics.hpp"
#include "fdeq/montecarlo.hpp"
#include "fdeq/spectra.hpp"

using json = nlohmann::ordered_json;
using namespace fdeq;

namespace {

int log_level() {
  const char* env = std::getenv("FDE_LOG");
  if (!env) return 1;
  const std::string v(env);
  if (v == "error") return 0;
  if (v == "debug") return 2;
  return 1;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[fdeq] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[fdeq:debug] " << msg << "\n";
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
};

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  double epsilon = -1;
  std::string grid;
  int quad_nodes = -1;
  double tol = -1;
  int max_iter = -1;
  double damping = -1;
  int mc_m = -1;
  int mc_reps = -1;
  long long seed = -1;
  int threads = 0;
  bool midpoint = false;
  bool richardson = false;
  bool gnuplot = false;
};

void add_common_flags(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "model configuration file")->required();
  cmd->add_option("--out", a.out_dir, "output directory (default .)");
  cmd->add_option("--epsilon", a.epsilon, "smoothing height for the Stieltjes inversion");
  cmd->add_option("--grid", a.grid, "evaluation grid 'a:b:n'");
  cmd->add_option("--quad-nodes", a.quad_nodes, "semicircle quadrature order");
  cmd->add_option("--tol", a.tol, "fixed-point stopping tolerance");
  cmd->add_option("--max-iter", a.max_iter, "fixed-point iteration cap");
  cmd->add_option("--damping", a.damping, "fixed-point damping in (0,1]");
  cmd->add_option("--threads", a.threads, "worker threads (default: logical cores)");
  cmd->add_option("--mc-m", a.mc_m, "blow-up factor for sampling");
  cmd->add_option("--mc-reps", a.mc_reps, "number of realizations");
  cmd->add_option("--seed", a.seed, "master RNG seed");
  cmd->add_flag("--midpoint-quadrature", a.midpoint, "use the midpoint Riemann cross-check rule");
  cmd->add_flag("--richardson", a.richardson, "experimental two-epsilon extrapolation of the density");
  cmd->add_flag("--gnuplot", a.gnuplot, "emit a plot.gp script next to the CSV files");
}

struct LoadedModel {
  ParsedConfig cfg;
  int threads = 1;
};

LoadedModel load_model(const CommonArgs& a) {
  LoadedModel lm;
  lm.cfg = parse_config_file(a.config_path);
  if (a.epsilon >= 0) lm.cfg.solve.epsilon = a.epsilon;
  if (!a.grid.empty()) lm.cfg.solve.grid = parse_grid_spec(a.grid);
  if (a.quad_nodes > 0) lm.cfg.solve.quad_nodes = a.quad_nodes;
  if (a.tol > 0) lm.cfg.solve.tolerance = a.tol;
  if (a.max_iter > 0) lm.cfg.solve.max_iter = a.max_iter;
  if (a.damping > 0) lm.cfg.solve.damping = a.damping;
  if (a.midpoint) lm.cfg.solve.midpoint_quadrature = true;
  if (a.mc_m > 0) lm.cfg.mc.m = a.mc_m;
  if (a.mc_reps > 0) lm.cfg.mc.reps = a.mc_reps;
  if (a.seed >= 0) lm.cfg.mc.seed = std::uint64_t(a.seed);
  lm.threads = a.threads > 0 ? a.threads : int(std::thread::hardware_concurrency());
  if (lm.threads < 1) lm.threads = 1;
  return lm;
}

json config_echo(const std::string& path, const ParsedConfig& cfg) {
  json symbols = json::array();
  for (const auto& [name, sym] : cfg.spec.symbols) {
    json s;
    s["name"] = name;
    s["kind"] = kind_name(sym.kind);
    s["row_block"] = sym.row_block;
    s["col_block"] = sym.col_block;
    symbols.push_back(s);
  }
  json out;
  out["path"] = path;
  out["blocks"] = cfg.spec.space.block_dims;
  out["target_block"] = cfg.spec.target_block;
  out["polynomial"] = cfg.polynomial_text;
  out["symbols"] = symbols;
  return out;
}

json solve_echo(const SolveOptions& s, const GridSpec& grid, int threads) {
  json out;
  out["epsilon"] = s.epsilon;
  out["grid"] = {{"lo", grid.lo}, {"hi", grid.hi}, {"points", grid.points}};
  out["quad_nodes"] = s.quad_nodes;
  out["midpoint_quadrature"] = s.midpoint_quadrature;
  out["tolerance"] = s.tolerance;
  out["max_iter"] = s.max_iter;
  out["damping"] = s.damping;
  out["threads"] = threads;
  return out;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot write '" + path + "'");
  out << body;
}

std::string density_csv(const DensityCurve& curve) {
  std::string body;
  char line[80];
  for (size_t i = 0; i < curve.grid.size(); ++i) {
    if (!curve.ok[i]) continue;
    std::snprintf(line, sizeof(line), "%.10g,%.10g\n", curve.grid[i], curve.values[i]);
    body += line;
  }
  return body;
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
  std::string body;
  char line[80];
  for (const auto& b : bins) {
    std::snprintf(line, sizeof(line), "%.10g,%ld\n", b.center, b.count);
    body += line;
  }
  return body;
}

std::string gnuplot_script(bool with_histogram, double count_scale) {
  std::string s = "set datafile separator ','\n";
  s += "set xlabel 't'\nset ylabel 'density'\nset key top right\n";
  if (with_histogram) {
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "plot 'histogram.csv' using 1:($2/%.10g) with boxes title 'Monte Carlo', \\\n"
                  "     'density.csv' using 1:2 with lines lw 2 title 'solver'\n",
                  count_scale);
    s += buf;
  } else {
    s += "plot 'density.csv' using 1:2 with lines lw 2 title 'solver'\n";
  }
  return s;
}

GridSpec pick_grid(const LoadedModel& lm) {
  if (lm.cfg.solve.grid) return *lm.cfg.solve.grid;
  GridSpec g = pilot_grid(lm.cfg.spec, lm.cfg.mc.seed, 1000);
  log_info("pilot grid: [" + std::to_string(g.lo) + ", " + std::to_string(g.hi) + "]");
  return g;
}

json density_report(const DensityCurve& curve, const GridStats& stats) {
  json d;
  d["epsilon"] = curve.epsilon;
  d["mass"] = curve.mass;
  d["pre_clamp_min"] = curve.pre_clamp_min;
  d["failed_points"] = curve.failed;
  d["iterations"] = {{"min", stats.iter_min}, {"median", stats.iter_median}, {"max", stats.iter_max}};
  d["residual_max"] = stats.residual_max;
  if (curve.mass >= 0.9)
    d["moments"] = moments_from_density(curve, 4);
  else
    d["moments"] = nullptr;
  return d;
}

int finish(const std::string& out_dir, json& report, int code) {
  report["exit_code"] = code;
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir + "/report.json");
  out << report.dump(2) << "\n";
  return code;
}

int run_solve(const CommonArgs& args, bool with_mc) {
  json report;
  report["command"] = with_mc ? "compare" : "solve";
  Timer total;
  LoadedModel lm;
  try {
    Timer t;
    lm = load_model(args);
    report["config"] = config_echo(args.config_path, lm.cfg);
    report["timings_ms"]["parse"] = t.ms();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    report["status"] = std::string("error: ") + e.what();
    return finish(args.out_dir, report, 1);
  }

  try {
    Timer t_build;
    Solver solver(lm.cfg.spec, lm.cfg.solve);
    report["timings_ms"]["build"] = t_build.ms();
    const GridSpec grid = pick_grid(lm);
    report["solve"] = solve_echo(lm.cfg.solve, grid, lm.threads);

    Timer t_density;
    GridStats stats;
    DensityCurve curve = solver.resolve_density(make_grid(grid), lm.cfg.solve.epsilon, lm.threads, &stats);
    if (args.richardson) {
      // experimental: rho ~ 2 rho_{eps/2} - rho_eps pointwise
      DensityCurve half = solver.resolve_density(make_grid(grid), lm.cfg.solve.epsilon / 2, lm.threads);
      for (size_t i = 0; i < curve.values.size(); ++i)
        curve.values[i] = std::max(0.0, 2 * half.values[i] - curve.values[i]);
      curve.mass = 0;
      for (size_t i = 1; i < curve.grid.size(); ++i)
        curve.mass += 0.5 * (curve.values[i] + curve.values[i - 1]) * (curve.grid[i] - curve.grid[i - 1]);
      report["solve"]["richardson"] = true;
    }
    report["timings_ms"]["density"] = t_density.ms();
    report["density"] = density_report(curve, stats);

    std::filesystem::create_directories(args.out_dir);
    write_file(args.out_dir + "/density.csv", density_csv(curve));
    log_info("wrote " + args.out_dir + "/density.csv (" + std::to_string(curve.grid.size()) + " rows)");

    double count_scale = 1.0;
    if (with_mc) {
      Timer t_mc;
      EmpiricalSpectrum emp = empirical_spectrum(lm.cfg.spec, lm.cfg.mc.m, lm.cfg.mc.reps, lm.cfg.mc.seed);
      const double ks = ks_distance(emp, curve);
      auto bins = histogram(emp, lm.cfg.mc.bins);
      const double width = bins.size() > 1 ? bins[1].center - bins[0].center : 1.0;
      count_scale = width * double(emp.eigenvalues.size());
      write_file(args.out_dir + "/histogram.csv", histogram_csv(bins));
      report["timings_ms"]["mc"] = t_mc.ms();
      report["mc"] = {{"m", emp.m},
                      {"reps", emp.reps},
                      {"seed", emp.seed},
                      {"eigenvalue_count", emp.eigenvalues.size()},
                      {"ks", ks}};
      log_info("KS distance: " + std::to_string(ks));
    } else {
      report["mc"] = nullptr;
    }

    if (args.gnuplot) write_file(args.out_dir + "/plot.gp", gnuplot_script(with_mc, count_scale));

    report["timings_ms"]["total"] = total.ms();
    report["status"] = curve.partial() ? "partial" : "ok";
    return finish(args.out_dir, report, 0);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    report["status"] = std::string("error: ") + e.what();
    const bool numerical =
        e.code() == Errc::NoConvergence || e.code() == Errc::Singular || e.code() == Errc::LeftHalfPlane;
    return finish(args.out_dir, report, numerical ? 2 : 1);
  }
}

int run_mc(const CommonArgs& args) {
  json report;
  report["command"] = "mc";
  Timer total;
  try {
    LoadedModel lm = load_model(args);
    report["config"] = config_echo(args.config_path, lm.cfg);
    Timer t_mc;
    EmpiricalSpectrum emp = empirical_spectrum(lm.cfg.spec, lm.cfg.mc.m, lm.cfg.mc.reps, lm.cfg.mc.seed);
    auto bins = histogram(emp, lm.cfg.mc.bins);
    std::filesystem::create_directories(args.out_dir);
    write_file(args.out_dir + "/histogram.csv", histogram_csv(bins));
    report["timings_ms"]["mc"] = t_mc.ms();
    report["timings_ms"]["total"] = total.ms();
    report["mc"] = {{"m", emp.m},
                    {"reps", emp.reps},
                    {"seed", emp.seed},
                    {"eigenvalue_count", emp.eigenvalues.size()},
                    {"min", emp.eigenvalues.front()},
                    {"max", emp.eigenvalues.back()}};
    if (args.gnuplot) write_file(args.out_dir + "/plot.gp", gnuplot_script(false, 1.0));
    report["status"] = "ok";
    log_info("sampled " + std::to_string(emp.eigenvalues.size()) + " eigenvalues");
    return finish(args.out_dir, report, 0);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    report["status"] = std::string("error: ") + e.what();
    return finish(args.out_dir, report, 1);
  }
}

int run_oracle(int ncp, int pairings, const std::string& word) {
  try {
    if (ncp > 0) std::cout << ncp2_count(ncp) << "\n";
    if (pairings > 0) std::cout << pair_partitions(pairings).size() << "\n";
    if (!word.empty()) {
      std::vector<bool> w;
      for (char c : word) {
        if (c == '1')
          w.push_back(false);
        else if (c == '*')
          w.push_back(true);
        else if (c == ',' || c == ' ')
          continue;
        else
          fail(Errc::BadArgument, "word must use characters '1' and '*'");
      }
      std::cout << circular_word_moment(w) << "\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"free deterministic equivalent spectra: solver and Monte Carlo cross-checks"};
  app.require_subcommand(1);

  CommonArgs solve_args, mc_args, compare_args;
  CLI::App* solve = app.add_subcommand("solve", "density of the limit model");
  add_common_flags(solve, solve_args);
  CLI::App* mc = app.add_subcommand("mc", "sample the blown-up finite model");
  add_common_flags(mc, mc_args);
  CLI::App* compare = app.add_subcommand("compare", "solve + Monte Carlo + KS distance");
  add_common_flags(compare, compare_args);

  int oracle_ncp = 0, oracle_pairings = 0;
  std::string oracle_word;
  CLI::App* oracle = app.add_subcommand("oracle", "combinatorial moment oracles");
  oracle->add_option("--ncp", oracle_ncp, "count non-crossing pairings of {1..n}");
  oracle->add_option("--pairings", oracle_pairings, "count all pairings of {1..n}");
  oracle->add_option("--word", oracle_word, "circular word moment, e.g. '1**1'");

  CLI11_PARSE(app, argc, argv);

  log_debug("parsed command line");
  if (solve->parsed()) return run_solve(solve_args, false);
  if (mc->parsed()) return run_mc(mc_args);
  if (compare->parsed()) return run_solve(compare_args, true);
  if (oracle->parsed()) return run_oracle(oracle_ncp, oracle_pairings, oracle_word);
  return 1;
}
