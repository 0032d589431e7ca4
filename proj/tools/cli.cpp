#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "ehrelay/config.hpp"
#include "ehrelay/errors.hpp"
#include "ehrelay/experiments.hpp"
#include "ehrelay/finite_chain.hpp"
#include "ehrelay/optimizers.hpp"
#include "ehrelay/simulator.hpp"

namespace ehrelay::cli {

namespace {

struct Options {
  std::string command;
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<long> slots;
  std::optional<double> eps;
  int parallel = 1;
  bool dump_matrices = false;
  std::string grid;
  bool simulate = false;
  std::string convention;
  std::string trace;
  std::string thresholds;
  std::string betas = "0:0.05:1";
};

DelayConvention parse_convention(const std::string& text, DelayConvention fallback) {
  if (text.empty()) return fallback;
  if (text == "slot_start") return DelayConvention::slot_start;
  if (text == "half_slot") return DelayConvention::half_slot;
  throw InvalidParams("convention must be slot_start or half_slot");
}

const char* convention_name(DelayConvention c) {
  return c == DelayConvention::slot_start ? "slot_start" : "half_slot";
}

ExperimentConfig effective_config(const Options& opt) {
  ExperimentConfig cfg;
  if (!opt.config.empty()) {
    cfg = load_config(opt.config);
  } else {
    cfg.params = typical_params();
  }
  if (opt.seed) cfg.sim.seed = *opt.seed;
  if (opt.slots) {
    cfg.sim.slots = *opt.slots;
    if (cfg.sim.warmup >= cfg.sim.slots) cfg.sim.warmup = cfg.sim.slots / 10;
  }
  if (opt.eps) cfg.eps = *opt.eps;
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw InvalidParams("eps must lie in (0, 1)");
  if (opt.parallel < 1) throw InvalidParams("parallel must be >= 1");
  cfg.sim.parallel = opt.parallel;
  validate(cfg.sim);
  return cfg;
}

Json header(const Options& opt, const ExperimentConfig& cfg) {
  Json h{{"command", opt.command}, {"seed", cfg.sim.seed}, {"params", to_json(cfg.params)}};
  if (opt.command == "simulate" || opt.command == "validate" || opt.simulate) {
    h["slots"] = cfg.sim.slots;
    h["warmup"] = cfg.sim.warmup;
    h["replications"] = cfg.sim.replications;
  }
  return h;
}

void csv_header(std::ostream& out, const Json& h) { out << "# " << h.dump() << '\n'; }

std::string matrix_dir(const Options& opt) {
  return opt.out.empty() ? std::string("matrices") : opt.out + ".matrices";
}

void dump_chain(const SystemParams& params, const Policy& policy, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / "P.csv");
  write_matrix_csv(out, build_dynamic_chain(params, level0_alphas(policy, params)));
}

void dump_policy(const SystemParams& params, const Policy& policy, const std::string& dir) {
  if (policy.is_static()) {
    dump_matrices(params, policy.as_static().alpha, dir);
  } else {
    dump_chain(params, policy, dir);
  }
}

std::vector<double> grid_or(const Options& opt, const ExperimentConfig& cfg, const std::string& fallback) {
  if (!opt.grid.empty()) return parse_grid(opt.grid);
  if (!cfg.alpha_grid.empty()) return cfg.alpha_grid;
  return parse_grid(fallback);
}

int sweep_static_cmd(const Options& opt, const ExperimentConfig& cfg, std::ostream& out) {
  const auto grid = grid_or(opt, cfg, "0:0.01:0.3");
  std::optional<SimConfig> sim;
  if (opt.simulate) sim = cfg.sim;
  const auto rows = sweep_static(cfg.params, grid, {}, sim, opt.parallel);
  Json h = header(opt, cfg);
  h["alpha_t"] = alpha_t(cfg.params);
  csv_header(out, h);
  write_sweep_csv(out, rows);
  if (opt.dump_matrices) {
    for (double a : grid) dump_matrices(cfg.params, a, matrix_dir(opt) + "/alpha_" + format_real(a));
  }
  return kOk;
}

int sweep_threshold_cmd(const Options& opt, const ExperimentConfig& cfg, std::ostream& out) {
  const int lo = cfg.params.n_cap - cfg.params.b_max() + 1;
  std::vector<int> thresholds;
  if (opt.thresholds.empty()) {
    for (int e = lo; e <= cfg.params.n_cap; ++e) thresholds.push_back(e);
  } else {
    for (double e : parse_grid(opt.thresholds)) thresholds.push_back(static_cast<int>(std::lround(e)));
  }
  const auto rows = sweep_threshold(cfg.params, thresholds, parse_grid(opt.betas));
  csv_header(out, header(opt, cfg));
  write_threshold_csv(out, rows);
  return kOk;
}

Json optimization_json(const Options& opt, const ExperimentConfig& cfg, const OptimizationResult& r,
                       DelayConvention conv) {
  Json h = header(opt, cfg);
  h["eps"] = cfg.eps;
  h["convention"] = convention_name(conv);
  return Json{{"header", h},
              {"alpha_t", alpha_t(cfg.params)},
              {"t_n", compute_tn(cfg.params)},
              {"noncooperation_optimal", noncoop_check(cfg.params)},
              {"result", to_json(r)}};
}

int optimize_static_cmd(const Options& opt, const ExperimentConfig& cfg, std::ostream& out) {
  const auto conv = parse_convention(opt.convention, DelayConvention::slot_start);
  const auto r = optimize_static(cfg.params, cfg.eps, conv);
  out << optimization_json(opt, cfg, r, conv).dump(2) << '\n';
  if (opt.dump_matrices) dump_policy(cfg.params, r.best_policy, matrix_dir(opt));
  return kOk;
}

int optimize_dynamic_cmd(const Options& opt, const ExperimentConfig& cfg, std::ostream& out) {
  const auto conv = parse_convention(opt.convention, DelayConvention::half_slot);
  const auto r = optimize_dynamic(cfg.params, cfg.eps, conv, opt.parallel);
  Json j = optimization_json(opt, cfg, r, conv);
  const auto fc = evaluate_dynamic(cfg.params, r.best_policy);
  j["metrics"] = {{"alpha_bar", fc.alpha_bar},
                  {"throughput", fc.throughput},
                  {"mean_qd", fc.mean_qd},
                  {"delay", fc.delay},
                  {"delay_slot_start", fc.delay_slot_start},
                  {"p_block", fc.p_block}};
  out << j.dump(2) << '\n';
  if (opt.dump_matrices) dump_policy(cfg.params, r.best_policy, matrix_dir(opt));
  return kOk;
}

int simulate_cmd(const Options& opt, const ExperimentConfig& cfg, std::ostream& out) {
  if (!cfg.policy) throw InvalidParams("simulate needs a 'policy' in the config");
  std::ofstream trace_file;
  TraceSink sink;
  if (!opt.trace.empty()) {
    trace_file.open(opt.trace);
    if (!trace_file) throw InvalidParams("cannot write trace '" + opt.trace + "'");
    trace_file << "replication,slot,mode,q_d,q_e,direct_success,stored,harvested,blocked,transmitted,relay_success\n";
    sink = [&trace_file](const SlotEvent& e) {
      trace_file << e.replication << ',' << e.slot << ',' << (e.dd_mode ? "DD" : "EH") << ',' << e.q_d << ','
                 << e.q_e << ',' << e.direct_success << ',' << e.stored << ',' << e.harvested << ',' << e.blocked
                 << ',' << e.transmitted << ',' << e.relay_success << '\n';
    };
  }
  const SimStats s = run(cfg.params, *cfg.policy, cfg.sim, sink);
  Json h = header(opt, cfg);
  h["policy"] = to_json(*cfg.policy);
  csv_header(out, h);
  out << "throughput,throughput_se,mean_delay,mean_delay_se,mean_delay_half_slot,mean_delay_half_slot_se,"
         "mean_qd,mean_qd_se,p_active,p_block,alpha_bar,delivered,blocked_units\n";
  long blocked = 0;
  for (const auto& c : s.counters) blocked += c.blocked;
  out << format_real(s.throughput) << ',' << format_real(s.throughput_se) << ',' << format_real(s.mean_delay) << ','
      << format_real(s.mean_delay_se) << ',' << format_real(s.mean_delay_half_slot) << ','
      << format_real(s.mean_delay_half_slot_se) << ',' << format_real(s.mean_qd) << ',' << format_real(s.mean_qd_se)
      << ',' << format_real(s.p_active) << ',' << format_real(s.p_block) << ',' << format_real(s.alpha_bar_emp) << ','
      << s.delivered << ',' << blocked << '\n';
  if (opt.dump_matrices) dump_policy(cfg.params, *cfg.policy, matrix_dir(opt));
  return kOk;
}

int validate_cmd(const Options& opt, const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto grid = grid_or(opt, cfg, "0.05,0.1,0.15,0.2");
  const auto report = validate_analysis(cfg.params, grid, cfg.sim);
  Json h = header(opt, cfg);
  h["max_deviation"] = report.max_deviation;
  h["passed"] = report.passed;
  csv_header(out, h);
  write_validation_csv(out, report);
  if (!report.passed) {
    std::string rows;
    for (const auto& r : report.rows) {
      if (!r.pass) rows += (rows.empty() ? "" : "; ") + r.label;
    }
    err << "validation failed: " << rows << '\n';
    return kValidationFailed;
  }
  return kOk;
}

int table4_cmd(const Options& opt, const ExperimentConfig& cfg, std::ostream& out) {
  const auto rows = table4(cfg.eps, opt.parallel);
  Json h{{"command", opt.command}, {"seed", cfg.sim.seed}, {"eps", cfg.eps}, {"params", to_json(table4_params(0.0))}};
  h["params"].erase("p_det_r");
  csv_header(out, h);
  write_table4_csv(out, rows);
  return kOk;
}

int dispatch(const Options& opt, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = effective_config(opt);
  std::ofstream file;
  std::ostream* sink = &out;
  if (!opt.out.empty()) {
    file.open(opt.out);
    if (!file) throw InvalidParams("cannot write '" + opt.out + "'");
    sink = &file;
  }
  if (opt.command == "sweep-static") return sweep_static_cmd(opt, cfg, *sink);
  if (opt.command == "sweep-threshold") return sweep_threshold_cmd(opt, cfg, *sink);
  if (opt.command == "optimize-static") return optimize_static_cmd(opt, cfg, *sink);
  if (opt.command == "optimize-dynamic") return optimize_dynamic_cmd(opt, cfg, *sink);
  if (opt.command == "simulate") return simulate_cmd(opt, cfg, *sink);
  if (opt.command == "validate") return validate_cmd(opt, cfg, *sink, err);
  return table4_cmd(opt, cfg, *sink);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delay and throughput analysis of an RF energy-harvesting relay"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON config (system parameters, policy, grid, sim)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output file (default: stdout)");
    sub->add_option("--seed", opt.seed, "simulation seed, overrides the config");
    sub->add_option("--slots", opt.slots, "simulated slots, overrides the config");
    sub->add_option("--eps", opt.eps, "golden-section tolerance");
    sub->add_option("--parallel", opt.parallel, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--dump-matrices", opt.dump_matrices, "write transition matrices next to --out");
  };

  const std::vector<std::pair<std::string, std::string>> commands{
      {"sweep-static", "analytic metrics over a grid of static decode probabilities"},
      {"sweep-threshold", "finite-chain metrics over threshold policies"},
      {"optimize-static", "delay-optimal static policy"},
      {"optimize-dynamic", "delay-optimal threshold policy"},
      {"simulate", "slot-level Monte Carlo of the config policy"},
      {"validate", "analysis against simulation, 2% tolerance"},
      {"table4", "optimal thresholds for p_S=0.3, N=45, K=15, b_max=7"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub);
    sub->callback([&opt, n = name] { opt.command = n; });
    if (name == "sweep-static" || name == "validate") {
      sub->add_option("--grid", opt.grid, "alpha grid, start:step:stop or a comma list");
    }
    if (name == "sweep-static") sub->add_flag("--simulate", opt.simulate, "add simulated columns");
    if (name == "optimize-static" || name == "optimize-dynamic") {
      sub->add_option("--convention", opt.convention, "slot_start or half_slot");
    }
    if (name == "simulate") sub->add_option("--trace", opt.trace, "per-slot event CSV");
    if (name == "sweep-threshold") {
      sub->add_option("--thresholds", opt.thresholds, "e_th values (default N-b_max+1..N)");
      sub->add_option("--betas", opt.betas, "beta grid");
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidConfig;
  }

  try {
    return dispatch(opt, out, err);
  } catch (const InvalidParams& e) {
    err << e.what() << '\n';
    return kInvalidConfig;
  } catch (const InvalidThreshold& e) {
    err << e.what() << '\n';
    return kInvalidConfig;
  } catch (const ValidationFailed& e) {
    err << e.what() << '\n';
    return kValidationFailed;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kNoConvergence;
  }
}

}  // namespace ehrelay::cli
