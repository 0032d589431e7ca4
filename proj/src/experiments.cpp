#include "ehrelay/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>

#include <fmt/format.h>

#include "ehrelay/optimizers.hpp"

namespace ehrelay {

namespace {

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

SweepRow sweep_point(const SystemParams& params, double alpha, const SolverOptions& solver,
                     const std::optional<SimConfig>& sim) {
  SweepRow row;
  row.alpha = alpha;
  const QbdSolution sol = solve_qbd(params, alpha, solver);
  row.spectral_radius = sol.spectral_radius;
  row.stable = sol.stable;
  if (sol.stable) {
    row.metrics = static_metrics(params, alpha, sol);
  } else {
    const double inf = std::numeric_limits<double>::infinity();
    row.metrics.mean_qd = inf;
    row.metrics.delay = inf;
    row.metrics.delay_half_slot = inf;
  }
  if (sim) row.simulated = run(params, Policy::static_alpha(alpha), *sim);
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_static(const SystemParams& params, const std::vector<double>& grid,
                                   const SolverOptions& solver, const std::optional<SimConfig>& sim, int parallel) {
  validate(params);
  if (grid.empty()) throw InvalidParams("alpha grid is empty");
  for (double a : grid) {
    if (!(a >= 0.0 && a < 1.0)) throw InvalidParams("alpha grid must lie in [0, 1)");
  }
  std::vector<SweepRow> rows(grid.size());
  if (parallel <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) rows[i] = sweep_point(params, grid[i], solver, sim);
    return rows;
  }
  // Bounded pool: at most `parallel` grid points in flight; rows land at their grid index.
  std::vector<std::future<SweepRow>> inflight;
  std::size_t next_out = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    inflight.push_back(std::async(std::launch::async, sweep_point, std::cref(params), grid[i], std::cref(solver),
                                  std::cref(sim)));
    if (inflight.size() - next_out >= static_cast<std::size_t>(parallel)) {
      rows[next_out] = inflight[next_out].get();
      ++next_out;
    }
  }
  for (; next_out < inflight.size(); ++next_out) rows[next_out] = inflight[next_out].get();
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  const bool with_sim = !rows.empty() && rows.front().simulated.has_value();
  out << "alpha,spectral_radius,stable,mean_qd,p_active,p_block,throughput,delay";
  if (with_sim) out << ",sim_throughput,sim_throughput_se,sim_delay,sim_delay_se,sim_mean_qd,sim_p_block";
  out << '\n';
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << format_real(r.alpha) << ',' << format_real(r.spectral_radius) << ',' << (r.stable ? "true" : "false")
        << ',' << format_real(m.mean_qd) << ',' << format_real(m.p_active) << ',' << format_real(m.p_block) << ','
        << format_real(m.throughput) << ',' << format_real(m.delay);
    if (with_sim && r.simulated) {
      const auto& s = *r.simulated;
      out << ',' << format_real(s.throughput) << ',' << format_real(s.throughput_se) << ','
          << format_real(s.mean_delay) << ',' << format_real(s.mean_delay_se) << ',' << format_real(s.mean_qd)
          << ',' << format_real(s.p_block);
    }
    out << '\n';
  }
}

std::vector<ThresholdRow> sweep_threshold(const SystemParams& params, const std::vector<int>& thresholds,
                                          const std::vector<double>& betas) {
  std::vector<ThresholdRow> rows;
  for (int e_th : thresholds) {
    for (double beta : betas) rows.push_back({e_th, beta, evaluate_threshold(params, e_th, beta)});
  }
  return rows;
}

void write_threshold_csv(std::ostream& out, const std::vector<ThresholdRow>& rows) {
  out << "e_th,beta,alpha_bar,mean_qd,throughput,delay,p_block\n";
  for (const auto& r : rows) {
    const auto& s = r.solution;
    out << r.e_th << ',' << format_real(r.beta) << ',' << format_real(s.alpha_bar) << ',' << format_real(s.mean_qd)
        << ',' << format_real(s.throughput) << ',' << format_real(s.delay) << ',' << format_real(s.p_block) << '\n';
  }
}

SystemParams table4_params(double p_det_r) {
  SystemParams p;
  p.p_det_s = 0.3;
  p.p_det_r = p_det_r;
  p.k_cost = 15;
  p.n_cap = 45;
  p.energy = EnergyDistribution::uniform(7);
  return p;
}

std::vector<Table4Row> table4(double eps, int parallel) {
  std::vector<Table4Row> rows;
  for (double pr : kTable4DetR) {
    rows.push_back({pr, optimize_dynamic(table4_params(pr), eps, DelayConvention::half_slot, parallel)});
  }
  return rows;
}

void write_table4_csv(std::ostream& out, const std::vector<Table4Row>& rows) {
  out << "p_det_r,e_th,beta,tau,cooperation\n";
  for (const auto& r : rows) {
    const auto& policy = r.result.best_policy;
    const int e_th = policy.is_threshold() ? policy.as_threshold().e_th : -1;
    const double beta = policy.is_threshold() ? policy.as_threshold().beta : 0.0;
    out << format_real(r.p_det_r) << ',' << e_th << ',' << format_real(beta) << ',' << format_real(r.result.objective)
        << ',' << (r.result.cooperation ? "true" : "false") << '\n';
  }
}

ValidationReport validate_analysis(const SystemParams& params, const std::vector<double>& grid, const SimConfig& sim,
                                   const ValidationOptions& options) {
  validate(params);
  ValidationReport report;
  auto add = [&](std::string label, double a_delay, double s_delay, double a_thr, double s_thr) {
    ValidationRow row;
    row.label = std::move(label);
    row.analytic_delay = a_delay * options.corrupt_factor;
    row.simulated_delay = s_delay;
    row.analytic_throughput = a_thr * options.corrupt_factor;
    row.simulated_throughput = s_thr;
    row.delay_deviation = relative(row.simulated_delay, row.analytic_delay);
    row.throughput_deviation = relative(row.simulated_throughput, row.analytic_throughput);
    row.pass = row.delay_deviation < options.threshold && row.throughput_deviation < options.threshold;
    report.max_deviation = std::max({report.max_deviation, row.delay_deviation, row.throughput_deviation});
    report.passed = report.passed && row.pass;
    report.rows.push_back(std::move(row));
  };

  for (double alpha : grid) {
    const QbdSolution sol = solve_qbd(params, alpha, options.solver);
    if (!sol.stable) continue;
    const StaticMetrics m = static_metrics(params, alpha, sol);
    const SimStats s = run(params, Policy::static_alpha(alpha), sim);
    add(fmt::format("static alpha={}", format_real(alpha)), m.delay, s.mean_delay, m.throughput, s.throughput);
  }
  if (options.include_dynamic) {
    const OptimizationResult opt = optimize_dynamic(params, 0.01, DelayConvention::half_slot);
    if (opt.best_policy.is_threshold()) {
      const auto& t = opt.best_policy.as_threshold();
      const FiniteChainSolution fc = evaluate_threshold(params, t.e_th, t.beta);
      const SimStats s = run(params, opt.best_policy, sim);
      const std::string tag = fmt::format("e_th={} beta={}", t.e_th, format_real(t.beta));
      add("dynamic slot_start " + tag, fc.delay_slot_start, s.mean_delay, fc.throughput, s.throughput);
      add("dynamic half_slot " + tag, fc.delay, s.mean_delay_half_slot, fc.throughput, s.throughput);
    }
  }
  return report;
}

void write_validation_csv(std::ostream& out, const ValidationReport& report) {
  out << "label,analytic_delay,simulated_delay,delay_deviation,analytic_throughput,simulated_throughput,"
         "throughput_deviation,pass\n";
  for (const auto& r : report.rows) {
    out << '"' << r.label << '"' << ',' << format_real(r.analytic_delay) << ',' << format_real(r.simulated_delay)
        << ',' << format_real(r.delay_deviation) << ',' << format_real(r.analytic_throughput) << ','
        << format_real(r.simulated_throughput) << ',' << format_real(r.throughput_deviation) << ','
        << (r.pass ? "true" : "false") << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

void dump_matrices(const SystemParams& params, double alpha, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const EnergyMatrices em = build_energy_matrices(params);
  const QbdBlocks q = build_blocks(em, params, alpha);
  const std::pair<const char*, const Matrix*> items[] = {
      {"M", &em.m_tx},   {"T", &em.t_harvest}, {"B", &em.b_slot}, {"b00", &q.b00},
      {"b01", &q.b01},   {"a_up", &q.a_up},    {"a_same", &q.a_same}, {"a_down", &q.a_down}};
  for (const auto& [name, m] : items) {
    std::ofstream out(std::filesystem::path(dir) / (std::string(name) + ".csv"));
    write_matrix_csv(out, *m);
  }
}

}  // namespace ehrelay
