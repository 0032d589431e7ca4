#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ehrelay/config.hpp"
#include "ehrelay/finite_chain.hpp"
#include "ehrelay/qbd_solver.hpp"
#include "ehrelay/simulator.hpp"

namespace ehrelay {

struct SweepRow {
  double alpha = 0.0;
  double spectral_radius = 0.0;
  bool stable = false;
  StaticMetrics metrics;             // zeros/inf when unstable
  std::optional<SimStats> simulated;
};

/// Analytic static metrics per alpha; rows with alpha >= alpha^T come back unstable.
/// Grid points are evaluated on `parallel` workers and returned in grid order.
std::vector<SweepRow> sweep_static(const SystemParams& params, const std::vector<double>& grid,
                                   const SolverOptions& solver = {}, const std::optional<SimConfig>& sim = {},
                                   int parallel = 1);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct ThresholdRow {
  int e_th = 0;
  double beta = 0.0;
  FiniteChainSolution solution;
};

std::vector<ThresholdRow> sweep_threshold(const SystemParams& params, const std::vector<int>& thresholds,
                                          const std::vector<double>& betas);
void write_threshold_csv(std::ostream& out, const std::vector<ThresholdRow>& rows);

struct Table4Row {
  double p_det_r = 0.0;
  OptimizationResult result;
};

/// Parameters behind the optimal-threshold table: p_S = 0.3, N = 45, K = 15, uniform b_max = 7.
SystemParams table4_params(double p_det_r);
inline const std::vector<double> kTable4DetR{0.45, 0.5, 0.6, 0.7, 0.8, 0.9};

std::vector<Table4Row> table4(double eps = 0.01, int parallel = 1);
void write_table4_csv(std::ostream& out, const std::vector<Table4Row>& rows);

struct ValidationRow {
  std::string label;
  double analytic_delay = 0.0;
  double simulated_delay = 0.0;
  double analytic_throughput = 0.0;
  double simulated_throughput = 0.0;
  double delay_deviation = 0.0;       // relative
  double throughput_deviation = 0.0;  // relative
  bool pass = false;
};

struct ValidationOptions {
  double threshold = 0.02;
  bool include_dynamic = true;
  /// Test hook: scales every analytic value before comparison. 1 leaves them untouched.
  double corrupt_factor = 1.0;
  SolverOptions solver;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  double max_deviation = 0.0;
  bool passed = true;
};

/// Analytic-vs-simulated delay and throughput on the stable part of the grid, plus the
/// delay-optimal dynamic policy (both delay conventions).
ValidationReport validate_analysis(const SystemParams& params, const std::vector<double>& grid,
                                   const SimConfig& sim, const ValidationOptions& options = {});
void write_validation_csv(std::ostream& out, const ValidationReport& report);

/// Writes M, T, B and the QBD blocks for alpha into `dir` as CSV files (one row per origin state).
void dump_matrices(const SystemParams& params, double alpha, const std::string& dir);
void write_matrix_csv(std::ostream& out, const Matrix& m);

}  // namespace ehrelay
