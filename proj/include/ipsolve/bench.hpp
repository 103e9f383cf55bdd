#pragma once

#include "ipsolve/analysis.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ipsolve {

// One run request inside an experiment. The initial point is either a named
// fill ("ones", "zeros") resolved against the problem dimension, or the
// explicit vector already stored in config.initial_point.
struct AlgorithmRun {
  AlgorithmConfig config;
  std::string initial = "ones";
  std::string label;  // artifact key; defaults to the algorithm name
};

struct ExperimentConfig {
  std::string problem = "antidiagonal:n=100";
  std::vector<AlgorithmRun> algorithms;
  std::vector<std::string> audits;
  std::string output_dir = "out";
  int record_every = 1;
};

struct RunSummary {
  std::string label;
  std::string algorithm;
  std::string problem;
  int iterations_used = 0;
  long gradient_calls = 0;
  long resolvent_calls = 0;
  double final_residual = 0.0;
  double wall_time_seconds = 0.0;
  std::string terminated_by;
  std::optional<double> fitted_slope;
  std::vector<AuditReport> audits;
  std::vector<std::string> warnings;
};

// Problem specs look like "antidiagonal:n=100", "rotation:L=1,theta=2.0944",
// "rotation:L=1,costheta=-0.016667", "bilinear_box:n=2,bound=1". Unknown
// names or keys raise invalid_argument naming the offender.
InclusionProblem parse_problem_spec(const std::string& spec);

// Flat JSON configuration with the ExperimentConfig keys; unknown keys raise
// invalid_argument naming the offender.
ExperimentConfig experiment_from_json(const nlohmann::json& j);

nlohmann::json summary_to_json(const RunSummary& summary);

// 17 significant digits; round-trips every finite double exactly.
std::string format_float(double v);

// Columns: t,residual_natural,residual_certified,residual_tangent,grad_calls,
// resolvent_calls,z_norm,potential. Optional cells are left empty. Rows are
// subsampled by record_every, always keeping the first and last record.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int record_every,
                          bool with_potential);

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (t, residual), positive
};

// Self-contained log-log SVG plot, one polyline per series.
void write_loglog_svg(std::ostream& out, const std::string& title,
                      const std::vector<SvgSeries>& series);

struct ExperimentResult {
  std::vector<RunSummary> summaries;
  bool diverged = false;
};

// Runs every configured algorithm on the problem, writes
// <out>/<label>_trajectory.csv, <out>/<label>_summary.json and a combined
// <out>/residuals.svg, and returns the summaries.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log);

struct ComparisonResult {
  std::vector<RunSummary> summaries;
  bool comparison_ok = false;
};

// Bundled benchmark: eg(eta=0.4), rg(eta=0.4) and eg(eta=0.7) race to
// certified residual 1e-3 on the antidiagonal problem from the all-ones
// start, and arg(eta=0.5) separately runs to 1e-2. Checks that rg(0.4) needs
// strictly fewer gradient calls than eg(0.4).
ComparisonResult run_reference_comparison(int n, const std::string& output_dir,
                                          std::ostream& log);

}  // namespace ipsolve
