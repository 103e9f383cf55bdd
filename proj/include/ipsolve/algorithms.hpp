#pragma once

#include "ipsolve/core.hpp"
#include "ipsolve/residuals.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ipsolve {

enum class Algorithm { EG, PEG, OG, RG, ARG };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::EG;
  double eta = 0.1;
  int max_iterations = 10000;
  double stop_epsilon = 0.0;  // 0 disables the residual stop
  Vec initial_point;
  std::uint64_t seed = 0;  // reserved; keeps artifact layout stable
};

struct TrajectoryRecord {
  int t = 0;
  Vec z;
  Vec z_half;  // midpoint used to produce z (equals z at t = 0)
  // For EG/PEG/RG/ARG an element of A(z); for OG an element of A(z_half),
  // where the method's residual certificate lives.
  std::optional<Vec> cone_element;
  ResidualReport residuals;
  long grad_calls = 0;       // cumulative oracle calls made by the algorithm
  long resolvent_calls = 0;  // measurement calls are not counted
};

enum class Termination { MaxIterations, Epsilon, Divergence };

std::string termination_name(Termination t);

struct Trajectory {
  AlgorithmConfig config;
  InclusionProblem problem;
  std::vector<TrajectoryRecord> records;
  Termination terminated_by = Termination::MaxIterations;
  std::vector<std::string> warnings;  // admissibility notes; never fatal
};

// One iteration of each method, exposed for tests. f_prev carries the cached
// gradient F(z_{t-1/2}) for the single-call methods that reuse it.
struct StepResult {
  Vec z_half;
  Vec z_next;
  Vec cone_element;  // in A(z_next); for OG in A(z_half)
  Vec f_half;        // F(z_half), the new gradient evaluation
};

StepResult step_eg(const InclusionProblem& p, double eta, const Vec& z);
StepResult step_peg(const InclusionProblem& p, double eta, const Vec& z, const Vec& f_prev);
StepResult step_og(const InclusionProblem& p, double eta, const Vec& z, const Vec& f_prev);
StepResult step_rg(const InclusionProblem& p, double eta, const Vec& z, const Vec& z_prev);
// t >= 1; t = 1 is the plain resolvent step from z0 and ignores z_prev
StepResult step_arg(const InclusionProblem& p, double eta, const Vec& z0, const Vec& z,
                    const Vec& z_prev, int t);

// Admissible stepsize 1/(2 sqrt(3) L); valid for rho in (-1/(12 sqrt(3) L), 0].
double stepsize_og(double L, double rho);
// Admissible stepsize 1/(12 L); valid for rho in [-1/(60 L), 0].
double stepsize_arg(double L, double rho);

// Iterates until max_iterations, the certified residual falls to
// stop_epsilon, or an iterate norm exceeds 1e12 (divergence). Inadmissible
// stepsizes are reported through Trajectory::warnings, never as errors.
Trajectory run(const InclusionProblem& problem, const AlgorithmConfig& config);

}  // namespace ipsolve
