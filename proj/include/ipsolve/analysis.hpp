#pragma once

#include "ipsolve/algorithms.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace ipsolve {

// Result of a numerical audit. worst_violation is signed and normalized per
// audit (see each function); the audit passes iff it is <= tolerance.
struct AuditReport {
  std::string audit_name;
  bool passed = false;
  double worst_violation = 0.0;
  long worst_iteration = 0;
  std::map<std::string, double> constants;
  double tolerance = 0.0;
};

// P_t = ||F(z_t) + c_t||^2 + ||F(z_t) - F(z_{t-1/2})||^2 on rg trajectories.
double potential_P(const Trajectory& traj, int t);

// V_t = t(t+1)/2 (||eta F(z_t) + eta c_t||^2 + ||eta F(z_t) - eta F(z_{t-1/2})||^2)
//       + t <eta F(z_t) + eta c_t, z_t - z_0> on arg trajectories.
double potential_V(const Trajectory& traj, int t);

// P_{t+1} <= P_t at every t >= 1, up to 1e-9 * max(1, P_1) absolute slack.
AuditReport audit_rg_potential(const Trajectory& traj);

// V_{t+1} <= V_t + (1/8) ||eta F(z_{t+1}) + eta c_{t+1}||^2 at every t >= 1,
// up to 1e-9 * max(1, |V_1|) absolute slack.
AuditReport audit_arg_potential(const Trajectory& traj);

// Convergence-rate guarantees, checked at every prefix. which selects the
// guarantee: "og_thm" (best squared step / eta^2 below H^2/(C eta^2 T)),
// "arg_thm" (certified residual below sqrt(6) H / (eta T)), "rg_thm"
// (certified residual below lambda H L / sqrt(T), restricted gap at D = 1
// below lambda D H L / sqrt(T)). Violations are relative to the bound.
AuditReport audit_theorem_bound(const Trajectory& traj, const std::string& which);

// Cumulative-sum guarantees for rg: sum of squared steps below
// H^2 / (1 - (1+sqrt(2)) eta L) and sum of P_t below lambda^2 H^2 L^2,
// both at every prefix.
AuditReport audit_best_iterate_sums(const Trajectory& traj);

// Randomized check of the two sum-of-squares identities behind the potential
// arguments; which is "first" or "second". Vectors are standard normal in the
// given dimension, k is an integer in [1, 10], q is uniform in (0, 1). The
// relative defect |lhs - rhs| / (1 + |lhs|) must stay below 1e-9.
AuditReport verify_identity(const std::string& which, int trials, std::uint64_t seed,
                            int dim = 8);

// Checks the recursive-sequence bound: any nonnegative sequence with
// (k^2/4) a_k <= C1 + (p/(1-p)) sum_{t=2}^{k-1} a_t satisfies
// a_k <= 4 C1 / ((1-3p) k^2). Verifies the extremal equality sequence and 100
// random feasible sequences up to horizon K. Requires p in (0, 1/3).
AuditReport verify_sequence_bound(double C1, double p, int K, std::uint64_t seed = 0);

struct RateFit {
  double slope = 0.0;
  double r_squared = 0.0;
};

// Least-squares slope of log(residual) against log(t) over [t_lo, t_hi].
// Uses the certified residual when present at every window record, otherwise
// the natural residual; nonpositive values make the window invalid.
RateFit fit_rate(const Trajectory& traj, int t_lo, int t_hi);

}  // namespace ipsolve
