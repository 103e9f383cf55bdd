#pragma once

#include "ipsolve/core.hpp"

#include <optional>

namespace ipsolve {

// Residual measurements at a point. natural and forward_backward are always
// computable; tangent_exact needs a zero or supported normal-cone operator;
// certified needs an explicit cone element.
struct ResidualReport {
  double natural = 0.0;
  double forward_backward = 0.0;
  double fb_alpha = 1.0;
  std::optional<double> tangent_exact;
  std::optional<double> certified;
};

// ||z - J_A(z - F(z))|| with resolvent parameter 1.
double natural_residual(const InclusionProblem& problem, const Vec& z);

// (1/alpha) ||z - J_{alpha A}(z - alpha F(z))||, alpha > 0.
double forward_backward_residual(const InclusionProblem& problem, double alpha, const Vec& z);

// min_{c in A(z)} ||F(z) + c||. For A = 0 this is ||F(z)||; for a normal cone
// it equals the norm of the tangent-cone projection of -F(z). Throws for
// subgradient and custom operators, where the cone has no closed form here.
double tangent_residual_exact(const InclusionProblem& problem, const Vec& z);

// ||F_z + c|| for an explicitly constructed c in A(z); an upper bound on the
// tangent residual whose validity is certified by the caller's cone element.
double certified_residual(const Vec& F_z, const Vec& c);

struct GapResult {
  double value = 0.0;
  bool is_exact = false;
};

// Restricted gap max_{z' in Z, ||z'-z|| <= D} <F(z), z - z'>. Exact in closed
// form for full-space and ball feasible sets; otherwise returns the upper
// bound D * ||F(z) + c|| with c the minimizing normal-cone element.
GapResult restricted_gap(const InclusionProblem& problem, double D, const Vec& z);

}  // namespace ipsolve
