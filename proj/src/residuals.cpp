#include "ipsolve/residuals.hpp"

#include <cmath>
#include <stdexcept>

namespace ipsolve {

namespace {

// min <g, x> over B(c1, r1) ∩ B(c2, r2); the intersection must be nonempty.
double min_linear_two_balls(const Vec& g, const Vec& c1, double r1, const Vec& c2, double r2) {
  double gn = g.norm();
  if (gn == 0.0) return 0.0;
  Vec ghat = g / gn;

  Vec p1 = c1 - r1 * ghat;
  if ((p1 - c2).norm() <= r2 * (1.0 + 1e-12)) return g.dot(p1);
  Vec p2 = c2 - r2 * ghat;
  if ((p2 - c1).norm() <= r1 * (1.0 + 1e-12)) return g.dot(p2);

  // optimum on the sphere-sphere intersection, a sphere of radius rc inside
  // the hyperplane orthogonal to d through m
  Vec d = c2 - c1;
  double dn2 = d.squaredNorm();
  if (dn2 == 0.0) {
    double r = std::min(r1, r2);
    return g.dot(c1) - r * gn;
  }
  double t = (r1 * r1 - r2 * r2 + dn2) / (2.0 * dn2);
  Vec m = c1 + t * d;
  double rc2 = std::max(r1 * r1 - t * t * dn2, 0.0);
  Vec g_perp = g - (g.dot(d) / dn2) * d;
  return g.dot(m) - std::sqrt(rc2) * g_perp.norm();
}

}  // namespace

double natural_residual(const InclusionProblem& problem, const Vec& z) {
  if (z.size() != problem.dim)
    throw std::invalid_argument("natural_residual: point dimension mismatch");
  return (z - problem.A.resolvent(1.0, z - problem.F(z))).norm();
}

double forward_backward_residual(const InclusionProblem& problem, double alpha, const Vec& z) {
  if (alpha <= 0.0)
    throw std::invalid_argument("forward_backward_residual: alpha must be positive");
  if (z.size() != problem.dim)
    throw std::invalid_argument("forward_backward_residual: point dimension mismatch");
  return (z - problem.A.resolvent(alpha, z - alpha * problem.F(z))).norm() / alpha;
}

double tangent_residual_exact(const InclusionProblem& problem, const Vec& z) {
  if (z.size() != problem.dim)
    throw std::invalid_argument("tangent_residual_exact: point dimension mismatch");
  const Vec F_z = problem.F(z);
  switch (problem.A.kind()) {
    case MaximalMonotoneOperator::Kind::Zero:
      return F_z.norm();
    case MaximalMonotoneOperator::Kind::NormalCone:
      // Moreau: dist(-F(z), N_Z(z)) = ||P_{T_Z(z)}(-F(z))||
      return problem.A.set()->project_tangent(z, -F_z).norm();
    default:
      throw std::domain_error(
          "tangent_residual_exact: only zero and normal-cone operators are supported");
  }
}

double certified_residual(const Vec& F_z, const Vec& c) {
  if (F_z.size() != c.size())
    throw std::invalid_argument("certified_residual: dimension mismatch");
  return (F_z + c).norm();
}

GapResult restricted_gap(const InclusionProblem& problem, double D, const Vec& z) {
  if (D <= 0.0) throw std::invalid_argument("restricted_gap: D must be positive");
  if (z.size() != problem.dim)
    throw std::invalid_argument("restricted_gap: point dimension mismatch");

  const auto kind = problem.A.kind();
  if (kind != MaximalMonotoneOperator::Kind::Zero &&
      kind != MaximalMonotoneOperator::Kind::NormalCone)
    throw std::domain_error("restricted_gap: needs a zero or normal-cone operator");

  const Vec F_z = problem.F(z);
  if (kind == MaximalMonotoneOperator::Kind::Zero)
    return {D * F_z.norm(), true};

  const FeasibleSet& set = *problem.A.set();
  if (!set.contains(z, 1e-9))
    throw std::domain_error("restricted_gap: point is infeasible");

  switch (set.kind()) {
    case FeasibleSet::Kind::FullSpace:
      return {D * F_z.norm(), true};
    case FeasibleSet::Kind::Ball: {
      double m = min_linear_two_balls(F_z, set.center(), set.radius(), z, D);
      return {F_z.dot(z) - m, true};
    }
    default:
      return {D * tangent_residual_exact(problem, z), false};
  }
}

}  // namespace ipsolve
