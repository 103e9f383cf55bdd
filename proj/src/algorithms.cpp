#include "ipsolve/algorithms.hpp"

#include <cmath>
#include <stdexcept>

namespace ipsolve {

namespace {

constexpr double kDivergenceNorm = 1e12;

double effective_rho(const InclusionProblem& p) {
  if (p.regime.kind == Regime::Kind::Monotone) return 0.0;
  return std::min(p.regime.rho, 0.0);  // cocoercive declarations fall back to 0
}

std::vector<std::string> admissibility_warnings(const InclusionProblem& p,
                                                const AlgorithmConfig& c) {
  std::vector<std::string> w;
  const double L = p.F.lipschitz;
  const double eta = c.eta;
  const double rho = effective_rho(p);
  switch (c.algorithm) {
    case Algorithm::OG: {
      const double cap = 1.0 / (2.0 * L);
      if (!(eta < cap))
        w.push_back("og: eta = " + std::to_string(eta) + " is not below 1/(2L) = " +
                    std::to_string(cap));
      const double C = 0.5 + 2.0 * rho / eta - 2.0 * eta * eta * L * L;
      if (!(C > 0.0))
        w.push_back("og: rate constant 1/2 + 2*rho/eta - 2*eta^2*L^2 = " + std::to_string(C) +
                    " is not positive");
      break;
    }
    case Algorithm::RG: {
      const double cap = 1.0 / ((1.0 + std::sqrt(2.0)) * L);
      if (!(eta < cap))
        w.push_back("rg: eta = " + std::to_string(eta) + " is not below 1/((1+sqrt(2))L) = " +
                    std::to_string(cap));
      break;
    }
    case Algorithm::ARG: {
      const double lhs = 0.5 - (12.0 - 4.0 * rho / eta) * eta * eta * L * L + 2.0 * rho / eta;
      if (!(lhs >= 0.0))
        w.push_back("arg: stepsize condition 1/2 - (12 - 4*rho/eta)*eta^2*L^2 + 2*rho/eta = " +
                    std::to_string(lhs) + " is negative");
      break;
    }
    default:
      break;
  }
  return w;
}

ResidualReport measure_residuals(const InclusionProblem& p, const Vec& z,
                                 const std::optional<Vec>& cone, Algorithm alg, double eta,
                                 const Vec* og_prev) {
  ResidualReport r;
  const Vec F_z = p.F(z);
  r.natural = (z - p.A.resolvent(1.0, z - F_z)).norm();
  r.forward_backward = r.natural;
  r.fb_alpha = 1.0;
  switch (p.A.kind()) {
    case MaximalMonotoneOperator::Kind::Zero:
      r.tangent_exact = F_z.norm();
      break;
    case MaximalMonotoneOperator::Kind::NormalCone:
      r.tangent_exact = p.A.set()->project_tangent(z, -F_z).norm();
      break;
    default:
      break;
  }
  if (alg == Algorithm::OG && og_prev != nullptr)
    r.certified = (*og_prev - z).norm() / eta;  // = ||F(z_half) + a|| at the midpoint
  else if (cone)
    r.certified = certified_residual(F_z, *cone);
  return r;
}

}  // namespace

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::EG: return "eg";
    case Algorithm::PEG: return "peg";
    case Algorithm::OG: return "og";
    case Algorithm::RG: return "rg";
    case Algorithm::ARG: return "arg";
  }
  throw std::logic_error("algorithm_name: unreachable");
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "eg") return Algorithm::EG;
  if (name == "peg") return Algorithm::PEG;
  if (name == "og") return Algorithm::OG;
  if (name == "rg") return Algorithm::RG;
  if (name == "arg") return Algorithm::ARG;
  throw std::invalid_argument("unknown algorithm \"" + name + "\" (want eg|peg|og|rg|arg)");
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::MaxIterations: return "max_iterations";
    case Termination::Epsilon: return "epsilon";
    case Termination::Divergence: return "divergence";
  }
  throw std::logic_error("termination_name: unreachable");
}

StepResult step_eg(const InclusionProblem& p, double eta, const Vec& z) {
  const Vec f_z = p.F(z);
  Vec half = p.A.resolvent(eta, z - eta * f_z);
  Vec f_half = p.F(half);
  Vec arg = z - eta * f_half;
  Vec z_next = p.A.resolvent(eta, arg);
  Vec c = (arg - z_next) / eta;
  return {std::move(half), std::move(z_next), std::move(c), std::move(f_half)};
}

StepResult step_peg(const InclusionProblem& p, double eta, const Vec& z, const Vec& f_prev) {
  Vec half = p.A.resolvent(eta, z - eta * f_prev);
  Vec f_half = p.F(half);
  Vec arg = z - eta * f_half;
  Vec z_next = p.A.resolvent(eta, arg);
  Vec c = (arg - z_next) / eta;
  return {std::move(half), std::move(z_next), std::move(c), std::move(f_half)};
}

StepResult step_og(const InclusionProblem& p, double eta, const Vec& z, const Vec& f_prev) {
  Vec jarg = z - eta * f_prev;
  Vec half = p.A.resolvent(eta, jarg);
  Vec a = (jarg - half) / eta;  // resolvent graph: a in A(half)
  Vec f_half = p.F(half);
  Vec delta = eta * f_prev - eta * f_half;
  Vec z_next = half + delta;
  return {std::move(half), std::move(z_next), std::move(a), std::move(f_half)};
}

StepResult step_rg(const InclusionProblem& p, double eta, const Vec& z, const Vec& z_prev) {
  Vec half = 2.0 * z - z_prev;
  Vec f_half = p.F(half);
  Vec arg = z - eta * f_half;
  Vec z_next = p.A.resolvent(eta, arg);
  Vec c = (arg - z_next) / eta;
  return {std::move(half), std::move(z_next), std::move(c), std::move(f_half)};
}

StepResult step_arg(const InclusionProblem& p, double eta, const Vec& z0, const Vec& z,
                    const Vec& z_prev, int t) {
  if (t < 1) throw std::invalid_argument("step_arg: t must be >= 1");
  const int s = t - 1;
  Vec half;
  if (s == 0)
    half = z0;
  else
    half = 2.0 * z - z_prev + (z0 - z) / double(s + 1) - (z0 - z_prev) / double(s);
  Vec f_half = p.F(half);
  Vec arg = z - eta * f_half + (z0 - z) / double(s + 1);
  Vec z_next = p.A.resolvent(eta, arg);
  Vec c = (arg - z_next) / eta;
  return {std::move(half), std::move(z_next), std::move(c), std::move(f_half)};
}

double stepsize_og(double L, double rho) {
  if (L <= 0.0) throw std::invalid_argument("stepsize_og: L must be positive");
  const double bound = -1.0 / (12.0 * std::sqrt(3.0) * L);
  if (!(rho > bound && rho <= 0.0))
    throw std::domain_error("stepsize_og: rho = " + std::to_string(rho) +
                            " outside the admissible range (-1/(12*sqrt(3)*L), 0] = (" +
                            std::to_string(bound) + ", 0]");
  return 1.0 / (2.0 * std::sqrt(3.0) * L);
}

double stepsize_arg(double L, double rho) {
  if (L <= 0.0) throw std::invalid_argument("stepsize_arg: L must be positive");
  const double bound = -1.0 / (60.0 * L);
  if (!(rho >= bound && rho <= 0.0))
    throw std::domain_error("stepsize_arg: rho = " + std::to_string(rho) +
                            " outside the admissible range [-1/(60*L), 0] = [" +
                            std::to_string(bound) + ", 0]");
  return 1.0 / (12.0 * L);
}

Trajectory run(const InclusionProblem& problem, const AlgorithmConfig& config) {
  if (!(config.eta > 0.0)) throw std::invalid_argument("run: eta must be positive");
  if (config.max_iterations < 0)
    throw std::invalid_argument("run: max_iterations must be nonnegative");
  if (config.initial_point.size() != problem.dim)
    throw std::invalid_argument("run: initial point dimension " +
                                std::to_string(config.initial_point.size()) +
                                " does not match problem dimension " +
                                std::to_string(problem.dim));

  Trajectory traj;
  traj.config = config;
  traj.problem = problem;
  traj.warnings = admissibility_warnings(problem, config);

  // oracle-call counting: the steppers see only these counted wrappers;
  // residual measurement below uses the raw problem and is not charged
  long grad_calls = 0, resolvent_calls = 0;
  InclusionProblem counted = problem;
  counted.F.fn = [&grad_calls, base = problem.F.fn](const Vec& x) {
    ++grad_calls;
    return base(x);
  };
  counted.A = MaximalMonotoneOperator::custom(
      [&resolvent_calls, A = problem.A](double eta, const Vec& x) {
        ++resolvent_calls;
        return A.resolvent(eta, x);
      });

  const double eta = config.eta;
  const double eps = config.stop_epsilon;
  const Vec z0 = config.initial_point;

  TrajectoryRecord rec0;
  rec0.t = 0;
  rec0.z = z0;
  rec0.z_half = z0;
  if (problem.A.kind() == MaximalMonotoneOperator::Kind::Zero)
    rec0.cone_element = Vec::Zero(problem.dim);  // 0 is the only element of A(z)
  rec0.residuals = measure_residuals(problem, z0, rec0.cone_element, config.algorithm, eta, nullptr);
  traj.records.push_back(rec0);
  if (eps > 0.0 && rec0.residuals.certified && *rec0.residuals.certified <= eps) {
    traj.terminated_by = Termination::Epsilon;
    return traj;
  }

  Vec z = z0, z_prev = z0;
  // seed gradient for the single-call methods; F(z0) was already evaluated by
  // the initial residual measurement, so this is not charged as an oracle call
  Vec f_prev;
  if (config.algorithm == Algorithm::PEG || config.algorithm == Algorithm::OG)
    f_prev = problem.F(z0);

  traj.terminated_by = Termination::MaxIterations;
  for (int t = 1; t <= config.max_iterations; ++t) {
    StepResult s;
    switch (config.algorithm) {
      case Algorithm::EG:
        s = step_eg(counted, eta, z);
        break;
      case Algorithm::PEG:
        s = step_peg(counted, eta, z, f_prev);
        f_prev = s.f_half;
        break;
      case Algorithm::OG:
        s = step_og(counted, eta, z, f_prev);
        f_prev = s.f_half;
        break;
      case Algorithm::RG:
        s = step_rg(counted, eta, z, z_prev);
        break;
      case Algorithm::ARG:
        s = step_arg(counted, eta, z0, z, z_prev, t);
        break;
    }
    if (!s.z_next.allFinite() || s.z_next.norm() > kDivergenceNorm) {
      traj.terminated_by = Termination::Divergence;
      break;
    }

    TrajectoryRecord rec;
    rec.t = t;
    rec.z = s.z_next;
    rec.z_half = s.z_half;
    rec.cone_element = s.cone_element;
    rec.grad_calls = grad_calls;
    rec.resolvent_calls = resolvent_calls;
    rec.residuals = measure_residuals(problem, s.z_next, rec.cone_element, config.algorithm, eta,
                                      config.algorithm == Algorithm::OG ? &z : nullptr);
    z_prev = z;
    z = s.z_next;
    traj.records.push_back(std::move(rec));

    const auto& r = traj.records.back().residuals;
    if (eps > 0.0 && r.certified && *r.certified <= eps) {
      traj.terminated_by = Termination::Epsilon;
      break;
    }
  }
  return traj;
}

}  // namespace ipsolve
