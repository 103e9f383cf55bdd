#include "ipsolve/analysis.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ipsolve {

namespace {

void require_algorithm(const Trajectory& traj, Algorithm want, const std::string& who) {
  if (traj.config.algorithm != want)
    throw std::invalid_argument(who + ": needs a " + algorithm_name(want) +
                                " trajectory, got " + algorithm_name(traj.config.algorithm));
}

const Vec& require_solution(const Trajectory& traj, const std::string& who) {
  if (!traj.problem.known_solution)
    throw std::invalid_argument(who + ": problem has no known solution");
  return *traj.problem.known_solution;
}

void require_record(const Trajectory& traj, int t, const std::string& who) {
  if (t < 1 || t >= static_cast<int>(traj.records.size()))
    throw std::invalid_argument(who + ": t = " + std::to_string(t) +
                                " outside the recorded range [1, " +
                                std::to_string(traj.records.size() - 1) + "]");
}

double effective_rho(const InclusionProblem& p) {
  if (p.regime.kind == Regime::Kind::Monotone) return 0.0;
  return std::min(p.regime.rho, 0.0);
}

// track the worst signed violation and where it happened
struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  long at = 0;

  void update(double v, long where) {
    if (v > value) {
      value = v;
      at = where;
    }
  }
  void finalize() {
    if (!std::isfinite(value)) value = 0.0;  // nothing checked: vacuous pass
  }
};

double first_identity_defect(const Vec& x2, const Vec& y1, const Vec& y2, const Vec& y3,
                             const Vec& y4, const Vec& u2, const Vec& u4) {
  Vec x3 = x2 - y1 - u2;
  Vec x4 = x2 - y3 - u4;
  double lhs = (y2 + u2).squaredNorm() + (y2 - y1).squaredNorm() - (y4 + u4).squaredNorm() -
               (y4 - y3).squaredNorm() - 2.0 * (y4 - y2).dot(x4 - x2) -
               2.0 * (0.25 * (x4 - x3).squaredNorm() - (y4 - y3).squaredNorm()) -
               2.0 * (u4 - u2).dot(x4 - x2);
  double rhs = (0.5 * (x3 - x4) + y1 - y2).squaredNorm() +
               (0.5 * (x3 + x4) - x2 + y2 + u2).squaredNorm();
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

double second_identity_defect(const Vec& x0, const Vec& x2, const Vec& y1, const Vec& y2,
                              const Vec& y3, const Vec& y4, const Vec& u2, const Vec& u4,
                              double k, double q) {
  Vec pull = (x0 - x2) / (k + 1.0);
  Vec x3 = x2 - y1 - u2 + pull;
  Vec x4 = x2 - y3 - u4 + pull;
  double lhs = 0.5 * k * (k + 1.0) * ((y2 + u2).squaredNorm() + (y2 - y1).squaredNorm()) +
               k * (y2 + u2).dot(x2 - x0) -
               0.5 * (k + 1.0) * (k + 2.0) * ((y4 + u4).squaredNorm() + (y4 - y3).squaredNorm()) -
               (k + 1.0) * (y4 + u4).dot(x4 - x0) -
               k * (k + 1.0) * (y4 + u4 - y2 - u2).dot(x4 - x2) -
               k * (k + 1.0) / (4.0 * q) *
                   (q * (x4 - x3).squaredNorm() - (y4 - y3).squaredNorm());
  double rhs = 0.25 * k * (k + 1.0) * (u4 - u2 + y1 - 2.0 * y2 + y3).squaredNorm() +
               ((1.0 - 4.0 * q) * k - 4.0 * q) / (4.0 * q) * (k + 1.0) *
                   (y3 - y4).squaredNorm() +
               (k + 1.0) * (y3 - y4).dot(y4 + u4);
  return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

}  // namespace

double potential_P(const Trajectory& traj, int t) {
  require_algorithm(traj, Algorithm::RG, "potential_P");
  require_record(traj, t, "potential_P");
  const auto& rec = traj.records[t];
  const Vec F_t = traj.problem.F(rec.z);
  const Vec F_half = traj.problem.F(rec.z_half);
  return (F_t + *rec.cone_element).squaredNorm() + (F_t - F_half).squaredNorm();
}

double potential_V(const Trajectory& traj, int t) {
  require_algorithm(traj, Algorithm::ARG, "potential_V");
  require_record(traj, t, "potential_V");
  const auto& rec = traj.records[t];
  const double eta = traj.config.eta;
  const Vec F_t = traj.problem.F(rec.z);
  const Vec F_half = traj.problem.F(rec.z_half);
  Vec g = eta * F_t + eta * *rec.cone_element;
  Vec d = eta * F_t - eta * F_half;
  const double w = 0.5 * double(t) * double(t + 1);
  return w * (g.squaredNorm() + d.squaredNorm()) + double(t) * g.dot(rec.z - traj.records[0].z);
}

AuditReport audit_rg_potential(const Trajectory& traj) {
  require_algorithm(traj, Algorithm::RG, "audit_rg_potential");
  const int N = static_cast<int>(traj.records.size()) - 1;
  AuditReport rep;
  rep.audit_name = "rg_potential";
  const double P1 = (N >= 1) ? potential_P(traj, 1) : 0.0;
  rep.tolerance = 1e-9 * std::max(1.0, P1);
  rep.constants["P_1"] = P1;
  rep.constants["eta"] = traj.config.eta;
  rep.constants["monotone_regime"] =
      (traj.problem.regime.kind == Regime::Kind::Monotone) ? 1.0 : 0.0;

  Worst worst;
  double prev = P1;
  for (int t = 2; t <= N; ++t) {
    double cur = potential_P(traj, t);
    worst.update(cur - prev, t);
    prev = cur;
  }
  worst.finalize();
  rep.worst_violation = worst.value;
  rep.worst_iteration = worst.at;
  rep.passed = rep.worst_violation <= rep.tolerance;
  return rep;
}

AuditReport audit_arg_potential(const Trajectory& traj) {
  require_algorithm(traj, Algorithm::ARG, "audit_arg_potential");
  const int N = static_cast<int>(traj.records.size()) - 1;
  AuditReport rep;
  rep.audit_name = "arg_potential";
  const double eta = traj.config.eta;
  const double V1 = (N >= 1) ? potential_V(traj, 1) : 0.0;
  rep.tolerance = 1e-9 * std::max(1.0, std::abs(V1));
  rep.constants["V_1"] = V1;
  rep.constants["eta"] = eta;

  Worst worst;
  double prev = V1;
  for (int t = 2; t <= N; ++t) {
    double cur = potential_V(traj, t);
    const auto& rec = traj.records[t];
    const Vec F_t = traj.problem.F(rec.z);
    double gain = 0.125 * (eta * F_t + eta * *rec.cone_element).squaredNorm();
    worst.update(cur - prev - gain, t);
    prev = cur;
  }
  worst.finalize();
  rep.worst_violation = worst.value;
  rep.worst_iteration = worst.at;
  rep.passed = rep.worst_violation <= rep.tolerance;
  return rep;
}

AuditReport audit_theorem_bound(const Trajectory& traj, const std::string& which) {
  AuditReport rep;
  rep.audit_name = which;
  rep.tolerance = 1e-9;
  const double eta = traj.config.eta;
  const double L = traj.problem.F.lipschitz;
  const int N = static_cast<int>(traj.records.size()) - 1;
  Worst worst;

  if (which == "og_thm") {
    require_algorithm(traj, Algorithm::OG, "audit_theorem_bound(og_thm)");
    const Vec& star = require_solution(traj, "audit_theorem_bound(og_thm)");
    const double rho = effective_rho(traj.problem);
    const double C = 0.5 + 2.0 * rho / eta - 2.0 * eta * eta * L * L;
    if (!(C > 0.0))
      throw std::domain_error("og_thm: rate constant 1/2 + 2*rho/eta - 2*eta^2*L^2 = " +
                              std::to_string(C) + " is not positive; stepsize inadmissible");
    rep.constants["C"] = C;
    rep.constants["rho"] = rho;
    if (N >= 1) {
      const double H2 = (traj.records[1].z - star).squaredNorm() +
                        0.25 * (traj.records[1].z_half - traj.records[0].z).squaredNorm();
      rep.constants["H2"] = H2;
      double best = std::numeric_limits<double>::infinity();
      for (int T = 1; T <= N - 1; ++T) {
        best = std::min(best,
                        (traj.records[T + 1].z - traj.records[T].z).squaredNorm() / (eta * eta));
        const double bound = H2 / (C * eta * eta * T);
        worst.update((best - bound) / std::max(1.0, bound), T);
      }
    }
  } else if (which == "arg_thm") {
    require_algorithm(traj, Algorithm::ARG, "audit_theorem_bound(arg_thm)");
    const Vec& star = require_solution(traj, "audit_theorem_bound(arg_thm)");
    if (N >= 1) {
      const double H2 = (traj.records[0].z - star).squaredNorm() +
                        4.0 * (traj.records[1].z - traj.records[0].z).squaredNorm();
      const double H = std::sqrt(H2);
      rep.constants["H2"] = H2;
      for (int T = 1; T <= N; ++T) {
        const auto& rec = traj.records[T];
        const double r = (traj.problem.F(rec.z) + *rec.cone_element).norm();
        const double bound = std::sqrt(6.0) * H / (eta * T);
        worst.update((r - bound) / std::max(1.0, bound), T);
      }
    }
  } else if (which == "rg_thm") {
    require_algorithm(traj, Algorithm::RG, "audit_theorem_bound(rg_thm)");
    const Vec& star = require_solution(traj, "audit_theorem_bound(rg_thm)");
    const double cap = 1.0 / ((1.0 + std::sqrt(2.0)) * L);
    if (!(eta < cap))
      throw std::domain_error("rg_thm: eta = " + std::to_string(eta) +
                              " is not below 1/((1+sqrt(2))L) = " + std::to_string(cap));
    const double lambda = std::sqrt(6.0 * (1.0 + 3.0 * eta * eta * L * L) /
                                    (eta * eta * L * L * (1.0 - (1.0 + std::sqrt(2.0)) * eta * L)));
    const Vec F_z0 = traj.problem.F(traj.records[0].z);
    const double H2 =
        4.0 * (traj.records[0].z - star).squaredNorm() + 13.0 / (L * L) * F_z0.squaredNorm();
    const double H = std::sqrt(H2);
    const double D = 1.0;
    rep.constants["lambda"] = lambda;
    rep.constants["H2"] = H2;
    rep.constants["D"] = D;
    const auto a_kind = traj.problem.A.kind();
    const bool gap_supported = a_kind == MaximalMonotoneOperator::Kind::Zero ||
                               a_kind == MaximalMonotoneOperator::Kind::NormalCone;
    rep.constants["gap_checked"] = gap_supported ? 1.0 : 0.0;
    for (int T = 1; T <= N; ++T) {
      const auto& rec = traj.records[T];
      const double r = (traj.problem.F(rec.z) + *rec.cone_element).norm();
      const double bound = lambda * H * L / std::sqrt(double(T));
      worst.update((r - bound) / std::max(1.0, bound), T);
      if (gap_supported) {
        const double gap = restricted_gap(traj.problem, D, rec.z).value;
        const double gap_bound = lambda * D * H * L / std::sqrt(double(T));
        worst.update((gap - gap_bound) / std::max(1.0, gap_bound), T);
      }
    }
  } else {
    throw std::invalid_argument("audit_theorem_bound: unknown bound \"" + which +
                                "\" (want og_thm|arg_thm|rg_thm)");
  }

  worst.finalize();
  rep.worst_violation = worst.value;
  rep.worst_iteration = worst.at;
  rep.passed = rep.worst_violation <= rep.tolerance;
  return rep;
}

AuditReport audit_best_iterate_sums(const Trajectory& traj) {
  require_algorithm(traj, Algorithm::RG, "audit_best_iterate_sums");
  const Vec& star = require_solution(traj, "audit_best_iterate_sums");
  const double eta = traj.config.eta;
  const double L = traj.problem.F.lipschitz;
  const double shrink = 1.0 - (1.0 + std::sqrt(2.0)) * eta * L;
  if (!(shrink > 0.0))
    throw std::domain_error("audit_best_iterate_sums: eta = " + std::to_string(eta) +
                            " is not below 1/((1+sqrt(2))L)");
  const double lambda =
      std::sqrt(6.0 * (1.0 + 3.0 * eta * eta * L * L) / (eta * eta * L * L * shrink));
  const Vec F_z0 = traj.problem.F(traj.records[0].z);
  const double H2 =
      4.0 * (traj.records[0].z - star).squaredNorm() + 13.0 / (L * L) * F_z0.squaredNorm();
  const double step_bound = H2 / shrink;
  const double p_bound = lambda * lambda * H2 * L * L;

  AuditReport rep;
  rep.audit_name = "best_iterate_sums";
  rep.tolerance = 1e-9;
  rep.constants["H2"] = H2;
  rep.constants["lambda"] = lambda;
  rep.constants["step_sum_bound"] = step_bound;
  rep.constants["potential_sum_bound"] = p_bound;

  Worst worst;
  double step_sum = 0.0, p_sum = 0.0;
  const int N = static_cast<int>(traj.records.size()) - 1;
  for (int t = 1; t <= N; ++t) {
    // ||z_{t+1/2} - z_t|| = ||z_t - z_{t-1}|| by the reflection step
    step_sum += (traj.records[t].z - traj.records[t - 1].z).squaredNorm();
    p_sum += potential_P(traj, t);
    worst.update((step_sum - step_bound) / std::max(1.0, step_bound), t);
    worst.update((p_sum - p_bound) / std::max(1.0, p_bound), t);
  }
  worst.finalize();
  rep.worst_violation = worst.value;
  rep.worst_iteration = worst.at;
  rep.passed = rep.worst_violation <= rep.tolerance;
  return rep;
}

AuditReport verify_identity(const std::string& which, int trials, std::uint64_t seed, int dim) {
  const bool first = which == "first";
  if (!first && which != "second")
    throw std::invalid_argument("verify_identity: unknown identity \"" + which +
                                "\" (want first|second)");
  if (trials < 1) throw std::invalid_argument("verify_identity: trials must be positive");
  if (dim < 1) throw std::invalid_argument("verify_identity: dim must be positive");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> kdist(1, 10);
  std::uniform_real_distribution<double> qdist(0.001, 0.999);
  auto draw = [&] {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
    return v;
  };

  AuditReport rep;
  rep.audit_name = first ? "identity_first" : "identity_second";
  rep.tolerance = 1e-9;
  rep.constants["dim"] = dim;
  rep.constants["trials"] = trials;

  Worst worst;
  const Vec zero = Vec::Zero(dim);
  for (int trial = 0; trial < trials; ++trial) {
    double defect;
    if (trial == 0) {
      // degenerate all-zero case must give lhs = rhs = 0 exactly
      defect = first ? first_identity_defect(zero, zero, zero, zero, zero, zero, zero)
                     : second_identity_defect(zero, zero, zero, zero, zero, zero, zero, zero,
                                              1.0, 0.5);
    } else if (first) {
      defect = first_identity_defect(draw(), draw(), draw(), draw(), draw(), draw(), draw());
    } else {
      double k = double(kdist(rng));
      // sweep q across (0, 1) including values beside the 1/4 sign change
      double q = qdist(rng);
      if (trial % 17 == 1) q = 0.01;
      if (trial % 17 == 5) q = 0.24;
      if (trial % 17 == 9) q = 0.26;
      if (trial % 17 == 13) q = 0.99;
      defect = second_identity_defect(draw(), draw(), draw(), draw(), draw(), draw(), draw(),
                                      draw(), k, q);
    }
    worst.update(defect, trial);
  }
  worst.finalize();
  rep.worst_violation = worst.value;
  rep.worst_iteration = worst.at;
  rep.passed = rep.worst_violation <= rep.tolerance;
  return rep;
}

AuditReport verify_sequence_bound(double C1, double p, int K, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0 / 3.0))
    throw std::invalid_argument("verify_sequence_bound: p = " + std::to_string(p) +
                                " must lie in (0, 1/3)");
  if (C1 < 0.0) throw std::invalid_argument("verify_sequence_bound: C1 must be nonnegative");
  if (K < 2) throw std::invalid_argument("verify_sequence_bound: horizon K must be at least 2");

  AuditReport rep;
  rep.audit_name = "sequence_bound";
  rep.tolerance = 1e-12;
  rep.constants["C1"] = C1;
  rep.constants["p"] = p;
  rep.constants["K"] = K;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> theta(0.0, 1.0);
  const double feed = p / (1.0 - p);
  Worst worst;

  // sequence 0 saturates the hypothesis with equality; the rest scale each
  // term by a random factor in [0, 1], staying feasible
  for (int seq = 0; seq <= 100; ++seq) {
    double sum = 0.0;
    for (int k = 2; k <= K; ++k) {
      const double cap = 4.0 / (double(k) * k) * (C1 + feed * sum);
      const double a = (seq == 0) ? cap : theta(rng) * cap;
      const double bound = 4.0 * C1 / ((1.0 - 3.0 * p) * double(k) * k);
      worst.update((a - bound) / std::max(bound, std::numeric_limits<double>::min()), k);
      sum += a;
    }
  }
  worst.finalize();
  rep.worst_violation = worst.value;
  rep.worst_iteration = worst.at;
  rep.passed = rep.worst_violation <= rep.tolerance;
  return rep;
}

RateFit fit_rate(const Trajectory& traj, int t_lo, int t_hi) {
  const int N = static_cast<int>(traj.records.size()) - 1;
  if (t_lo < 1 || t_hi > N || t_lo >= t_hi)
    throw std::invalid_argument("fit_rate: window [" + std::to_string(t_lo) + ", " +
                                std::to_string(t_hi) + "] invalid for records up to t = " +
                                std::to_string(N));
  bool all_certified = true;
  for (int t = t_lo; t <= t_hi; ++t)
    if (!traj.records[t].residuals.certified) all_certified = false;

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const int n = t_hi - t_lo + 1;
  for (int t = t_lo; t <= t_hi; ++t) {
    const auto& res = traj.records[t].residuals;
    const double r = all_certified ? *res.certified : res.natural;
    if (!(r > 0.0))
      throw std::invalid_argument("fit_rate: nonpositive residual at t = " + std::to_string(t));
    const double x = std::log(double(t));
    const double y = std::log(r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  RateFit fit;
  fit.slope = cxy / vx;
  fit.r_squared = (vy > 0.0) ? (cxy * cxy) / (vx * vy) : 1.0;
  return fit;
}

}  // namespace ipsolve
