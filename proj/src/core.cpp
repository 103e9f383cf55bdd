#include "ipsolve/core.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

namespace ipsolve {

namespace {

constexpr double kBoundaryTol = 1e-9;

bool on_value(double z, double v) {
  return std::abs(z - v) <= kBoundaryTol * (1.0 + std::abs(v));
}

}  // namespace

FeasibleSet FeasibleSet::full_space() { return FeasibleSet(Kind::FullSpace); }

FeasibleSet FeasibleSet::box(Vec lower, Vec upper) {
  if (lower.size() != upper.size())
    throw std::invalid_argument("FeasibleSet::box: lower and upper dimensions differ");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i])
      throw std::invalid_argument("FeasibleSet::box: lower exceeds upper at coordinate " +
                                  std::to_string(i));
  FeasibleSet s(Kind::Box);
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

FeasibleSet FeasibleSet::ball(Vec center, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("FeasibleSet::ball: radius must be positive");
  FeasibleSet s(Kind::Ball);
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

FeasibleSet FeasibleSet::nonneg_orthant() { return FeasibleSet(Kind::NonnegOrthant); }

FeasibleSet FeasibleSet::halfspace(Vec normal, double offset) {
  if (normal.norm() == 0.0)
    throw std::invalid_argument("FeasibleSet::halfspace: normal must be nonzero");
  FeasibleSet s(Kind::Halfspace);
  s.normal_ = std::move(normal);
  s.offset_ = offset;
  return s;
}

void FeasibleSet::check_dim(const Vec& x) const {
  Eigen::Index want = -1;
  switch (kind_) {
    case Kind::Box: want = lower_.size(); break;
    case Kind::Ball: want = center_.size(); break;
    case Kind::Halfspace: want = normal_.size(); break;
    default: return;
  }
  if (x.size() != want)
    throw std::invalid_argument("FeasibleSet: point dimension " + std::to_string(x.size()) +
                                " does not match set dimension " + std::to_string(want));
}

Vec FeasibleSet::project(const Vec& x) const {
  check_dim(x);
  switch (kind_) {
    case Kind::FullSpace:
      return x;
    case Kind::Box:
      return x.cwiseMax(lower_).cwiseMin(upper_);
    case Kind::Ball: {
      Vec d = x - center_;
      double n = d.norm();
      if (n <= radius_) return x;
      return center_ + (radius_ / n) * d;
    }
    case Kind::NonnegOrthant:
      return x.cwiseMax(0.0);
    case Kind::Halfspace: {
      double excess = normal_.dot(x) - offset_;
      if (excess <= 0.0) return x;
      return x - (excess / normal_.squaredNorm()) * normal_;
    }
  }
  throw std::logic_error("FeasibleSet::project: unreachable");
}

bool FeasibleSet::contains(const Vec& x, double tol) const {
  check_dim(x);
  switch (kind_) {
    case Kind::FullSpace:
      return true;
    case Kind::Box:
      return (x.array() >= lower_.array() - tol).all() &&
             (x.array() <= upper_.array() + tol).all();
    case Kind::Ball:
      return (x - center_).norm() <= radius_ + tol;
    case Kind::NonnegOrthant:
      return (x.array() >= -tol).all();
    case Kind::Halfspace:
      return normal_.dot(x) <= offset_ + tol;
  }
  throw std::logic_error("FeasibleSet::contains: unreachable");
}

Vec FeasibleSet::project_tangent(const Vec& z, const Vec& v) const {
  check_dim(z);
  if (z.size() != v.size())
    throw std::invalid_argument("FeasibleSet::project_tangent: dimension mismatch");
  switch (kind_) {
    case Kind::FullSpace:
      return v;
    case Kind::Box: {
      Vec out = v;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        bool at_lo = std::isfinite(lower_[i]) && on_value(z[i], lower_[i]);
        bool at_hi = std::isfinite(upper_[i]) && on_value(z[i], upper_[i]);
        if (at_lo && at_hi)
          out[i] = 0.0;
        else if (at_lo)
          out[i] = std::max(v[i], 0.0);
        else if (at_hi)
          out[i] = std::min(v[i], 0.0);
      }
      return out;
    }
    case Kind::NonnegOrthant: {
      Vec out = v;
      for (Eigen::Index i = 0; i < z.size(); ++i)
        if (on_value(z[i], 0.0)) out[i] = std::max(v[i], 0.0);
      return out;
    }
    case Kind::Ball: {
      Vec d = z - center_;
      if (d.norm() < radius_ * (1.0 - kBoundaryTol)) return v;
      // tangent cone at the sphere is the halfspace {w : <w, d> <= 0}
      double a = v.dot(d);
      if (a <= 0.0) return v;
      return v - (a / d.squaredNorm()) * d;
    }
    case Kind::Halfspace: {
      if (normal_.dot(z) < offset_ - kBoundaryTol * (1.0 + std::abs(offset_))) return v;
      double a = v.dot(normal_);
      if (a <= 0.0) return v;
      return v - (a / normal_.squaredNorm()) * normal_;
    }
  }
  throw std::logic_error("FeasibleSet::project_tangent: unreachable");
}

bool FeasibleSet::normal_cone_contains(const Vec& z, const Vec& c, double tol) const {
  check_dim(z);
  if (z.size() != c.size())
    throw std::invalid_argument("FeasibleSet::normal_cone_contains: dimension mismatch");
  switch (kind_) {
    case Kind::FullSpace:
      return c.norm() <= tol;
    case Kind::Box: {
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        bool at_lo = std::isfinite(lower_[i]) && on_value(z[i], lower_[i]);
        bool at_hi = std::isfinite(upper_[i]) && on_value(z[i], upper_[i]);
        if (at_lo && at_hi) continue;
        if (at_lo && c[i] > tol) return false;
        if (at_hi && c[i] < -tol) return false;
        if (!at_lo && !at_hi && std::abs(c[i]) > tol) return false;
      }
      return true;
    }
    case Kind::NonnegOrthant: {
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (on_value(z[i], 0.0)) {
          if (c[i] > tol) return false;
        } else if (std::abs(c[i]) > tol) {
          return false;
        }
      }
      return true;
    }
    case Kind::Ball: {
      Vec d = z - center_;
      if (d.norm() < radius_ * (1.0 - kBoundaryTol)) return c.norm() <= tol;
      // c must be a nonnegative multiple of the outward direction d
      double lambda = c.dot(d) / d.squaredNorm();
      if (lambda < -tol) return false;
      return (c - lambda * d).norm() <= tol * (1.0 + c.norm());
    }
    case Kind::Halfspace: {
      if (normal_.dot(z) < offset_ - kBoundaryTol * (1.0 + std::abs(offset_)))
        return c.norm() <= tol;
      double lambda = c.dot(normal_) / normal_.squaredNorm();
      if (lambda < -tol) return false;
      return (c - lambda * normal_).norm() <= tol * (1.0 + c.norm());
    }
  }
  throw std::logic_error("FeasibleSet::normal_cone_contains: unreachable");
}

Vec prox(const std::string& name, double lambda, const Vec& v) {
  if (lambda < 0.0) throw std::invalid_argument("prox: lambda must be nonnegative");
  if (name == "l1_norm") {
    Vec out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
      out[i] = std::max(v[i] - lambda, 0.0) - std::max(-v[i] - lambda, 0.0);
    return out;
  }
  if (name == "l2_norm") {
    double n = v.norm();
    if (n <= lambda) return Vec::Zero(v.size());
    return (1.0 - lambda / n) * v;
  }
  if (name == "squared_l2") {
    return v / (1.0 + lambda);
  }
  if (name == "indicator")
    throw std::invalid_argument("prox: \"indicator\" requires a feasible set; use prox_indicator");
  throw std::invalid_argument("prox: unknown function name \"" + name + "\"");
}

Vec prox_indicator(const FeasibleSet& set, const Vec& v) { return set.project(v); }

MaximalMonotoneOperator MaximalMonotoneOperator::zero() {
  return MaximalMonotoneOperator(Kind::Zero);
}

MaximalMonotoneOperator MaximalMonotoneOperator::normal_cone(FeasibleSet set) {
  MaximalMonotoneOperator a(Kind::NormalCone);
  a.set_ = std::move(set);
  return a;
}

MaximalMonotoneOperator MaximalMonotoneOperator::subgradient(const std::string& prox_name) {
  if (prox_name == "indicator")
    throw std::invalid_argument("MaximalMonotoneOperator::subgradient: indicator needs a set");
  prox(prox_name, 1.0, Vec::Zero(1));  // validate the name
  MaximalMonotoneOperator a(Kind::Subgradient);
  a.prox_name_ = prox_name;
  return a;
}

MaximalMonotoneOperator MaximalMonotoneOperator::subgradient(const std::string& prox_name,
                                                             FeasibleSet set) {
  if (prox_name != "indicator")
    throw std::invalid_argument("MaximalMonotoneOperator::subgradient: only indicator takes a set");
  MaximalMonotoneOperator a(Kind::Subgradient);
  a.prox_name_ = prox_name;
  a.set_ = std::move(set);
  return a;
}

MaximalMonotoneOperator MaximalMonotoneOperator::custom(
    std::function<Vec(double, const Vec&)> resolvent) {
  MaximalMonotoneOperator a(Kind::Custom);
  a.custom_ = std::move(resolvent);
  return a;
}

Vec MaximalMonotoneOperator::resolvent(double eta, const Vec& x) const {
  if (eta <= 0.0)
    throw std::invalid_argument("MaximalMonotoneOperator::resolvent: eta must be positive");
  switch (kind_) {
    case Kind::Zero:
      return x;
    case Kind::NormalCone:
      return set_->project(x);  // projection for every eta
    case Kind::Subgradient:
      if (set_) return set_->project(x);
      return prox(prox_name_, eta, x);
    case Kind::Custom:
      return custom_(eta, x);
  }
  throw std::logic_error("MaximalMonotoneOperator::resolvent: unreachable");
}

InclusionProblem make_problem(SingleValuedOperator F, MaximalMonotoneOperator A, Regime regime,
                              int dim, std::optional<Vec> known_solution) {
  if (dim <= 0) throw std::invalid_argument("make_problem: dimension must be positive");
  if (F.lipschitz <= 0.0) throw std::invalid_argument("make_problem: Lipschitz constant must be positive");
  if (regime.kind == Regime::Kind::WeakMVI && regime.rho > 0.0)
    throw std::invalid_argument("make_problem: weak MVI requires rho <= 0");
  InclusionProblem p{std::move(F), std::move(A), std::move(regime), std::move(known_solution), dim};
  if (p.known_solution) {
    if (p.known_solution->size() != dim)
      throw std::invalid_argument("make_problem: known_solution dimension mismatch");
    const Vec& z = *p.known_solution;
    double r = (z - p.A.resolvent(1.0, z - p.F(z))).norm();
    if (!(r <= 1e-9))
      throw std::invalid_argument("make_problem: known_solution fails the natural-residual check (" +
                                  std::to_string(r) + " > 1e-9)");
  }
  return p;
}

InclusionProblem make_antidiagonal_problem(int n) {
  if (n <= 0 || n % 2 != 0)
    throw std::invalid_argument("make_antidiagonal_problem: n must be positive and even, got " +
                                std::to_string(n));
  auto fn = [n](const Vec& z) {
    if (z.size() != n)
      throw std::invalid_argument("antidiagonal operator: expected dimension " + std::to_string(n));
    Vec out(n);
    for (int i = 0; i < n; ++i) {
      int j = n - 1 - i;
      out[i] = (j > i) ? z[j] : -z[j];
    }
    return out;
  };
  return make_problem({fn, 1.0}, MaximalMonotoneOperator::zero(), Regime::monotone(), n,
                      Vec::Zero(n));
}

InclusionProblem make_rotation_problem(double L, double theta) {
  if (L <= 0.0) throw std::invalid_argument("make_rotation_problem: L must be positive");
  const double half_pi = std::acos(0.0);
  if (!(theta >= half_pi && theta < 2.0 * half_pi))
    throw std::invalid_argument("make_rotation_problem: theta must lie in [pi/2, pi), got " +
                                std::to_string(theta));
  const double c = std::cos(theta), s = std::sin(theta);
  auto fn = [L, c, s](const Vec& z) {
    if (z.size() != 2)
      throw std::invalid_argument("rotation operator: expected dimension 2");
    Vec out(2);
    out[0] = L * (c * z[0] - s * z[1]);
    out[1] = L * (s * z[0] + c * z[1]);
    return out;
  };
  return make_problem({fn, L}, MaximalMonotoneOperator::zero(), Regime::comonotone(c / L), 2,
                      Vec::Zero(2));
}

InclusionProblem make_bilinear_box_problem(int n, double bound) {
  if (bound <= 0.0)
    throw std::invalid_argument("make_bilinear_box_problem: bound must be positive");
  InclusionProblem base = make_antidiagonal_problem(n);
  FeasibleSet box = FeasibleSet::box(Vec::Constant(n, -bound), Vec::Constant(n, bound));
  return make_problem(base.F, MaximalMonotoneOperator::normal_cone(std::move(box)),
                      Regime::monotone(), n, Vec::Zero(n));
}

CertifyReport certify_regime(const InclusionProblem& problem, RegimeProperty property,
                             int samples, double radius, std::uint64_t seed, double tolerance) {
  if (samples <= 0) throw std::invalid_argument("certify_regime: samples must be positive");
  if (radius <= 0.0) throw std::invalid_argument("certify_regime: radius must be positive");

  Vec center = Vec::Zero(problem.dim);
  if (problem.known_solution)
    center = *problem.known_solution;
  else if (problem.regime.anchor)
    center = *problem.regime.anchor;

  const Vec* star = nullptr;
  if (property == RegimeProperty::WeakMVI) {
    if (problem.known_solution)
      star = &*problem.known_solution;
    else if (problem.regime.anchor)
      star = &*problem.regime.anchor;
    else
      throw std::invalid_argument(
          "certify_regime: weak MVI needs a known solution or regime anchor");
  }

  const double rho = (problem.regime.kind == Regime::Kind::Monotone) ? 0.0 : problem.regime.rho;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-radius, radius);
  auto draw = [&] {
    Vec x(problem.dim);
    for (int i = 0; i < problem.dim; ++i) x[i] = center[i] + unif(rng);
    return x;
  };
  // graph point of F + A via the resolvent: z = J_A(x) implies x - z in A(z)
  auto graph_point = [&](const Vec& x, Vec& z, Vec& u) {
    z = problem.A.resolvent(1.0, x);
    u = problem.F(z) + (x - z);
  };

  CertifyReport report;
  report.property = property;
  report.samples = samples;
  report.tolerance = tolerance;
  report.worst_margin = std::numeric_limits<double>::infinity();

  Vec z, zp, u, up;
  for (int k = 0; k < samples; ++k) {
    double margin = 0.0;
    if (property == RegimeProperty::Lipschitz) {
      z = draw();
      zp = draw();
      margin = problem.F.lipschitz * (z - zp).norm() - (problem.F(z) - problem.F(zp)).norm();
    } else if (property == RegimeProperty::WeakMVI) {
      graph_point(draw(), z, u);
      zp = *star;
      margin = u.dot(z - *star) - rho * u.squaredNorm();
    } else {
      graph_point(draw(), z, u);
      graph_point(draw(), zp, up);
      margin = (u - up).dot(z - zp);
      if (property == RegimeProperty::Comonotone) margin -= rho * (u - up).squaredNorm();
    }
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      report.witness_z = z;
      report.witness_zp = zp;
    }
  }
  report.pass = report.worst_margin >= -tolerance;
  return report;
}

}  // namespace ipsolve
