#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace ipsolve {

using Vec = Eigen::VectorXd;

// Closed convex sets with exact projections. Box bounds may be infinite
// coordinate-wise; nonneg_orthant and full_space accept any dimension.
class FeasibleSet {
 public:
  enum class Kind { FullSpace, Box, Ball, NonnegOrthant, Halfspace };

  static FeasibleSet full_space();
  static FeasibleSet box(Vec lower, Vec upper);
  static FeasibleSet ball(Vec center, double radius);
  static FeasibleSet nonneg_orthant();
  static FeasibleSet halfspace(Vec normal, double offset);  // {x : <normal,x> <= offset}

  Kind kind() const { return kind_; }
  Vec project(const Vec& x) const;
  bool contains(const Vec& x, double tol = 1e-12) const;

  // Projection of v onto the tangent cone at z; z must lie in the set.
  // Active constraints are detected with a small relative tolerance, which is
  // exact for iterates produced by project() on box-like sets.
  Vec project_tangent(const Vec& z, const Vec& v) const;

  // Exact normal-cone membership test at z.
  bool normal_cone_contains(const Vec& z, const Vec& c, double tol = 1e-9) const;

  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Vec& normal() const { return normal_; }
  double offset() const { return offset_; }

 private:
  explicit FeasibleSet(Kind k) : kind_(k) {}
  void check_dim(const Vec& x) const;

  Kind kind_;
  Vec lower_, upper_;   // box
  Vec center_;          // ball
  double radius_ = 0.0;
  Vec normal_;          // halfspace
  double offset_ = 0.0;
};

// Proximal maps for the scalar-weighted functions in the catalog:
//   l1_norm     g(z) = ||z||_1
//   l2_norm     g(z) = ||z||_2
//   squared_l2  g(z) = 0.5 ||z||_2^2
//   indicator   g(z) = I_Z(z), prox = projection for every lambda
Vec prox(const std::string& name, double lambda, const Vec& v);
Vec prox_indicator(const FeasibleSet& set, const Vec& v);

// Single-valued operator F with a declared Lipschitz constant. The constant
// is trusted by stepsize selection and audits; certify_regime can sample it.
struct SingleValuedOperator {
  std::function<Vec(const Vec&)> fn;
  double lipschitz = 1.0;

  Vec operator()(const Vec& x) const { return fn(x); }
};

// Maximal monotone operator A accessed through its resolvent
// J_{eta A} = (I + eta A)^{-1}, single-valued and total for eta > 0.
class MaximalMonotoneOperator {
 public:
  enum class Kind { Zero, NormalCone, Subgradient, Custom };

  MaximalMonotoneOperator() : kind_(Kind::Zero) {}

  static MaximalMonotoneOperator zero();
  static MaximalMonotoneOperator normal_cone(FeasibleSet set);
  // subgradient of a catalog function; "indicator" requires a set
  static MaximalMonotoneOperator subgradient(const std::string& prox_name);
  static MaximalMonotoneOperator subgradient(const std::string& prox_name, FeasibleSet set);
  static MaximalMonotoneOperator custom(std::function<Vec(double, const Vec&)> resolvent);

  Kind kind() const { return kind_; }
  Vec resolvent(double eta, const Vec& x) const;
  // nullptr unless kind is NormalCone (or Subgradient of an indicator)
  const FeasibleSet* set() const { return set_ ? &*set_ : nullptr; }

 private:
  explicit MaximalMonotoneOperator(Kind k) : kind_(k) {}

  Kind kind_;
  std::optional<FeasibleSet> set_;
  std::string prox_name_;
  std::function<Vec(double, const Vec&)> custom_;
};

// Structural assumption declared for F + A. rho <= 0 throughout; a
// comonotone declaration with rho = 0 coincides with monotone.
struct Regime {
  enum class Kind { Monotone, Comonotone, WeakMVI };

  Kind kind = Kind::Monotone;
  double rho = 0.0;
  std::optional<Vec> anchor;  // star point for WeakMVI when no known solution

  static Regime monotone() { return {}; }
  static Regime comonotone(double rho) { return {Kind::Comonotone, rho, std::nullopt}; }
  static Regime weak_mvi(double rho, std::optional<Vec> anchor = std::nullopt) {
    return {Kind::WeakMVI, rho, std::move(anchor)};
  }
};

// Inclusion problem: find z with 0 in F(z) + A(z).
struct InclusionProblem {
  SingleValuedOperator F;
  MaximalMonotoneOperator A;
  Regime regime;
  std::optional<Vec> known_solution;
  int dim = 0;
};

// Validates dimensions and, when a solution is supplied, checks its natural
// residual ||z - J_A(z - F(z))|| <= 1e-9.
InclusionProblem make_problem(SingleValuedOperator F, MaximalMonotoneOperator A, Regime regime,
                              int dim, std::optional<Vec> known_solution = std::nullopt);

// F(z) = M z with M the antidiagonal +-1 matrix (M^2 = -I, so L = 1);
// unconstrained, monotone, solution at the origin. n must be even.
InclusionProblem make_antidiagonal_problem(int n);

// F(z) = L R(theta) z in the plane for theta in [pi/2, pi); comonotone with
// rho = cos(theta)/L <= 0 and solution at the origin.
InclusionProblem make_rotation_problem(double L, double theta);

// Antidiagonal F constrained to the box [-bound, bound]^n via a normal cone.
InclusionProblem make_bilinear_box_problem(int n, double bound);

enum class RegimeProperty { Monotone, Comonotone, WeakMVI, Lipschitz };

struct CertifyReport {
  RegimeProperty property;
  bool pass = false;
  double worst_margin = 0.0;  // signed; pass iff worst_margin >= -tolerance
  Vec witness_z, witness_zp;  // pair attaining the worst margin
  int samples = 0;
  double tolerance = 0.0;
};

// Samples the defining inequality of the property on graph points of F + A.
// Points are drawn uniformly from the L-infinity ball of the given radius
// (centered at the known solution or anchor when present) and mapped through
// the resolvent, so the sampled pairs (z, u) always lie in the graph.
CertifyReport certify_regime(const InclusionProblem& problem, RegimeProperty property,
                             int samples, double radius = 10.0, std::uint64_t seed = 0,
                             double tolerance = 1e-9);

}  // namespace ipsolve
