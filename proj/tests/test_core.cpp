#include <doctest.h>

#include "ipsolve/core.hpp"

#include <cmath>
#include <random>

using namespace ipsolve;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vec random_vec(std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

TEST_CASE("box projection clamps coordinate-wise") {
  const auto Z = FeasibleSet::box(vec({-1, 0}), vec({2, 1}));
  CHECK(Z.project(vec({3, 0.5})) == vec({2, 0.5}));
  CHECK(Z.project(vec({-5, -2})) == vec({-1, 0}));
  CHECK(Z.project(vec({0.5, 0.5})) == vec({0.5, 0.5}));
  CHECK(Z.contains(vec({2, 1})));
  CHECK_FALSE(Z.contains(vec({2.1, 1})));
}

TEST_CASE("box factory rejects crossed bounds, naming the coordinate") {
  CHECK_THROWS_WITH_AS(FeasibleSet::box(vec({0, 3}), vec({1, 2})),
                       doctest::Contains("coordinate 1"), std::invalid_argument);
}

TEST_CASE("ball projection rescales toward the center") {
  const auto Z = FeasibleSet::ball(vec({1, 0}), 2.0);
  CHECK(Z.project(vec({5, 0})) == vec({3, 0}));
  CHECK(Z.project(vec({1.5, 0.5})) == vec({1.5, 0.5}));
  const Vec p = Z.project(vec({1, 7}));
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(FeasibleSet::ball(vec({0, 0}), 0.0), std::invalid_argument);
}

TEST_CASE("orthant and halfspace projections") {
  const auto N = FeasibleSet::nonneg_orthant();
  CHECK(N.project(vec({-1, 2, -0.5})) == vec({0, 2, 0}));
  const auto H = FeasibleSet::halfspace(vec({1, 1}), 1.0);
  const Vec p = H.project(vec({1, 1}));
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
  CHECK(H.project(vec({0, 0})) == vec({0, 0}));
  CHECK_THROWS_AS(FeasibleSet::halfspace(vec({0, 0}), 1.0), std::invalid_argument);
}

TEST_CASE("projections are idempotent, feasible, and non-expansive") {
  std::mt19937_64 rng(7);
  const std::vector<FeasibleSet> sets = {
      FeasibleSet::box(vec({-1, -2, 0}), vec({1, 0.5, 3})),
      FeasibleSet::ball(vec({0.5, -0.5, 1}), 1.5),
      FeasibleSet::nonneg_orthant(),
      FeasibleSet::halfspace(vec({1, -2, 0.5}), 0.3),
      FeasibleSet::full_space(),
  };
  for (const auto& Z : sets) {
    for (int trial = 0; trial < 10000; ++trial) {
      const Vec x = random_vec(rng, 3, 5.0);
      const Vec y = random_vec(rng, 3, 5.0);
      const Vec px = Z.project(x);
      REQUIRE(Z.contains(px, 1e-9));
      REQUIRE((Z.project(px) - px).norm() <= 1e-12);
      REQUIRE((Z.project(x) - Z.project(y)).norm() <= (x - y).norm() + 1e-12);
    }
  }
}

TEST_CASE("normal cone membership at box faces and corners") {
  const auto Z = FeasibleSet::box(vec({-1, -1}), vec({1, 1}));
  // interior: only the zero vector
  CHECK(Z.normal_cone_contains(vec({0, 0}), vec({0, 0})));
  CHECK_FALSE(Z.normal_cone_contains(vec({0, 0}), vec({0.1, 0})));
  // upper face: outward component only
  CHECK(Z.normal_cone_contains(vec({0.5, 1}), vec({0, 2})));
  CHECK_FALSE(Z.normal_cone_contains(vec({0.5, 1}), vec({0, -0.1})));
  CHECK_FALSE(Z.normal_cone_contains(vec({0.5, 1}), vec({0.1, 2})));
  // corner: any nonnegative combination of the active outward directions
  CHECK(Z.normal_cone_contains(vec({1, 1}), vec({3, 0.2})));
  CHECK_FALSE(Z.normal_cone_contains(vec({1, 1}), vec({3, -0.2})));
}

TEST_CASE("normal cone membership on ball and halfspace boundaries") {
  const auto B = FeasibleSet::ball(vec({0, 0}), 1.0);
  CHECK(B.normal_cone_contains(vec({0, 0.2}), vec({0, 0})));
  CHECK_FALSE(B.normal_cone_contains(vec({0, 0.2}), vec({0, 0.1})));
  CHECK(B.normal_cone_contains(vec({1, 0}), vec({2.5, 0})));
  CHECK_FALSE(B.normal_cone_contains(vec({1, 0}), vec({-0.5, 0})));
  CHECK_FALSE(B.normal_cone_contains(vec({1, 0}), vec({2.5, 0.3})));
  const auto H = FeasibleSet::halfspace(vec({0, 3}), 0.0);
  CHECK(H.normal_cone_contains(vec({5, 0}), vec({0, 7})));
  CHECK_FALSE(H.normal_cone_contains(vec({5, 0}), vec({0.1, 7})));
  CHECK_FALSE(H.normal_cone_contains(vec({5, -1}), vec({0, 7})));
}

TEST_CASE("projection characterization: x - project(x) lies in the normal cone") {
  std::mt19937_64 rng(11);
  const std::vector<FeasibleSet> sets = {
      FeasibleSet::box(vec({-1, -2, 0}), vec({1, 0.5, 3})),
      FeasibleSet::ball(vec({0.5, -0.5, 1}), 1.5),
      FeasibleSet::nonneg_orthant(),
      FeasibleSet::halfspace(vec({1, -2, 0.5}), 0.3),
  };
  for (const auto& Z : sets) {
    for (int trial = 0; trial < 2000; ++trial) {
      const Vec x = random_vec(rng, 3, 5.0);
      const Vec p = Z.project(x);
      REQUIRE(Z.normal_cone_contains(p, x - p, 1e-9));
    }
  }
}

TEST_CASE("tangent projection at box boundaries") {
  const auto Z = FeasibleSet::box(vec({0, 0}), vec({1, 1}));
  // free point: identity
  CHECK(Z.project_tangent(vec({0.5, 0.5}), vec({-3, 4})) == vec({-3, 4}));
  // at the lower face only inward directions survive in that coordinate
  CHECK(Z.project_tangent(vec({0, 0.5}), vec({-3, 4})) == vec({0, 4}));
  CHECK(Z.project_tangent(vec({0, 0.5}), vec({3, 4})) == vec({3, 4}));
  // corner
  CHECK(Z.project_tangent(vec({1, 1}), vec({2, -1})) == vec({0, -1}));
}

TEST_CASE("tangent projection on ball boundary matches the supporting halfspace") {
  const auto Z = FeasibleSet::ball(vec({0, 0}), 1.0);
  CHECK(Z.project_tangent(vec({0, 0.3}), vec({5, -2})) == vec({5, -2}));
  // at (1,0) the tangent cone is {v : v_x <= 0}
  const Vec t = Z.project_tangent(vec({1, 0}), vec({2, 3}));
  CHECK(t[0] == doctest::Approx(0.0));
  CHECK(t[1] == doctest::Approx(3.0));
  CHECK(Z.project_tangent(vec({1, 0}), vec({-2, 3})) == vec({-2, 3}));
}

TEST_CASE("soft thresholding") {
  CHECK(prox("l1_norm", 1.0, vec({3, -0.5})) == vec({2, 0}));
  CHECK(prox("l1_norm", 0.25, vec({-1, 0.1})) == vec({-0.75, 0}));
}

TEST_CASE("l2 norm prox shrinks toward zero and kills small inputs") {
  CHECK(prox("l2_norm", 10.0, vec({3, 4})) == vec({0, 0}));
  const Vec p = prox("l2_norm", 2.5, vec({3, 4}));
  CHECK(p[0] == doctest::Approx(1.5));
  CHECK(p[1] == doctest::Approx(2.0));
}

TEST_CASE("squared l2 prox matches brute-force minimization") {
  // prox_{lambda g}(v) minimizes 0.5 lambda ||z||^2 + 0.5 ||z - v||^2
  const double lambda = 2.0, v = 1.5;
  double best = 1e300, best_z = 0.0;
  for (int i = -4000; i <= 4000; ++i) {
    const double z = i * 1e-3;
    const double obj = 0.5 * lambda * z * z + 0.5 * (z - v) * (z - v);
    if (obj < best) {
      best = obj;
      best_z = z;
    }
  }
  const Vec p = prox("squared_l2", lambda, vec({v}));
  CHECK(p[0] == doctest::Approx(best_z).epsilon(1e-3));
  CHECK(p[0] == doctest::Approx(v / (1.0 + lambda)));
}

TEST_CASE("prox rejects the indicator shorthand and unknown names") {
  CHECK_THROWS_WITH_AS(prox("indicator", 1.0, vec({1})), doctest::Contains("prox_indicator"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(prox("huber", 1.0, vec({1})), doctest::Contains("huber"),
                       std::invalid_argument);
}

TEST_CASE("prox_indicator is the projection") {
  const auto Z = FeasibleSet::box(vec({0, 0}), vec({1, 1}));
  CHECK(prox_indicator(Z, vec({2, -1})) == Z.project(vec({2, -1})));
}

TEST_CASE("resolvents: zero operator, normal cone, subgradient catalog") {
  const Vec x = vec({3, -0.5});
  CHECK(MaximalMonotoneOperator::zero().resolvent(0.7, x) == x);

  const auto Z = FeasibleSet::box(vec({-1, -1}), vec({1, 1}));
  const auto NC = MaximalMonotoneOperator::normal_cone(Z);
  // projection for every stepsize
  CHECK(NC.resolvent(0.1, x) == Z.project(x));
  CHECK(NC.resolvent(10.0, x) == Z.project(x));
  REQUIRE(NC.set() != nullptr);
  CHECK(NC.set()->kind() == FeasibleSet::Kind::Box);

  const auto L1 = MaximalMonotoneOperator::subgradient("l1_norm");
  CHECK(L1.resolvent(1.0, x) == vec({2, 0}));
  CHECK(L1.set() == nullptr);

  const auto Ind = MaximalMonotoneOperator::subgradient("indicator", Z);
  CHECK(Ind.resolvent(0.3, x) == Z.project(x));
  REQUIRE(Ind.set() != nullptr);

  const auto C = MaximalMonotoneOperator::custom(
      [](double eta, const Vec& v) -> Vec { return v / (1.0 + eta); });
  CHECK(C.resolvent(1.0, vec({4})) == vec({2}));
}

TEST_CASE("resolvents are non-expansive and satisfy the graph inclusion") {
  std::mt19937_64 rng(13);
  const auto Z = FeasibleSet::ball(vec({0.5, -0.5, 1}), 1.5);
  const std::vector<MaximalMonotoneOperator> ops = {
      MaximalMonotoneOperator::zero(),
      MaximalMonotoneOperator::normal_cone(Z),
      MaximalMonotoneOperator::subgradient("l1_norm"),
      MaximalMonotoneOperator::subgradient("l2_norm"),
      MaximalMonotoneOperator::subgradient("squared_l2"),
  };
  for (const auto& A : ops) {
    for (double eta : {0.1, 1.0, 3.0}) {
      for (int trial = 0; trial < 1000; ++trial) {
        const Vec x = random_vec(rng, 3, 4.0);
        const Vec y = random_vec(rng, 3, 4.0);
        REQUIRE((A.resolvent(eta, x) - A.resolvent(eta, y)).norm() <=
                (x - y).norm() + 1e-12);
      }
    }
  }
  // z = J_{eta A}(x) puts (x - z)/eta in A(z); check by normal-cone membership
  const auto NC = MaximalMonotoneOperator::normal_cone(Z);
  for (int trial = 0; trial < 2000; ++trial) {
    const Vec x = random_vec(rng, 3, 4.0);
    const double eta = 0.5;
    const Vec z = NC.resolvent(eta, x);
    REQUIRE(Z.normal_cone_contains(z, (x - z) / eta, 1e-9));
  }
}

TEST_CASE("antidiagonal operator") {
  const auto P = make_antidiagonal_problem(4);
  CHECK(P.dim == 4);
  CHECK(P.F.lipschitz == 1.0);
  CHECK(P.F(vec({1, 1, 1, 1})) == vec({1, 1, -1, -1}));
  const auto P2 = make_antidiagonal_problem(2);
  CHECK(P2.F(vec({2, 5})) == vec({5, -2}));
  CHECK_THROWS_WITH_AS(make_antidiagonal_problem(3), doctest::Contains("3"),
                       std::invalid_argument);
  CHECK_THROWS_AS(make_antidiagonal_problem(0), std::invalid_argument);

  // M^2 = -I and ||M z|| = ||z||, so the declared L = 1 is exact
  std::mt19937_64 rng(17);
  const auto P8 = make_antidiagonal_problem(8);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec z = random_vec(rng, 8, 10.0);
    REQUIRE((P8.F(P8.F(z)) + z).norm() <= 1e-12 * z.norm());
    REQUIRE(P8.F(z).norm() == doctest::Approx(z.norm()).epsilon(1e-14));
  }
  REQUIRE(P.known_solution.has_value());
  CHECK(P.known_solution->norm() == 0.0);
}

TEST_CASE("rotation operator declares rho = cos(theta)/L") {
  const double pi = 2.0 * std::acos(0.0);
  const auto P = make_rotation_problem(2.0, 2.0 * pi / 3.0);
  CHECK(P.regime.kind == Regime::Kind::Comonotone);
  CHECK(P.regime.rho == doctest::Approx(-0.25).epsilon(1e-14));
  const auto Q = make_rotation_problem(1.0, pi / 2.0);
  CHECK(Q.regime.rho == doctest::Approx(0.0));
  CHECK_THROWS_AS(make_rotation_problem(1.0, pi / 4.0), std::invalid_argument);
  CHECK_THROWS_AS(make_rotation_problem(1.0, pi), std::invalid_argument);
  CHECK_THROWS_AS(make_rotation_problem(0.0, 2.0), std::invalid_argument);

  // the comonotonicity inequality is an equality for a pure rotation
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec z = random_vec(rng, 2, 5.0);
    const Vec zp = random_vec(rng, 2, 5.0);
    const Vec du = P.F(z) - P.F(zp);
    const double lhs = du.dot(z - zp);
    const double rhs = P.regime.rho * du.squaredNorm();
    REQUIRE(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("bilinear box problem is the antidiagonal operator under a box cone") {
  const auto P = make_bilinear_box_problem(2, 1.0);
  CHECK(P.A.kind() == MaximalMonotoneOperator::Kind::NormalCone);
  REQUIRE(P.A.set() != nullptr);
  CHECK(P.A.set()->lower() == vec({-1, -1}));
  CHECK(P.F(vec({2, 5})) == vec({5, -2}));
  CHECK(P.known_solution->norm() == 0.0);
  CHECK_THROWS_AS(make_bilinear_box_problem(2, 0.0), std::invalid_argument);
}

TEST_CASE("make_problem validates a claimed solution") {
  SingleValuedOperator F{[](const Vec& z) -> Vec { return z; }, 1.0};
  CHECK_THROWS_WITH_AS(make_problem(F, MaximalMonotoneOperator::zero(), Regime::monotone(), 2,
                                    vec({1, 1})),
                       doctest::Contains("residual"), std::invalid_argument);
  const auto P =
      make_problem(F, MaximalMonotoneOperator::zero(), Regime::monotone(), 2, vec({0, 0}));
  CHECK(P.dim == 2);
  CHECK_THROWS_AS(make_problem(F, MaximalMonotoneOperator::zero(), Regime::weak_mvi(0.5), 2),
                  std::invalid_argument);
  SingleValuedOperator bad{[](const Vec& z) -> Vec { return z; }, 0.0};
  CHECK_THROWS_AS(make_problem(bad, MaximalMonotoneOperator::zero(), Regime::monotone(), 2),
                  std::invalid_argument);
}

TEST_CASE("certify_regime confirms declared structure on the stock problems") {
  const auto anti = make_antidiagonal_problem(4);
  const auto r1 = certify_regime(anti, RegimeProperty::Monotone, 2000);
  CHECK(r1.pass);
  CHECK(r1.worst_margin >= -1e-12);
  CHECK(r1.samples == 2000);

  const auto rot = make_rotation_problem(1.0, std::acos(-1.0 / 60.0));
  const auto r2 = certify_regime(rot, RegimeProperty::Comonotone, 2000);
  CHECK(r2.pass);
  // pure rotation attains the comonotone inequality with equality
  CHECK(std::abs(r2.worst_margin) <= 1e-9);

  const auto r3 = certify_regime(anti, RegimeProperty::Lipschitz, 2000);
  CHECK(r3.pass);

  const auto box = make_bilinear_box_problem(4, 1.0);
  CHECK(certify_regime(box, RegimeProperty::Monotone, 2000).pass);
  CHECK(certify_regime(box, RegimeProperty::WeakMVI, 2000).pass);
}

TEST_CASE("certify_regime exposes violations with a checkable witness") {
  // F(z) = -z is not monotone; declare it monotone and let sampling catch it
  SingleValuedOperator F{[](const Vec& z) -> Vec { return -z; }, 1.0};
  const auto P =
      make_problem(F, MaximalMonotoneOperator::zero(), Regime::monotone(), 2, vec({0, 0}));
  const auto r = certify_regime(P, RegimeProperty::Monotone, 500);
  CHECK_FALSE(r.pass);
  CHECK(r.worst_margin < -1e-6);
  // the witness pair reproduces the reported margin
  const Vec du = P.F(r.witness_z) - P.F(r.witness_zp);
  CHECK(du.dot(r.witness_z - r.witness_zp) == doctest::Approx(r.worst_margin));
}

TEST_CASE("certify_regime needs a star point for the weak MVI property") {
  SingleValuedOperator F{[](const Vec& z) -> Vec { return z; }, 1.0};
  InclusionProblem P = make_problem(F, MaximalMonotoneOperator::zero(), Regime::monotone(), 2);
  CHECK_THROWS_AS(certify_regime(P, RegimeProperty::WeakMVI, 100), std::invalid_argument);
  P.known_solution = vec({0, 0});
  CHECK(certify_regime(P, RegimeProperty::WeakMVI, 100).pass);
}
