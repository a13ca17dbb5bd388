#include <doctest.h>

#include <cmath>

#include "cran/socp.hpp"
#include "support.hpp"

using namespace cran::socp;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing_support::TestRng;

namespace {

VectorXd interior_point(TestRng& rng, int dim) {
  VectorXd v(dim);
  for (int i = 1; i < dim; ++i) v(i) = rng.normal();
  v(0) = (dim > 1 ? v.tail(dim - 1).norm() : 0.0) + rng.uniform(0.05, 2.0);
  return v;
}

// A Jordan-algebra identity: for u interior, u o (u \ v) = v.
VectorXd roundtrip(const VectorXd& u, const VectorXd& v) {
  return jordan_product(u, jordan_divide(u, v));
}

}  // namespace

TEST_CASE("Nesterov-Todd scaling maps z and s to the same point") {
  TestRng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = rng.integer(1, 6);
    const VectorXd s = interior_point(rng, dim);
    const VectorXd z = interior_point(rng, dim);
    const NtScaling w(s, z);
    CHECK((w.apply(z) - w.apply_inverse(s)).norm() <= 1e-10 * (1.0 + s.norm() + z.norm()));
    const VectorXd v = VectorXd::NullaryExpr(dim, [&] { return rng.normal(); });
    CHECK((w.apply(w.apply_inverse(v)) - v).norm() <= 1e-10 * (1.0 + v.norm()));
    // The scaled point lies inside the cone.
    const VectorXd lambda = w.apply(z);
    CHECK(lambda(0) > (dim > 1 ? lambda.tail(dim - 1).norm() : 0.0));
  }
}

TEST_CASE("Jordan division inverts the product") {
  TestRng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = rng.integer(1, 5);
    const VectorXd u = interior_point(rng, dim);
    const VectorXd v = VectorXd::NullaryExpr(dim, [&] { return rng.normal(); });
    CHECK((roundtrip(u, v) - v).norm() <= 1e-10 * (1.0 + v.norm()));
  }
  VectorXd e = VectorXd::Zero(3);
  e(0) = 1.0;
  const VectorXd v = (VectorXd(3) << 2.0, -1.0, 0.5).finished();
  CHECK((jordan_product(e, v) - v).norm() < 1e-15);
}

TEST_CASE("max step reaches the cone boundary") {
  TestRng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = rng.integer(1, 5);
    const VectorXd x = interior_point(rng, dim);
    const VectorXd d = VectorXd::NullaryExpr(dim, [&] { return rng.normal(); });
    const double a = max_step(x, d);
    CHECK(a > 0.0);
    if (!std::isfinite(a)) {
      const VectorXd far = x + 1e6 * d;
      CHECK(far(0) >= (dim > 1 ? far.tail(dim - 1).norm() : 0.0) - 1e-6 * far.norm());
      continue;
    }
    const VectorXd edge = x + a * d;
    const double tail = dim > 1 ? edge.tail(dim - 1).norm() : 0.0;
    CHECK(std::abs(edge(0) - tail) <= 1e-8 * (1.0 + edge.norm()));
  }
  // Pure ray: only a negative direction is bounded.
  CHECK(max_step(VectorXd::Constant(1, 2.0), VectorXd::Constant(1, -4.0)) == doctest::Approx(0.5));
  CHECK(std::isinf(max_step(VectorXd::Constant(1, 2.0), VectorXd::Constant(1, 1.0))));
}

TEST_CASE("linear program") {
  // min -x1 - 2 x2  s.t. x1 <= 1, x2 <= 1, x1 + x2 <= 1.5
  Problem p;
  p.c = (VectorXd(2) << -1, -2).finished();
  p.G = (MatrixXd(3, 2) << 1, 0, 0, 1, 1, 1).finished();
  p.h = (VectorXd(3) << 1, 1, 1.5).finished();
  p.cone_dims = {1, 1, 1};
  const Result r = solve(p);
  REQUIRE(r.status == Status::optimal);
  CHECK(r.x(0) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.primal_obj == doctest::Approx(-2.5).epsilon(1e-8));
}

TEST_CASE("linear objective over a ball has a closed form") {
  // min c'x s.t. ||x - x0|| <= r  ->  c'x0 - r ||c||, x = x0 - r c / ||c||.
  TestRng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng.integer(1, 8);
    const VectorXd c = VectorXd::NullaryExpr(n, [&] { return rng.normal(); });
    const VectorXd x0 = VectorXd::NullaryExpr(n, [&] { return 3.0 * rng.normal(); });
    const double radius = rng.uniform(0.1, 5.0);
    Problem p;
    p.c = c;
    p.G = MatrixXd::Zero(n + 1, n);
    p.G.bottomRows(n) = -MatrixXd::Identity(n, n);
    p.h = VectorXd::Zero(n + 1);
    p.h(0) = radius;
    p.h.tail(n) = -x0;
    p.cone_dims = {n + 1};
    const Result r = solve(p);
    REQUIRE(r.status == Status::optimal);
    const double expect = c.dot(x0) - radius * c.norm();
    CHECK(r.primal_obj == doctest::Approx(expect).epsilon(1e-7));
    CHECK((r.x - (x0 - radius * c / c.norm())).norm() <= 1e-5 * (1.0 + x0.norm()));
  }
}

TEST_CASE("several cones with caller-supplied grams") {
  // min -(x1 + x2) s.t. ||x|| <= 1 and x1 <= 0.3; optimum x = (0.3, sqrt(0.91)).
  Problem p;
  p.c = (VectorXd(2) << -1, -1).finished();
  p.G = (MatrixXd(4, 2) << 0, 0, -1, 0, 0, -1, 1, 0).finished();
  p.h = (VectorXd(4) << 1, 0, 0, 0.3).finished();
  p.cone_dims = {3, 1};
  p.gram = {p.G.topRows(3).transpose() * p.G.topRows(3),
            p.G.bottomRows(1).transpose() * p.G.bottomRows(1)};
  const Result r = solve(p);
  REQUIRE(r.status == Status::optimal);
  CHECK(r.x(0) == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(r.x(1) == doctest::Approx(std::sqrt(0.91)).epsilon(1e-6));
  CHECK(r.gap <= 1e-8);
  CHECK(r.primal_residual <= 1e-9);
  CHECK(r.dual_residual <= 1e-9);
}

TEST_CASE("inconsistent dimensions are rejected") {
  Problem p;
  p.c = VectorXd::Zero(2);
  p.G = MatrixXd::Zero(3, 2);
  p.h = VectorXd::Zero(3);
  p.cone_dims = {2};
  CHECK_THROWS_AS(solve(p), std::invalid_argument);
  p.cone_dims = {3, 0};
  CHECK_THROWS_AS(solve(p), std::invalid_argument);
}
