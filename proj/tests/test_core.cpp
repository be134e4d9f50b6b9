#include "doctest.h"

#include <cmath>
#include <vector>

#include "heis/core.hpp"
#include "heis/rng.hpp"

using namespace heis;

namespace {

HPoint random_point(CounterRng& rng, int n, double s = 2.0) {
  std::vector<double> c(static_cast<std::size_t>(2 * n + 1));
  for (double& v : c) v = rng.uniform(-s, s);
  return HPoint::from_coords(c);
}

bool near(const HPoint& a, const HPoint& b, double tol = 1e-12) { return max_abs_diff(a, b) <= tol; }

}  // namespace

TEST_CASE("symplectic form") {
  const std::vector<double> ex{1, 0}, ey{0, 1};
  CHECK(symplectic(ex, ey) == 1.0);
  CHECK(symplectic(ey, ex) == -1.0);
  const std::vector<double> z{0.3, -1.7, 2.2, 0.9};
  CHECK(symplectic(z, z) == 0.0);
}

TEST_CASE("group law examples") {
  CHECK(multiply(HPoint(1, 0, 0), HPoint(0, 1, 0)) == HPoint(1, 1, 2));
  CHECK(inverse(HPoint(1, 1, 2)) == HPoint(-1, -1, -2));
  CHECK(multiply(HPoint(1, 1, 2), HPoint(-1, -1, -2)).is_identity());
  CHECK(inverse(HPoint::identity(GroupDim(2))).is_identity());
  // (0,1,0)*(1,0,0): w((0,1),(1,0)) = -1.
  CHECK(multiply(HPoint(0, 1, 0), HPoint(1, 0, 0)) == HPoint(1, 1, -2));

  CounterRng rng(7);
  for (int n = 1; n <= 3; ++n) {
    for (int i = 0; i < 200; ++i) {
      const HPoint a = random_point(rng, n);
      CHECK(near(multiply(a, HPoint::identity(GroupDim(n))), a));
      CHECK(near(multiply(a, inverse(a)), HPoint::identity(GroupDim(n))));
      CHECK(near(inverse(inverse(a)), a));
    }
  }
}

TEST_CASE("dimension mismatch and domain errors") {
  const HPoint a(1, 2, 3);
  const std::vector<double> c5{1, 2, 3, 4, 5};
  const HPoint b = HPoint::from_coords(c5);
  CHECK_THROWS_AS(multiply(a, b), DimensionMismatch);
  CHECK_THROWS_AS(heis_dist(a, b), DimensionMismatch);
  CHECK_THROWS_AS(dilate(0.0, a), DomainError);
  CHECK_THROWS_AS(dilate(-1.0, a), DomainError);
  CHECK_THROWS_AS(GroupDim(0), DomainError);
  const std::vector<double> even{1, 2};
  CHECK_THROWS(HPoint::from_coords(even));
}

TEST_CASE("gauge and distances") {
  CHECK(koranyi_norm(HPoint(1, 0, 0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(koranyi_norm(HPoint(0, 0, 1)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(koranyi_norm(HPoint(3, 4, 25)) == doctest::Approx(std::pow(1250.0, 0.25)).epsilon(1e-14));
  CHECK(std::abs(koranyi_norm(HPoint(3, 4, 25)) - 5.9460) < 1e-4);

  const HPoint e(0, 0, 0);
  CHECK(heis_dist(e, HPoint(1, 0, 0)) == doctest::Approx(1.0));
  CHECK(eucl_dist(e, HPoint(0, 0, 1)) == 1.0);
  CHECK(eucl_dist(HPoint(1, 0, 0), HPoint(0, 1, 0)) == doctest::Approx(std::sqrt(2.0)));

  CounterRng rng(11);
  for (int i = 0; i < 500; ++i) {
    const double s = rng.uniform(-3, 3), sp = rng.uniform(-3, 3), tau = rng.uniform(-3, 3);
    const double expect = std::pow(std::pow(sp - s, 4) + tau * tau, 0.25);
    CHECK(heis_dist(HPoint(s, 0, 0), HPoint(sp, 0, tau)) == doctest::Approx(expect).epsilon(1e-13));
    const HPoint a = random_point(rng, 1);
    CHECK(heis_dist(a, a) == 0.0);
    CHECK(eucl_dist(a, a) == 0.0);
  }
}

TEST_CASE("h1 kernels agree with the generic code") {
  CounterRng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const HPoint a = random_point(rng, 1), b = random_point(rng, 1);
    const double d = h1::dist(a.x(0), a.y(0), a.t(), b.x(0), b.y(0), b.t());
    CHECK(d == doctest::Approx(heis_dist(a, b)).epsilon(1e-13));
  }
}

TEST_CASE("dilations") {
  CHECK(dilate(2.0, HPoint(1, 1, 1)) == HPoint(2, 2, 4));
  CounterRng rng(5);
  for (int i = 0; i < 500; ++i) {
    const HPoint a = random_point(rng, 2);
    CHECK(near(dilate(1.0, a), a, 0.0));
    const double r = rng.uniform(0.01, 10.0);
    CHECK(koranyi_norm(dilate(r, a)) / koranyi_norm(a) == doctest::Approx(r).epsilon(1e-12));
    const HPoint b = random_point(rng, 2);
    const HPoint lhs = dilate(r, multiply(a, b));
    const HPoint rhs = multiply(dilate(r, a), dilate(r, b));
    CHECK(max_abs_diff(lhs, rhs) <= 1e-12 * (1.0 + r * r) * 50.0);
  }
}

TEST_CASE("left invariance, symmetry and triangle inequality") {
  CounterRng rng(9);
  for (int i = 0; i < 2000; ++i) {
    const int n = 1 + static_cast<int>(i % 3);
    const HPoint a = random_point(rng, n), b = random_point(rng, n), c = random_point(rng, n);
    const double dab = heis_dist(a, b);
    CHECK(heis_dist(multiply(c, a), multiply(c, b)) == doctest::Approx(dab).epsilon(1e-9));
    CHECK(heis_dist(b, a) == doctest::Approx(dab).epsilon(1e-12));
    CHECK(koranyi_norm(inverse(a)) == doctest::Approx(koranyi_norm(a)).epsilon(1e-12));
    CHECK(dab <= heis_dist(a, c) + heis_dist(c, b) + 1e-12);
  }
}
