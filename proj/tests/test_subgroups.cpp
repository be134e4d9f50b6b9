#include "doctest.h"

#include <cmath>
#include <vector>

#include "heis/subgroups.hpp"

using namespace heis;

namespace {

HPoint random_point(CounterRng& rng, int n, double s = 2.0) {
  std::vector<double> c(static_cast<std::size_t>(2 * n + 1));
  for (double& v : c) v = rng.uniform(-s, s);
  return HPoint::from_coords(c);
}

}  // namespace

TEST_CASE("isotropy") {
  CHECK(check_isotropic({{1, 0}}));
  CHECK_FALSE(check_isotropic({{1, 0}, {0, 1}}));
  CHECK(check_isotropic({{1, 0, 0, 0}, {0, 0, 1, 0}}));
  CHECK_THROWS_AS(HorizontalSubgroup(GroupDim(1), {{1, 0}, {0, 1}}), DomainError);
  CHECK_THROWS_AS(HorizontalSubgroup(GroupDim(2), {{1, 1, 0, 0}}), DomainError);
  CHECK_THROWS_AS(HorizontalSubgroup::coordinate(GroupDim(1), 2), DomainError);
}

TEST_CASE("split along the x-axis") {
  const auto V = HorizontalSubgroup::coordinate(GroupDim(1), 1);
  CounterRng rng(1);
  for (int i = 0; i < 500; ++i) {
    const HPoint a = random_point(rng, 1);
    const double x = a.x(0), y = a.y(0), t = a.t();
    const auto sp = split(a, V);
    CHECK(max_abs_diff(sp.vertical.point(), HPoint(0, y, t + 2 * x * y)) <= 1e-12);
    CHECK(max_abs_diff(sp.horizontal, HPoint(x, 0, 0)) <= 1e-15);
    CHECK(max_abs_diff(multiply(sp.vertical.point(), sp.horizontal), a) <= 1e-12);
  }
  const auto in_v = split(HPoint(0.7, 0, 0), V);
  CHECK(in_v.vertical.point().is_identity());
  CHECK(in_v.horizontal == HPoint(0.7, 0, 0));
  const auto in_perp = split(HPoint(0, 0.3, -1), V);
  CHECK(in_perp.vertical.point() == HPoint(0, 0.3, -1));
  CHECK(in_perp.horizontal.is_identity());
}

TEST_CASE("split round trip in higher dimension") {
  CounterRng rng(2);
  for (int n = 2; n <= 3; ++n) {
    for (int m = 1; m <= n; ++m) {
      const auto V = HorizontalSubgroup::coordinate(GroupDim(n), m);
      for (int i = 0; i < 200; ++i) {
        const HPoint a = random_point(rng, n);
        const auto sp = split(a, V);
        CHECK(max_abs_diff(multiply(sp.vertical.point(), sp.horizontal), a) <= 1e-12);
        CHECK(max_abs_diff(proj_horiz(a, V), sp.horizontal) == 0.0);
        const auto c = proj_vert(a, V).coords(V);
        CHECK(static_cast<int>(c.size()) == V.w());
      }
    }
  }
}

TEST_CASE("coset points") {
  const auto V = HorizontalSubgroup::coordinate(GroupDim(1), 1);
  const VerticalPoint e(HPoint(0, 0, 0), V);
  const std::vector<double> one{1.0};
  CHECK(coset_point(e, one, V) == HPoint(1, 0, 0));
  const VerticalPoint a(HPoint(0, 1, 0), V);
  CHECK(coset_point(a, one, V) == HPoint(1, 1, -2));

  CounterRng rng(4);
  for (int n = 1; n <= 2; ++n) {
    const auto W = HorizontalSubgroup::coordinate(GroupDim(n), n);
    for (int i = 0; i < 200; ++i) {
      const VerticalPoint b = proj_vert(random_point(rng, n), W);
      std::vector<double> s(static_cast<std::size_t>(n)), sp(s.size());
      double d2 = 0.0;
      for (std::size_t k = 0; k < s.size(); ++k) {
        s[k] = rng.uniform(-2, 2);
        sp[k] = rng.uniform(-2, 2);
        d2 += (s[k] - sp[k]) * (s[k] - sp[k]);
      }
      CHECK(heis_dist(coset_point(b, s, W), coset_point(b, sp, W)) ==
            doctest::Approx(std::sqrt(d2)).epsilon(1e-10));
    }
  }
}

TEST_CASE("distance to a coset") {
  const auto V = HorizontalSubgroup::coordinate(GroupDim(1), 1);
  const VerticalPoint axis(HPoint(0, 0, 0), V);
  const VerticalPoint a(HPoint(0, 0.4, -0.3), V);
  const std::vector<double> s{0.6};
  CHECK(dist_to_coset(coset_point(a, s, V), a, V) <= 1e-9);
  for (double tau : {0.01, 0.25, 1.0, -2.0}) {
    CHECK(dist_to_coset(HPoint(0, 0, tau), axis, V) == doctest::Approx(std::sqrt(std::abs(tau))).epsilon(1e-6));
  }
  // q = (0, delta, 0): brute-force the 1-D minimum.
  for (double delta : {0.05, 0.5, 2.0}) {
    const HPoint q(0, delta, 0);
    double best = 1e300;
    for (int k = -200000; k <= 200000; ++k) {
      const std::vector<double> ss{k * 1e-5 * 4};
      best = std::min(best, heis_dist(q, coset_point(axis, ss, V)));
    }
    const double got = dist_to_coset(q, axis, V);
    CHECK(got <= best * 1.01);
    CHECK(got >= best * 0.99);
  }
}

TEST_CASE("theta projection") {
  const auto V = HorizontalSubgroup::coordinate(GroupDim(1), 1);
  const ThetaDirection th_t(std::vector<double>{0.0, 1.0});
  const VerticalPoint a(HPoint(0, 0.37, 1.9), V);
  const auto p = theta_project(a, th_t, V);
  REQUIRE(p.size() == 1);
  CHECK(std::abs(p[0]) == doctest::Approx(0.37));

  const auto th = ThetaDirection::normalized({0.3, 0.8});
  const auto on_theta = theta_project(th.theta(), th);
  CHECK(std::abs(on_theta[0]) <= 1e-15);
  const std::vector<double> perp{th.frame()[0][0] * 1.5, th.frame()[0][1] * 1.5};
  const auto back = theta_project(perp, th);
  CHECK(back[0] == doctest::Approx(1.5));
  CHECK_THROWS_AS(ThetaDirection(std::vector<double>{1.0, 1.0}), DomainError);
}

TEST_CASE("tilted slabs") {
  const auto V = HorizontalSubgroup::coordinate(GroupDim(1), 1);
  const ThetaDirection th_t(std::vector<double>{0.0, 1.0});
  const std::vector<double> frame_sign{th_t.frame()[0][0]};
  CounterRng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const HPoint q = random_point(rng, 1);
    const double y0 = rng.uniform(-2, 2), r = rng.uniform(0.01, 1.0);
    const std::vector<double> a_hat{y0 * frame_sign[0]};
    CHECK(slab_contains(q, a_hat, r, V, th_t) == (std::abs(q.y(0) - y0) < r));
    const std::vector<double> v{rng.uniform(-3, 3)};
    const HPoint qv = multiply(q, HPoint(v[0], 0, 0));
    CHECK(slab_contains(qv, a_hat, r, V, th_t) == slab_contains(q, a_hat, r, V, th_t));
  }
  const auto th = ThetaDirection::normalized({0.2, 1.0});
  const HPoint q(0.3, -0.6, 1.1);
  const auto a_hat = theta_project(proj_vert(q, V), th, V);
  for (double r : {1e-6, 0.1, 10.0}) CHECK(slab_contains(q, a_hat, r, V, th));
}

TEST_CASE("compact box") {
  const CompactBox box{GroupDim(2), 1.5};
  CounterRng rng(8);
  for (int i = 0; i < 200; ++i) {
    const HPoint q = box.sample(rng);
    CHECK(box.contains(q));
  }
  CHECK_FALSE(box.contains(HPoint::from_coords(std::vector<double>{0, 0, 0, 0, 2.3})));
  CHECK(box.enlarged().R == 3.0);
}
