#include "doctest.h"

#include <cmath>
#include <vector>

#include "heis/dimension.hpp"
#include "heis/rng.hpp"

using namespace heis;

namespace {

PointCloud x_segment(std::size_t M, Metric tag) {
  PointCloud c(MetricSel{tag, 0}, 3);
  for (std::size_t i = 0; i < M; ++i) c.add(HPoint(static_cast<double>(i) / (M - 1), 0, 0));
  return c;
}

PointCloud t_segment(std::size_t M, Metric tag) {
  PointCloud c(MetricSel{tag, 0}, 3);
  for (std::size_t i = 0; i < M; ++i) c.add(HPoint(0, 0, static_cast<double>(i) / (M - 1)));
  return c;
}

// Covering counts at dyadic radii of a brute-force greedy pass.
std::size_t greedy_oracle(const PointCloud& c, double r) {
  std::vector<std::size_t> centers;
  for (std::size_t i = 0; i < c.size(); ++i) {
    bool far = true;
    for (std::size_t j : centers) far = far && c.distance(i, j) >= r;
    if (far) centers.push_back(i);
  }
  return centers.size();
}

}  // namespace

TEST_CASE("covering counts") {
  PointCloud one(MetricSel{Metric::Heisenberg, 0}, 3);
  one.add(HPoint(0.2, 0.1, 3));
  CHECK(covering_count(one, 1e-6) == 1);
  CHECK(covering_count(one, 10.0) == 1);

  const auto seg = x_segment(1024, Metric::Heisenberg);
  const auto n = covering_count(seg, 1.0 / 64);
  CHECK(n >= 64);
  CHECK(n <= 130);

  for (double r : {0.3, 0.05, 0.011}) {
    CHECK(covering_count(seg, r) == greedy_oracle(seg, r));
    const auto t = t_segment(700, Metric::Heisenberg);
    CHECK(covering_count(t, r) == greedy_oracle(t, r));
  }
}

TEST_CASE("t-axis scaling differs between the metrics") {
  const auto th = t_segment(4000, Metric::Heisenberg);
  const auto te = t_segment(4000, Metric::EuclideanAmbient);
  const double r1 = 0.1, r2 = 0.05;
  const double gh = static_cast<double>(covering_count(th, r2)) / covering_count(th, r1);
  const double ge = static_cast<double>(covering_count(te, r2)) / covering_count(te, r1);
  CHECK(gh == doctest::Approx(4.0).epsilon(0.1));
  CHECK(ge == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("dimension estimates of smooth sets") {
  EstimateOptions o;
  o.r_max = 0.25;
  o.r_min = 4.0 / 4095;
  o.levels = 12;
  for (Metric m : {Metric::Heisenberg, Metric::EuclideanAmbient}) {
    const auto est = estimate_dim(x_segment(4096, m), o);
    CHECK(est.value == doctest::Approx(1.0).epsilon(0.15));
    CHECK_FALSE(est.degenerate);
  }
  EstimateOptions ot = o;
  ot.r_max = 0.5;
  ot.r_min = 4.0 * std::sqrt(1.0 / 4095);
  const auto est = estimate_dim(t_segment(4096, Metric::Heisenberg), ot);
  CHECK(std::abs(est.value - 2.0) <= 0.2);
}

TEST_CASE("degenerate clouds and bad options") {
  PointCloud c(MetricSel{Metric::EuclideanTarget, 2}, 2);
  for (int i = 0; i < 50; ++i) c.add(std::vector<double>{0.0, 0.0});
  EstimateOptions o;
  const auto est = estimate_dim(c, o);
  CHECK(est.degenerate);
  CHECK(est.value == 0.0);
  o.r_min = 1.0;
  CHECK_THROWS_AS(estimate_dim(c, o), DomainError);
  CHECK_THROWS_AS(c.add(std::vector<double>{1.0}), DimensionMismatch);
}

TEST_CASE("riesz energy") {
  PointCloud two(MetricSel{Metric::EuclideanAmbient, 0}, 3);
  two.add(HPoint(0, 0, 0));
  two.add(HPoint(1, 0, 0));
  CHECK(riesz_energy(two, 1.0).value == doctest::Approx(0.5));

  // Riemann sums of the double integral of |x - y|^-1/2 over [0,1]^2 = 8/3.
  double prev_err = 1e9;
  for (std::size_t M : {500, 1000, 2000, 4000}) {
    const double v = riesz_energy(x_segment(M, Metric::EuclideanAmbient), 0.5).value;
    const double err = std::abs(v - 8.0 / 3.0);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err / (8.0 / 3.0) < 0.1);

  // s above the dimension: growth like M^(s-1).
  const double a = riesz_energy(x_segment(1000, Metric::EuclideanAmbient), 1.5).value;
  const double b = riesz_energy(x_segment(4000, Metric::EuclideanAmbient), 1.5).value;
  CHECK(b / a == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("dilated clouds") {
  auto c = x_segment(10, Metric::Heisenberg);
  c.add(HPoint(0, 0, 1));
  const auto d = c.dilated(3.0);
  CHECK(d.distance(0, 10) == doctest::Approx(3.0 * c.distance(0, 10)));
  CHECK_THROWS_AS(x_segment(10, Metric::EuclideanAmbient).dilated(2.0), DomainError);
}

TEST_CASE("neighbor grid finds every close point") {
  NeighborGrid g({0.1, 0.1});
  std::vector<std::vector<double>> pts;
  CounterRng rng(3);
  for (std::uint32_t i = 0; i < 2000; ++i) {
    pts.push_back({rng.uniform(), rng.uniform()});
    g.insert(i, pts.back());
  }
  for (int q = 0; q < 100; ++q) {
    const std::vector<double> p{rng.uniform(), rng.uniform()};
    std::size_t brute = 0, seen = 0;
    for (const auto& x : pts) brute += std::hypot(x[0] - p[0], x[1] - p[1]) < 0.1;
    g.any_near(p, [&](std::uint32_t id) {
      seen += std::hypot(pts[id][0] - p[0], pts[id][1] - p[1]) < 0.1;
      return false;
    });
    CHECK(seen == brute);
  }
}
