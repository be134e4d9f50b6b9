#include "heis/subgroups.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

namespace heis {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

// Gram-Schmidt of the standard basis of R^dim against `seed`, twice for
// stability, keeping vectors whose residual exceeds `min_residual`. Standard
// vectors listed in `skip` are not considered.
std::vector<Vec> complete_basis(const std::vector<Vec>& seed, std::size_t dim, std::size_t want,
                                std::size_t skip = std::numeric_limits<std::size_t>::max()) {
  std::vector<Vec> all = seed;
  std::vector<Vec> out;
  for (std::size_t j = 0; j < dim && out.size() < want; ++j) {
    if (j == skip) continue;
    Vec u(dim, 0.0);
    u[j] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : all) axpy(-dot(u, b), b, u);
    }
    const double len = norm(u);
    if (len < 1e-6) continue;
    for (double& c : u) c /= len;
    all.push_back(u);
    out.push_back(std::move(u));
  }
  return out;
}

// Golden-section minimisation of f on [lo, hi]; returns the arg-min.
double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo);
  double d = lo + g * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int k = 0; k < iters; ++k) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

}  // namespace

bool check_isotropic(const std::vector<Vec>& basis, double tol) {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      if (std::abs(symplectic(basis[i], basis[j])) > tol) return false;
    }
  }
  return true;
}

HorizontalSubgroup::HorizontalSubgroup(GroupDim dim, std::vector<Vec> basis)
    : dim_(dim), basis_(std::move(basis)) {
  const auto two_n = static_cast<std::size_t>(dim_.horizontal());
  if (basis_.empty() || static_cast<int>(basis_.size()) > dim_.n) {
    throw DomainError("HorizontalSubgroup: need 1 <= m <= n basis vectors");
  }
  for (const auto& v : basis_) {
    if (v.size() != two_n) throw DimensionMismatch("HorizontalSubgroup: basis vector length != 2n");
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    for (std::size_t j = i; j < basis_.size(); ++j) {
      const double expect = i == j ? 1.0 : 0.0;
      if (std::abs(dot(basis_[i], basis_[j]) - expect) > 1e-12) {
        throw DomainError("HorizontalSubgroup: basis is not orthonormal");
      }
    }
  }
  if (!check_isotropic(basis_)) throw DomainError("HorizontalSubgroup: subspace is not isotropic");
  complement_ = complete_basis(basis_, two_n, two_n - basis_.size());
}

HorizontalSubgroup HorizontalSubgroup::coordinate(GroupDim dim, int m) {
  if (m < 1 || m > dim.n) throw DomainError("HorizontalSubgroup::coordinate: need 1 <= m <= n");
  std::vector<Vec> basis;
  for (int i = 0; i < m; ++i) {
    Vec v(static_cast<std::size_t>(dim.horizontal()), 0.0);
    v[2 * i] = 1.0;
    basis.push_back(std::move(v));
  }
  return HorizontalSubgroup(dim, std::move(basis));
}

Vec HorizontalSubgroup::coefficients(std::span<const double> z) const {
  Vec c;
  c.reserve(basis_.size());
  for (const auto& v : basis_) c.push_back(dot(z, v));
  return c;
}

Vec HorizontalSubgroup::project(std::span<const double> z) const {
  return combine(coefficients(z));
}

Vec HorizontalSubgroup::combine(std::span<const double> s) const {
  if (s.size() != basis_.size()) throw DimensionMismatch("combine: expected m coefficients");
  Vec out(static_cast<std::size_t>(dim_.horizontal()), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) axpy(s[i], basis_[i], out);
  return out;
}

VerticalPoint::VerticalPoint(HPoint base, const HorizontalSubgroup& V) : base_(std::move(base)) {
  if (base_.n() != V.dim().n) throw DimensionMismatch("VerticalPoint: group dimension mismatch");
  const double scale = std::max(1.0, norm(base_.z()));
  for (double c : V.coefficients(base_.z())) {
    if (std::abs(c) > 1e-12 * scale) throw DomainError("VerticalPoint: z is not orthogonal to V");
  }
}

VerticalPoint VerticalPoint::from_coords(std::span<const double> c, const HorizontalSubgroup& V) {
  if (static_cast<int>(c.size()) != V.w()) throw DimensionMismatch("VerticalPoint: expected w coords");
  Vec z(static_cast<std::size_t>(V.dim().horizontal()), 0.0);
  const auto& comp = V.complement_basis();
  for (std::size_t i = 0; i < comp.size(); ++i) axpy(c[i], comp[i], z);
  return VerticalPoint(HPoint(z, c.back()), V);
}

Vec VerticalPoint::coords(const HorizontalSubgroup& V) const {
  Vec c;
  c.reserve(static_cast<std::size_t>(V.w()));
  for (const auto& e : V.complement_basis()) c.push_back(dot(base_.z(), e));
  c.push_back(base_.t());
  return c;
}

SplitResult split(const HPoint& a, const HorizontalSubgroup& V) {
  if (a.n() != V.dim().n) throw DimensionMismatch("split: group dimension mismatch");
  const auto z = a.z();
  const Vec zv = V.project(z);
  Vec zp(z.begin(), z.end());
  for (std::size_t i = 0; i < zp.size(); ++i) zp[i] -= zv[i];
  const double s = a.t() - 2.0 * symplectic(zp, zv);
  return {VerticalPoint(HPoint(zp, s), V), HPoint(zv, 0.0)};
}

VerticalPoint proj_vert(const HPoint& a, const HorizontalSubgroup& V) { return split(a, V).vertical; }

HPoint proj_horiz(const HPoint& a, const HorizontalSubgroup& V) { return split(a, V).horizontal; }

HPoint coset_point(const VerticalPoint& a, std::span<const double> s, const HorizontalSubgroup& V) {
  return multiply(a.point(), HPoint(V.combine(s), 0.0));
}

double dist_to_coset(const HPoint& q, const VerticalPoint& a, const HorizontalSubgroup& V) {
  const auto m = static_cast<std::size_t>(V.m());
  auto objective = [&](std::span<const double> s) { return heis_dist(q, coset_point(a, s, V)); };

  // |s - s0| <= d(q, a(s)) with s0 the V-coefficients of q_z - a_z, so the
  // minimiser lies in the cube of half-width d(q, a(s0)) around s0.
  Vec diff(q.z().begin(), q.z().end());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= a.point().z()[i];
  const Vec s0 = V.coefficients(diff);
  const double d0 = objective(s0);
  if (d0 == 0.0) return 0.0;

  constexpr int kGrid = 64;
  const double step = 2.0 * d0 / (kGrid - 1);
  Vec best = s0;
  double best_val = d0;
  Vec s(m);
  std::vector<int> idx(m, 0);
  while (true) {
    for (std::size_t i = 0; i < m; ++i) s[i] = s0[i] - d0 + step * idx[i];
    const double v = objective(s);
    if (v < best_val) {
      best_val = v;
      best = s;
    }
    std::size_t k = 0;
    while (k < m && ++idx[k] == kGrid) idx[k++] = 0;
    if (k == m) break;
  }

  if (m == 1) {
    auto f = [&](double x) {
      const double arg[1] = {x};
      return objective(arg);
    };
    const double x = golden_min(f, best[0] - step, best[0] + step, 20);
    return std::min(best_val, f(x));
  }

  double h = step;
  for (int sweep = 0; sweep < 20; ++sweep) {
    for (std::size_t i = 0; i < m; ++i) {
      Vec trial = best;
      auto f = [&](double x) {
        trial[i] = x;
        return objective(trial);
      };
      const double x = golden_min(f, best[i] - h, best[i] + h, 20);
      const double v = f(x);
      if (v < best_val) {
        best_val = v;
        best[i] = x;
      }
    }
    h *= 0.7;
  }
  return best_val;
}

ThetaDirection::ThetaDirection(Vec theta) : theta_(std::move(theta)) {
  if (theta_.empty()) throw DimensionMismatch("ThetaDirection: empty vector");
  if (std::abs(norm(theta_) - 1.0) > 1e-12) throw DomainError("ThetaDirection: not a unit vector");
  std::size_t drop = 0;
  for (std::size_t i = 1; i < theta_.size(); ++i) {
    if (std::abs(theta_[i]) > std::abs(theta_[drop])) drop = i;
  }
  frame_ = complete_basis({theta_}, theta_.size(), theta_.size() - 1, drop);
}

ThetaDirection ThetaDirection::normalized(Vec v) {
  const double len = norm(v);
  if (!(len > 0.0)) throw DomainError("ThetaDirection: zero vector");
  for (double& c : v) c /= len;
  // Second pass absorbs rounding from the first division.
  const double len2 = norm(v);
  for (double& c : v) c /= len2;
  return ThetaDirection(std::move(v));
}

Vec theta_project(std::span<const double> vcoords, const ThetaDirection& theta) {
  if (static_cast<int>(vcoords.size()) != theta.w()) {
    throw DimensionMismatch("theta_project: coordinate length != w");
  }
  Vec p(vcoords.begin(), vcoords.end());
  axpy(-dot(p, theta.theta()), theta.theta(), p);
  Vec out;
  out.reserve(theta.frame().size());
  for (const auto& f : theta.frame()) out.push_back(dot(p, f));
  return out;
}

Vec theta_project(const VerticalPoint& a, const ThetaDirection& theta, const HorizontalSubgroup& V) {
  return theta_project(a.coords(V), theta);
}

bool slab_contains(const HPoint& q, std::span<const double> a_hat, double r,
                   const HorizontalSubgroup& V, const ThetaDirection& theta) {
  if (!(r > 0.0)) throw DomainError("slab_contains: radius must be positive");
  const Vec p = theta_project(proj_vert(q, V), theta, V);
  if (p.size() != a_hat.size()) throw DimensionMismatch("slab_contains: a_hat length != w - 1");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - a_hat[i]) * (p[i] - a_hat[i]);
  return std::sqrt(s) < r;
}

bool CompactBox::contains(const HPoint& q) const {
  for (double c : q.z()) {
    if (std::abs(c) > R) return false;
  }
  return std::abs(q.t()) <= R * R;
}

HPoint CompactBox::sample(CounterRng& rng) const {
  Vec z(static_cast<std::size_t>(dim.horizontal()));
  for (double& c : z) c = rng.uniform(-R, R);
  return HPoint(z, rng.uniform(-R * R, R * R));
}

}  // namespace heis
