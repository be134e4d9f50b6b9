#include "heis/core.hpp"

#include <algorithm>
#include <string>

namespace heis {

namespace {

void require_finite(std::span<const double> v) {
  for (double c : v) {
    if (!std::isfinite(c)) throw DomainError("HPoint: non-finite coordinate");
  }
}

}  // namespace

HPoint::HPoint(GroupDim dim) : coords_(static_cast<std::size_t>(dim.topological()), 0.0) {}

HPoint::HPoint(std::span<const double> z, double t) {
  if (z.empty() || z.size() % 2 != 0) {
    throw DimensionMismatch("HPoint: horizontal part must have even positive length, got " +
                            std::to_string(z.size()));
  }
  coords_.assign(z.begin(), z.end());
  coords_.push_back(t);
  require_finite(coords_);
}

HPoint::HPoint(double x, double y, double t) : coords_{x, y, t} { require_finite(coords_); }

HPoint HPoint::from_coords(std::span<const double> coords) {
  if (coords.size() < 3 || coords.size() % 2 == 0) {
    throw DimensionMismatch("HPoint: coordinate vector must have length 2n+1");
  }
  return HPoint(coords.first(coords.size() - 1), coords.back());
}

bool HPoint::is_identity() const {
  return std::all_of(coords_.begin(), coords_.end(), [](double c) { return c == 0.0; });
}

void require_same_dim(const HPoint& a, const HPoint& b) {
  if (a.n() != b.n()) {
    throw DimensionMismatch("points of H^" + std::to_string(a.n()) + " and H^" +
                            std::to_string(b.n()));
  }
}

double symplectic(std::span<const double> z, std::span<const double> zp) {
  if (z.size() != zp.size() || z.size() % 2 != 0) {
    throw DimensionMismatch("symplectic: operands must be equal even-length vectors");
  }
  double w = 0.0;
  for (std::size_t i = 0; i < z.size(); i += 2) {
    w += z[i] * zp[i + 1] - zp[i] * z[i + 1];
  }
  return w;
}

HPoint multiply(const HPoint& a, const HPoint& b) {
  require_same_dim(a, b);
  const auto za = a.z();
  const auto zb = b.z();
  std::vector<double> z(za.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = za[i] + zb[i];
  return HPoint(z, a.t() + b.t() + 2.0 * symplectic(za, zb));
}

HPoint inverse(const HPoint& a) {
  std::vector<double> z(a.z().begin(), a.z().end());
  for (double& c : z) c = -c;
  return HPoint(z, -a.t());
}

double koranyi_norm(const HPoint& a) {
  double r2 = 0.0;
  for (double c : a.z()) r2 += c * c;
  return std::sqrt(std::sqrt(r2 * r2 + a.t() * a.t()));
}

double heis_dist(const HPoint& a, const HPoint& b) {
  require_same_dim(a, b);
  // |a^-1 * b| without materialising the product.
  const auto za = a.z();
  const auto zb = b.z();
  double r2 = 0.0;
  for (std::size_t i = 0; i < za.size(); ++i) {
    const double d = zb[i] - za[i];
    r2 += d * d;
  }
  const double dt = b.t() - a.t() - 2.0 * symplectic(za, zb);
  return std::sqrt(std::sqrt(r2 * r2 + dt * dt));
}

double eucl_dist(const HPoint& a, const HPoint& b) {
  require_same_dim(a, b);
  const auto ca = a.coords();
  const auto cb = b.coords();
  double s = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const double d = cb[i] - ca[i];
    s += d * d;
  }
  return std::sqrt(s);
}

HPoint dilate(double r, const HPoint& a) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("dilate: factor must be positive");
  std::vector<double> z(a.z().begin(), a.z().end());
  for (double& c : z) c *= r;
  return HPoint(z, r * r * a.t());
}

double max_abs_diff(const HPoint& a, const HPoint& b) {
  require_same_dim(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.coords().size(); ++i) {
    m = std::max(m, std::abs(a.coords()[i] - b.coords()[i]));
  }
  return m;
}

}  // namespace heis
