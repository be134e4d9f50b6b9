#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heis {

/// Raised when an argument lies outside the domain of a formula or operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when operands live in Heisenberg groups of different dimension.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ambient dimension parameter n of H^n (topological dimension 2n+1).
struct GroupDim {
  int n = 1;

  explicit GroupDim(int n_) : n(n_) {
    if (n < 1) throw DomainError("GroupDim: n must be >= 1");
  }
  int horizontal() const { return 2 * n; }
  int topological() const { return 2 * n + 1; }
  int homogeneous() const { return 2 * n + 2; }
  bool operator==(const GroupDim&) const = default;
};

/// A point (z, t) of H^n, stored interleaved as (x1, y1, ..., xn, yn, t).
class HPoint {
 public:
  /// Identity of H^n.
  explicit HPoint(GroupDim dim);
  /// From horizontal part z (length 2n) and vertical coordinate t.
  HPoint(std::span<const double> z, double t);
  /// Convenience constructor for H^1.
  HPoint(double x, double y, double t);

  static HPoint from_coords(std::span<const double> coords);
  static HPoint identity(GroupDim dim) { return HPoint(dim); }

  GroupDim dim() const { return GroupDim(static_cast<int>(coords_.size() / 2)); }
  int n() const { return static_cast<int>(coords_.size() / 2); }

  std::span<const double> z() const { return {coords_.data(), coords_.size() - 1}; }
  double t() const { return coords_.back(); }
  std::span<const double> coords() const { return coords_; }

  double x(int i) const { return coords_[2 * i]; }
  double y(int i) const { return coords_[2 * i + 1]; }

  bool is_identity() const;
  bool operator==(const HPoint&) const = default;

 private:
  std::vector<double> coords_;
};

void require_same_dim(const HPoint& a, const HPoint& b);

/// Standard symplectic form sum_i (x_i y'_i - x'_i y_i).
double symplectic(std::span<const double> z, std::span<const double> zp);

HPoint multiply(const HPoint& a, const HPoint& b);
HPoint inverse(const HPoint& a);

/// Koranyi gauge (|z|^4 + t^2)^(1/4).
double koranyi_norm(const HPoint& a);

/// Left-invariant Koranyi distance |a^-1 * b|.
double heis_dist(const HPoint& a, const HPoint& b);

/// Euclidean distance of the underlying R^(2n+1) coordinates.
double eucl_dist(const HPoint& a, const HPoint& b);

/// Intrinsic dilation (rz, r^2 t). Throws DomainError unless r > 0.
HPoint dilate(double r, const HPoint& a);

/// Max-abs coordinate difference; handy for tolerance checks.
double max_abs_diff(const HPoint& a, const HPoint& b);

// Allocation-free H^1 kernels used by the construction hot loops.
namespace h1 {

inline double gauge(double x, double y, double t) {
  const double r2 = x * x + y * y;
  return std::sqrt(std::sqrt(r2 * r2 + t * t));
}

/// d((x1,y1,t1), (x2,y2,t2)) in H^1.
inline double dist(double x1, double y1, double t1, double x2, double y2, double t2) {
  // a^-1 * b = (dz, dt - 2 w(z_a, z_b))
  const double dt = t2 - t1 - 2.0 * (x1 * y2 - x2 * y1);
  return gauge(x2 - x1, y2 - y1, dt);
}

}  // namespace h1

}  // namespace heis
