#pragma once

#include <span>
#include <vector>

#include "heis/core.hpp"
#include "heis/rng.hpp"

namespace heis {

using Vec = std::vector<double>;

/// True iff every pairwise symplectic product of the basis vanishes within tol.
bool check_isotropic(const std::vector<Vec>& basis, double tol = 1e-12);

/// V x {0} for an isotropic subspace V of R^2n given by an orthonormal basis.
///
/// Also carries an orthonormal basis of the Euclidean complement of V, so that
/// the vertical complement V^perp x R has fixed coordinates
/// (<z, e_1>, ..., <z, e_{2n-m}>, t) of length w = 2n + 1 - m.
class HorizontalSubgroup {
 public:
  /// Throws DomainError if the basis is not orthonormal or not isotropic.
  HorizontalSubgroup(GroupDim dim, std::vector<Vec> basis);

  /// span{x_1, ..., x_m}.
  static HorizontalSubgroup coordinate(GroupDim dim, int m);

  GroupDim dim() const { return dim_; }
  int m() const { return static_cast<int>(basis_.size()); }
  int w() const { return dim_.topological() - m(); }

  const std::vector<Vec>& basis() const { return basis_; }
  const std::vector<Vec>& complement_basis() const { return complement_; }

  /// Coefficients <z, v_i> of the orthogonal projection onto V.
  Vec coefficients(std::span<const double> z) const;
  /// P_V z as a vector of R^2n.
  Vec project(std::span<const double> z) const;
  /// sum_i s_i v_i.
  Vec combine(std::span<const double> s) const;

 private:
  GroupDim dim_;
  std::vector<Vec> basis_;
  std::vector<Vec> complement_;
};

/// A point of the vertical complement V^perp x R.
class VerticalPoint {
 public:
  /// Throws DomainError unless z is orthogonal to V (to 1e-12, scaled).
  VerticalPoint(HPoint base, const HorizontalSubgroup& V);

  /// From coordinates in the complement frame (length w).
  static VerticalPoint from_coords(std::span<const double> c, const HorizontalSubgroup& V);

  const HPoint& point() const { return base_; }
  /// Coordinates in the complement frame (length w).
  Vec coords(const HorizontalSubgroup& V) const;

 private:
  HPoint base_;
};

struct SplitResult {
  VerticalPoint vertical;  // a_{V^perp}
  HPoint horizontal;       // a_V
};

/// a = a_{V^perp} * a_V.
///
/// With z = z_V + z_perp the horizontal factor is (z_V, 0). Expanding
/// (z_perp, s) * (z_V, 0) = (z, s + 2 w(z_perp, z_V)) and matching t gives
/// s = t - 2 w(z_perp, z_V).
SplitResult split(const HPoint& a, const HorizontalSubgroup& V);
VerticalPoint proj_vert(const HPoint& a, const HorizontalSubgroup& V);
HPoint proj_horiz(const HPoint& a, const HorizontalSubgroup& V);

/// a(s) = a * (sum_i s_i v_i, 0).
HPoint coset_point(const VerticalPoint& a, std::span<const double> s, const HorizontalSubgroup& V);

/// inf_s d(q, a(s)) by a 64^m grid over the bracket that must contain the
/// minimiser, refined by golden section (m = 1) or coordinate descent.
double dist_to_coset(const HPoint& q, const VerticalPoint& a, const HorizontalSubgroup& V);

/// A unit direction theta in V^perp (complement-frame coordinates) together
/// with an orthonormal frame of its orthogonal complement Theta^perp.
class ThetaDirection {
 public:
  /// Throws DomainError unless |theta| = 1 within 1e-12.
  explicit ThetaDirection(Vec theta);
  static ThetaDirection normalized(Vec v);

  const Vec& theta() const { return theta_; }
  int w() const { return static_cast<int>(theta_.size()); }
  /// w - 1 orthonormal vectors spanning Theta^perp.
  const std::vector<Vec>& frame() const { return frame_; }

 private:
  Vec theta_;
  std::vector<Vec> frame_;
};

/// Euclidean projection of a complement-frame vector onto Theta^perp, in the
/// frame of `theta`.
Vec theta_project(std::span<const double> vcoords, const ThetaDirection& theta);
Vec theta_project(const VerticalPoint& a, const ThetaDirection& theta, const HorizontalSubgroup& V);

/// Membership in the tilted slab over the Theta^perp-ball B(a_hat, r).
bool slab_contains(const HPoint& q, std::span<const double> a_hat, double r,
                   const HorizontalSubgroup& V, const ThetaDirection& theta);

/// Coordinate box [-R, R]^2n x [-R^2, R^2].
struct CompactBox {
  GroupDim dim;
  double R = 1.0;

  bool contains(const HPoint& q) const;
  HPoint sample(CounterRng& rng) const;
  /// K' = the box with 2R.
  CompactBox enlarged() const { return {dim, 2.0 * R}; }
};

}  // namespace heis
