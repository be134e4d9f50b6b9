#pragma once

#include <array>
#include <cstdint>
#include <cmath>
#include <functional>
#include <memory>
#include <tuple>
#include <span>
#include <unordered_map>
#include <vector>

#include "heis/core.hpp"
#include "heis/dimension.hpp"
#include "heis/rng.hpp"

namespace heis::construction {

struct IFSParams {
  double p = 6.0;
  double alpha = 1.2;
  double beta_c = 1.0;  // 2 - p(1 - 1/alpha)
  double sigma = 0.25;  // 4 sigma^beta_c = 1
  int target_N = 2;
  int depth = 1;
};

/// Throws DomainError unless p > 4, 1 < alpha < p/(p-2), depth >= 1, N >= 1.
IFSParams make_params(double p, double alpha, int depth, int target_N = 2);

/// Sequence over {1, 2, 3, 4}; the empty word is allowed.
using Word = std::vector<std::uint8_t>;

void validate_word(const Word& w);
/// Base-4 code with the first letter most significant (letters mapped to 0..3).
std::uint64_t word_code(const Word& w);
Word word_from_code(std::uint64_t code, int length);

/// Axis-aligned square f_w(I) in the (y, t) plane of W = {x = 0}.
struct Cell {
  double y = 0.0;  // lower-left corner
  double t = 0.0;
  double size = 1.0;

  double center_y() const { return y + 0.5 * size; }
  double center_t() const { return t + 0.5 * size; }
  bool contains(double yy, double tt) const {
    return yy >= y && yy <= y + size && tt >= t && tt <= t + size;
  }
};

/// f_w = f_{w1} o ... o f_{wm} applied to the unit square.
Cell cell(const Word& w, const IFSParams& params);

/// One or more deterministic points per depth-`params.depth` cell, lifted to
/// (0, y, t) in H^1 and measured with the Euclidean metric.
PointCloud four_corner_cloud(const IFSParams& params, int samples_per_cell = 1);

/// phi(x, y, t) = (x, y, t + 2xy); the vertical projection onto the x-axis
/// complement equals P_W o phi.
std::array<double, 3> phi(double x, double y, double t);
std::array<double, 3> phi_inverse(double x, double y, double t);

/// x in [0, 1] and (y, t + 2xy) in cell(w).
bool column_contains(const HPoint& q, const Word& w, const IFSParams& params);

/// A net point with its candidate-lattice indices.
struct NetPoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;  // group coordinates
  std::uint32_t jx = 0;
  std::uint32_t ly = 0;
  std::uint32_t kt = 0;

  HPoint point() const { return HPoint(x, y, t); }
  bool operator<(const NetPoint& o) const {
    return std::tie(jx, ly, kt) < std::tie(o.jx, o.ly, o.kt);
  }
};

/// Greedy sigma^m-separated net of one column, built block by block.
///
/// Candidates sit on the lattice x = j h, y = y0 + l h, t' = t0 + 4 k h^2
/// with h = r/4, r = sigma^m (column coordinates t' = t + 2xy) and are mapped
/// through phi^-1. In these units
///   d^4 / h^4 = (dj^2 + dl^2)^2 + (4 dk - 2 (j + j') dl)^2,
/// so the test d < r is the integer comparison "< 256": exact, and identical
/// for every column of a level. Columns of one level therefore carry the same
/// net up to the translation (y0, t0).
///
/// The lattice is cut into x-blocks of width r and, inside each, into slabs of
/// height 3 r^2 in the sheared coordinate u = t' - 4 x_c (y - y0), x_c the
/// block centre. Two blocks of the same colour (x-block parity, slab parity)
/// never hold points closer than r, so the greedy pass that visits colours
/// 0..3 in turn, blocks of one colour in any order, and each block in lattice
/// order is a single well-defined greedy pass over all candidates. Its result
/// is a maximal r-separated subset of the candidates, and any block can be
/// produced from a bounded neighbourhood.
class ColumnNet {
 public:
  ColumnNet(const Word& w, const IFSParams& params);

  int level() const { return level_; }
  double radius() const { return r_; }
  const Cell& cell() const { return cell_; }

  /// Every net point of the column, sorted in lattice order.
  std::vector<NetPoint> all_points();

  /// Calls fn(point) for net points that may lie within distance 2r of q
  /// (a superset; callers test the distance).
  template <typename Fn>
  void for_each_near(double qx, double qy, double qt, Fn&& fn);

  /// Candidate lattice points in lattice order (test support).
  std::vector<NetPoint> candidates() const;

  /// Coordinates of lattice point (j, l, k) over `cell` at radius r.
  static NetPoint lattice_point(const Cell& cell, double r, std::int64_t j, std::int64_t l,
                                std::int64_t k);
  /// d < r between lattice points, evaluated exactly in lattice units.
  static bool lattice_close(const NetPoint& a, const NetPoint& b);

  std::size_t blocks_computed() const { return memo_.size(); }

 private:
  struct BlockRange {
    std::int64_t lo;
    std::int64_t hi;
  };

  static std::uint64_t block_key(std::int64_t i, std::int64_t kb);
  int phase(std::int64_t i, std::int64_t kb) const;
  BlockRange slab_range(std::int64_t i) const;
  NetPoint candidate(std::int64_t j, std::int64_t l, std::int64_t k) const;
  const std::vector<NetPoint>& block(std::int64_t i, std::int64_t kb);

  int level_;
  double r_;
  Cell cell_;
  std::int64_t jmax_;    // x-lattice indices 0..jmax
  std::int64_t kmax_;    // t'-lattice indices 0..kmax
  std::int64_t blocks_;  // x-blocks 0..blocks_-1
  std::unordered_map<std::uint64_t, std::vector<NetPoint>> memo_;
};

/// Calls fn(i, j, d) for every pair a[i], b[j] with Heisenberg distance
/// d < D, both lists in lattice order of columns of the same level. With
/// `same` set (a and b the same list) each unordered pair is reported once.
/// Each point is compared with every lattice line of b that can hold a point
/// within distance D, so no pair is missed.
void for_each_pair_within(const std::vector<NetPoint>& a, const std::vector<NetPoint>& b, double D,
                          bool same, const std::function<void(std::size_t, std::size_t, double)>& fn);

/// Pairs of one column's net closer than r (1 - rel_tol) in floating point.
/// Lattice points exactly r apart are common, so a relative slack of order
/// 1e-12 separates genuine violations from rounding.
std::size_t count_close_pairs(const std::vector<NetPoint>& points, double r, double rel_tol = 1e-12);

/// Net of the column over cell(w), in lattice order.
std::vector<HPoint> build_net(const Word& w, const IFSParams& params);

struct BumpBall {
  HPoint center;
  double radius = 0.0;
  int level = 0;
  std::vector<double> xi;
};

/// clamp(2 - d(q, c)/radius, 0, 1).
double bump(const BumpBall& B, const HPoint& q);
double bump(double dist, double radius);

/// Uniform draw from the closed unit ball of R^N by rejection from the cube.
std::vector<double> draw_unit_ball(CounterRng& rng, int N);

/// Stream key of the ball at lattice position (jx, ly, kt) of column `code`.
std::uint64_t ball_key(std::uint64_t seed, int level, std::uint64_t code, const NetPoint& p);

/// The random mapping truncated at params.depth with every ball materialised.
class RandomMap {
 public:
  RandomMap(IFSParams params, std::uint64_t seed, std::vector<std::vector<BumpBall>> levels);

  const IFSParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  /// Balls of level m (1-based) in canonical order.
  const std::vector<BumpBall>& level(int m) const { return levels_.at(static_cast<std::size_t>(m - 1)); }
  int depth() const { return static_cast<int>(levels_.size()); }

  /// Calls fn(ball) for level-m balls with d(q, center) < 2 radius.
  template <typename Fn>
  void for_each_active(int m, const HPoint& q, Fn&& fn) const;

  /// Number of level-m balls whose bump is positive at q.
  std::size_t overlap(int m, const HPoint& q) const;

 private:
  void index_levels();

  IFSParams params_;
  std::uint64_t seed_;
  std::vector<std::vector<BumpBall>> levels_;
  std::vector<NeighborGrid> index_;
};

/// Builds every level 1..depth over all 4^m columns; words are processed in
/// parallel and assembled in canonical (word, lattice) order.
RandomMap build_map(const IFSParams& params, std::uint64_t seed);

/// Net of the level-m column over the first word, in lattice order; every
/// level-m column has the same (j, l, k) set.
std::vector<NetPoint> level_net(const IFSParams& params, int m);

/// Number of level-m balls, 4^m times the size of one column's net.
std::uint64_t level_ball_count(const IFSParams& params, int m);

/// sum_m (1+m)^-2 sigma^(m/alpha) sum_B psi_B(q) xi_B.
std::vector<double> eval_map(const RandomMap& map, const HPoint& q);

/// The same mapping with balls generated on demand per column and block.
/// Not thread-safe (holds a cache); use one instance per thread.
class LocalMap {
 public:
  LocalMap(IFSParams params, std::uint64_t seed);

  const IFSParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }

  std::vector<double> eval(const HPoint& q);
  /// Level-m contribution sum_B psi_B(q) xi_B, without the level weight.
  std::vector<double> level_sum(int m, const HPoint& q);
  std::size_t overlap(int m, const HPoint& q);
  void clear_cache() { columns_.clear(); }
  std::size_t cached_columns() const { return columns_.size(); }

 private:
  ColumnNet& column(int m, std::uint64_t code);
  /// Level-m words whose columns may reach within 2 sigma^m of q.
  std::vector<std::uint64_t> nearby_words(int m, double qx, double qy, double qt) const;

  template <typename Fn>
  void for_each_active(int m, const HPoint& q, Fn&& fn);

  IFSParams params_;
  std::uint64_t seed_;
  std::unordered_map<std::uint64_t, std::unique_ptr<ColumnNet>> columns_;
};

/// Monte Carlo volume of the Koranyi unit ball of H^1 (exact value pi^2/2).
double unit_ball_volume_mc(std::size_t samples, std::uint64_t seed);

/// sum_B int_{2B} (sigma^(m/alpha) / radius)^p dH^4 over the level-m balls,
/// with vol(2B) = c (2 radius)^4 and c estimated by Monte Carlo.
double level_sobolev_norm(const RandomMap& map, int m, std::size_t mc_samples, double p,
                          std::uint64_t seed = 0);
/// The same from the ball count alone (all level-m balls share one radius).
double level_sobolev_norm(const IFSParams& params, int m, std::uint64_t balls, std::size_t mc_samples,
                          double p, std::uint64_t seed = 0);

struct ParameterPoint {
  HPoint a;   // (0, y, t), a point of the vertical complement of the x-axis
  Word word;  // depth-`params.depth` word whose cell centre it is
};

/// `count` cell centres of uniformly drawn depth-`params.depth` words.
std::vector<ParameterPoint> sample_E_alpha(const IFSParams& params, std::size_t count,
                                           std::uint64_t seed);

// ---------------------------------------------------------------------------

template <typename Fn>
void ColumnNet::for_each_near(double qx, double qy, double qt, Fn&& fn) {
  const double r = r_;
  const double ctp = phi(qx, qy, qt)[2];
  if (qx <= -2.0 * r || qx >= 1.0 + 2.0 * r) return;
  const double hx = r / 4.0;
  std::int64_t ilo = static_cast<std::int64_t>(std::floor((qx - 2.0 * r) / r)) - 1;
  std::int64_t ihi = static_cast<std::int64_t>(std::floor((qx + 2.0 * r) / r)) + 1;
  ilo = std::max<std::int64_t>(ilo, 0);
  ihi = std::min<std::int64_t>(ihi, blocks_ - 1);
  const double H = 3.0 * r * r;
  for (std::int64_t i = ilo; i <= ihi; ++i) {
    const double xc = (4.0 * static_cast<double>(i) + 1.5) * hx;
    // Distance < 2r forces |u_hat - u_p| < 4r^2 + |4xc - 2xp - 2xq| * 2r.
    const double shear = 0.75 * r + 2.0 * std::abs(xc - qx);
    const double u_hat = ctp - 4.0 * xc * (qy - cell_.y);
    const double slack = 4.0 * r * r + shear * 2.0 * r;
    const auto range = slab_range(i);
    std::int64_t klo = static_cast<std::int64_t>(std::floor((u_hat - slack - cell_.t) / H)) - 1;
    std::int64_t khi = static_cast<std::int64_t>(std::floor((u_hat + slack - cell_.t) / H)) + 1;
    klo = std::max(klo, range.lo);
    khi = std::min(khi, range.hi);
    for (std::int64_t kb = klo; kb <= khi; ++kb) {
      for (const auto& p : block(i, kb)) fn(p);
    }
  }
}

template <typename Fn>
void RandomMap::for_each_active(int m, const HPoint& q, Fn&& fn) const {
  const auto& balls = level(m);
  const auto& grid = index_.at(static_cast<std::size_t>(m - 1));
  const auto c = q.coords();
  grid.any_near(c, [&](std::uint32_t id) {
    const auto& B = balls[id];
    const auto bc = B.center.coords();
    const double d = h1::dist(bc[0], bc[1], bc[2], c[0], c[1], c[2]);
    if (d < 2.0 * B.radius) fn(B, d);
    return false;
  });
}

}  // namespace heis::construction
