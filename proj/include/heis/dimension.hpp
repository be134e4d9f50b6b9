#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "heis/core.hpp"

namespace heis {

enum class Metric {
  Heisenberg,        // points of H^n, Koranyi distance
  EuclideanAmbient,  // points of H^n = R^(2n+1), Euclidean distance
  EuclideanTarget,   // vectors of R^N, Euclidean distance
};

struct MetricSel {
  Metric tag = Metric::Heisenberg;
  int target_dim = 0;  // N for EuclideanTarget, unused otherwise

  std::string name() const;
};

/// A finite sample of a set, stored row-major, with the metric it is measured in.
class PointCloud {
 public:
  PointCloud(MetricSel metric, int dim);

  static PointCloud from_points(const std::vector<HPoint>& pts, Metric tag);

  void add(std::span<const double> p);
  void add(const HPoint& p) { add(p.coords()); }

  std::size_t size() const { return data_.size() / static_cast<std::size_t>(dim_); }
  int dim() const { return dim_; }
  const MetricSel& metric() const { return metric_; }
  std::span<const double> point(std::size_t i) const {
    return {data_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

  double distance(std::span<const double> a, std::span<const double> b) const;
  double distance(std::size_t i, std::size_t j) const { return distance(point(i), point(j)); }

  /// Applies the intrinsic dilation to every point (Heisenberg payloads only).
  PointCloud dilated(double lambda) const;

 private:
  MetricSel metric_;
  int dim_;
  std::vector<double> data_;
};

/// Size of the greedy maximal r-separated subset taken in stored order.
std::size_t covering_count(const PointCloud& cloud, double r);

struct DimensionEstimate {
  double value = 0.0;
  std::vector<std::pair<double, std::size_t>> scales;  // (r, N(r)), r decreasing
  int fit_lo = 0;  // inclusive indices into scales
  int fit_hi = 0;
  double residual = 0.0;    // RMS residual of the log-log fit
  bool degenerate = false;  // all counts in the window equal; value forced to 0
  bool saturated = false;   // N(r_min) equals the cloud size
};

struct EstimateOptions {
  double r_max = 0.5;
  double r_min = 0.01;
  int levels = 10;
  /// Fit window; negative means the default (drop the largest and smallest scale).
  int fit_lo = -1;
  int fit_hi = -1;
};

/// Least-squares slope of log N(r) against log(1/r) over geometric scales.
DimensionEstimate estimate_dim(const PointCloud& cloud, const EstimateOptions& opts);

struct RieszEnergy {
  double value = 0.0;
  std::size_t floored_pairs = 0;  // coincident pairs evaluated at distance 1e-12
};

/// (1/M^2) * sum_{i != j} dist(p_i, p_j)^(-s).
RieszEnergy riesz_energy(const PointCloud& cloud, double s);

/// Uniform-grid bucketing for radius queries. Cells are keyed by a hash of
/// their integer coordinates; hash collisions only add candidates.
class NeighborGrid {
 public:
  NeighborGrid(std::vector<double> cell_widths);

  void insert(std::uint32_t id, std::span<const double> p);

  /// Calls fn(id) for every id whose cell is adjacent to p's cell. Returns
  /// early (true) as soon as fn returns true.
  template <typename Fn>
  bool any_near(std::span<const double> p, Fn&& fn) const;

 private:
  std::uint64_t hash_cell(std::span<const std::int64_t> cell) const;
  void cell_of(std::span<const double> p, std::span<std::int64_t> out) const;

  std::vector<double> widths_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

template <typename Fn>
bool NeighborGrid::any_near(std::span<const double> p, Fn&& fn) const {
  const std::size_t d = widths_.size();
  std::int64_t base[16];
  std::int64_t cell[16];
  int offs[16];
  cell_of(p, {base, d});
  for (std::size_t i = 0; i < d; ++i) offs[i] = -1;
  while (true) {
    for (std::size_t i = 0; i < d; ++i) cell[i] = base[i] + offs[i];
    if (auto it = buckets_.find(hash_cell({cell, d})); it != buckets_.end()) {
      for (std::uint32_t id : it->second) {
        if (fn(id)) return true;
      }
    }
    std::size_t k = 0;
    while (k < d && ++offs[k] == 2) offs[k++] = -1;
    if (k == d) return false;
  }
}

}  // namespace heis
