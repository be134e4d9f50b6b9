#include "heis/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heis/parallel.hpp"
#include "heis/rng.hpp"

namespace heis {

std::string MetricSel::name() const {
  switch (tag) {
    case Metric::Heisenberg: return "heisenberg";
    case Metric::EuclideanAmbient: return "euclidean-ambient";
    case Metric::EuclideanTarget: return "euclidean-target-" + std::to_string(target_dim);
  }
  return "?";
}

PointCloud::PointCloud(MetricSel metric, int dim) : metric_(metric), dim_(dim) {
  if (metric_.tag == Metric::EuclideanTarget) {
    if (dim_ < 1 || metric_.target_dim != dim_) {
      throw DimensionMismatch("PointCloud: target metric dimension must match payload");
    }
  } else if (dim_ < 3 || dim_ % 2 == 0) {
    throw DimensionMismatch("PointCloud: Heisenberg payloads have length 2n+1");
  }
}

PointCloud PointCloud::from_points(const std::vector<HPoint>& pts, Metric tag) {
  if (pts.empty()) throw DomainError("PointCloud: empty point list");
  if (tag == Metric::EuclideanTarget) throw DomainError("PointCloud: HPoints need an ambient metric");
  PointCloud cloud({tag, 0}, pts.front().dim().topological());
  for (const auto& p : pts) cloud.add(p);
  return cloud;
}

void PointCloud::add(std::span<const double> p) {
  if (static_cast<int>(p.size()) != dim_) throw DimensionMismatch("PointCloud::add: wrong length");
  for (double c : p) {
    if (!std::isfinite(c)) throw DomainError("PointCloud::add: non-finite coordinate");
  }
  data_.insert(data_.end(), p.begin(), p.end());
}

double PointCloud::distance(std::span<const double> a, std::span<const double> b) const {
  const std::size_t d = a.size();
  if (metric_.tag == Metric::Heisenberg) {
    double r2 = 0.0;
    double w = 0.0;
    for (std::size_t i = 0; i + 1 < d; i += 2) {
      const double dx = b[i] - a[i];
      const double dy = b[i + 1] - a[i + 1];
      r2 += dx * dx + dy * dy;
      w += a[i] * b[i + 1] - b[i] * a[i + 1];
    }
    const double dt = b[d - 1] - a[d - 1] - 2.0 * w;
    return std::sqrt(std::sqrt(r2 * r2 + dt * dt));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += (b[i] - a[i]) * (b[i] - a[i]);
  return std::sqrt(s);
}

PointCloud PointCloud::dilated(double lambda) const {
  if (metric_.tag != Metric::Heisenberg) throw DomainError("dilated: needs a Heisenberg payload");
  PointCloud out(metric_, dim_);
  out.data_.reserve(data_.size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto p = point(i);
    out.add(dilate(lambda, HPoint::from_coords(p)).coords());
  }
  return out;
}

NeighborGrid::NeighborGrid(std::vector<double> cell_widths) : widths_(std::move(cell_widths)) {
  if (widths_.empty() || widths_.size() > 16) throw DomainError("NeighborGrid: 1..16 dimensions");
  for (double w : widths_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("NeighborGrid: widths must be positive");
  }
}

std::uint64_t NeighborGrid::hash_cell(std::span<const std::int64_t> cell) const {
  std::uint64_t h = 0x2545F4914F6CDD1DULL;
  for (std::int64_t c : cell) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return h;
}

void NeighborGrid::cell_of(std::span<const double> p, std::span<std::int64_t> out) const {
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    out[i] = static_cast<std::int64_t>(std::floor(p[i] / widths_[i]));
  }
}

void NeighborGrid::insert(std::uint32_t id, std::span<const double> p) {
  std::int64_t cell[16];
  cell_of(p, {cell, widths_.size()});
  buckets_[hash_cell({cell, widths_.size()})].push_back(id);
}

namespace {

// Cell widths such that every point within distance r of p lies in a cell
// adjacent to p's cell.
std::vector<double> cell_widths(const PointCloud& cloud, double r) {
  std::vector<double> w(static_cast<std::size_t>(cloud.dim()), r);
  if (cloud.metric().tag == Metric::Heisenberg) {
    // |t_q - t_p| <= r^2 + 2 |z_p| r whenever d(p, q) < r.
    double zmax = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const auto p = cloud.point(i);
      double z2 = 0.0;
      for (std::size_t k = 0; k + 1 < p.size(); ++k) z2 += p[k] * p[k];
      zmax = std::max(zmax, std::sqrt(z2));
    }
    w.back() = r * r + 2.0 * zmax * r;
  }
  return w;
}

}  // namespace

std::size_t covering_count(const PointCloud& cloud, double r) {
  if (!(r > 0.0)) throw DomainError("covering_count: r must be positive");
  NeighborGrid grid(cell_widths(cloud, r));
  std::vector<std::uint32_t> centers;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    const bool covered =
        grid.any_near(p, [&](std::uint32_t c) { return cloud.distance(cloud.point(c), p) < r; });
    if (!covered) {
      centers.push_back(static_cast<std::uint32_t>(i));
      grid.insert(static_cast<std::uint32_t>(i), p);
    }
  }
  return centers.size();
}

DimensionEstimate estimate_dim(const PointCloud& cloud, const EstimateOptions& opts) {
  if (cloud.size() == 0) throw DomainError("estimate_dim: empty cloud");
  if (!(opts.r_max > opts.r_min && opts.r_min > 0.0)) {
    throw DomainError("estimate_dim: need r_max > r_min > 0");
  }
  if (opts.levels < 4) throw DomainError("estimate_dim: need at least 4 levels");

  DimensionEstimate est;
  est.fit_lo = opts.fit_lo >= 0 ? opts.fit_lo : 1;
  est.fit_hi = opts.fit_hi >= 0 ? opts.fit_hi : opts.levels - 2;
  if (est.fit_lo >= est.fit_hi || est.fit_hi >= opts.levels) {
    throw DomainError("estimate_dim: fit window must hold at least two scales");
  }

  const double ratio = opts.r_min / opts.r_max;
  std::size_t prev = 0;
  for (int k = 0; k < opts.levels; ++k) {
    const double r = opts.r_max * std::pow(ratio, static_cast<double>(k) / (opts.levels - 1));
    // Greedy nets are only guaranteed monotone across a factor-2 change of
    // scale; the running max keeps N(r) non-increasing in r.
    const std::size_t n = std::max(prev, covering_count(cloud, r));
    est.scales.emplace_back(r, n);
    prev = n;
  }
  est.saturated = est.scales.back().second == cloud.size();

  const auto lo = static_cast<std::size_t>(est.fit_lo);
  const auto hi = static_cast<std::size_t>(est.fit_hi);
  if (est.scales[lo].second == est.scales[hi].second) {
    est.degenerate = true;
    return est;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double cnt = static_cast<double>(hi - lo + 1);
  for (std::size_t k = lo; k <= hi; ++k) {
    const double x = -std::log(est.scales[k].first);
    const double y = std::log(static_cast<double>(est.scales[k].second));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / cnt;
  double ss = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) {
    const double x = -std::log(est.scales[k].first);
    const double e = std::log(static_cast<double>(est.scales[k].second)) - (icpt + slope * x);
    ss += e * e;
  }
  est.value = std::max(0.0, slope);
  est.residual = std::sqrt(ss / cnt);
  return est;
}

RieszEnergy riesz_energy(const PointCloud& cloud, double s) {
  if (!(s > 0.0)) throw DomainError("riesz_energy: s must be positive");
  const std::size_t M = cloud.size();
  if (M < 2) throw DomainError("riesz_energy: need at least two points");
  constexpr double kFloor = 1e-12;
  constexpr std::size_t kRows = 64;
  const std::size_t chunks = (M + kRows - 1) / kRows;
  std::vector<double> partial(chunks, 0.0);
  std::vector<std::size_t> floored(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    double acc = 0.0;
    std::size_t fl = 0;
    const std::size_t end = std::min(M, (c + 1) * kRows);
    for (std::size_t i = c * kRows; i < end; ++i) {
      for (std::size_t j = i + 1; j < M; ++j) {
        double d = cloud.distance(i, j);
        if (d < kFloor) {
          d = kFloor;
          ++fl;
        }
        acc += std::pow(d, -s);
      }
    }
    partial[c] = acc;
    floored[c] = fl;
  });
  RieszEnergy out;
  double total = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    total += partial[c];
    out.floored_pairs += floored[c];
  }
  out.value = 2.0 * total / (static_cast<double>(M) * static_cast<double>(M));
  return out;
}

}  // namespace heis
