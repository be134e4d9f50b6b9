#include "heis/construction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "heis/parallel.hpp"

namespace heis::construction {

namespace {

constexpr std::array<std::array<double, 2>, 4> kUnitOffsets{{{0, 0}, {1, 0}, {0, 1}, {1, 1}}};

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

// Number of lattice steps of size `step` that fit in `span`, tolerant of the
// rounding in span/step when the ratio is meant to be an integer.
std::int64_t lattice_max(double span, double step) {
  return static_cast<std::int64_t>(std::floor(span / step * (1.0 + 1e-12)));
}

std::uint64_t column_key(int m, std::uint64_t code) {
  return (static_cast<std::uint64_t>(m) << 58) ^ code;
}

}  // namespace

IFSParams make_params(double p, double alpha, int depth, int target_N) {
  if (!(p > 4.0)) throw DomainError("make_params: p must exceed 4");
  const double hi = p / (p - 2.0);
  if (!(alpha > 1.0 && alpha < hi)) {
    throw DomainError("make_params: alpha must lie in (1, p/(p-2)) = (1, " + std::to_string(hi) + ")");
  }
  if (depth < 1) throw DomainError("make_params: depth must be >= 1");
  if (target_N < 1) throw DomainError("make_params: target dimension must be >= 1");
  IFSParams out;
  out.p = p;
  out.alpha = alpha;
  out.beta_c = 2.0 - p * (1.0 - 1.0 / alpha);
  out.sigma = std::pow(4.0, -1.0 / out.beta_c);
  out.target_N = target_N;
  out.depth = depth;
  return out;
}

void validate_word(const Word& w) {
  for (auto c : w) {
    if (c < 1 || c > 4) throw DomainError("word letters must lie in {1,2,3,4}");
  }
  if (w.size() > 28) throw DomainError("words longer than 28 letters are not supported");
}

std::uint64_t word_code(const Word& w) {
  validate_word(w);
  std::uint64_t code = 0;
  for (auto c : w) code = code * 4 + static_cast<std::uint64_t>(c - 1);
  return code;
}

Word word_from_code(std::uint64_t code, int length) {
  Word w(static_cast<std::size_t>(length));
  for (int i = length - 1; i >= 0; --i) {
    w[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(1 + (code & 3u));
    code >>= 2;
  }
  return w;
}

Cell cell(const Word& w, const IFSParams& params) {
  validate_word(w);
  const double s = params.sigma;
  // f_w(x) = f_{w1}(f_{w2}(...)) = sum_k s^(k-1) offset_{w_k} + s^m x.
  Cell c;
  double scale = 1.0;
  for (auto letter : w) {
    const auto& o = kUnitOffsets[letter - 1u];
    c.y += scale * (1.0 - s) * o[0];
    c.t += scale * (1.0 - s) * o[1];
    scale *= s;
  }
  c.size = scale;
  return c;
}

PointCloud four_corner_cloud(const IFSParams& params, int samples_per_cell) {
  if (samples_per_cell < 1) throw DomainError("four_corner_cloud: samples_per_cell must be >= 1");
  // R2 sequence (plastic-number Kronecker sequence) started at the centre.
  constexpr double g = 1.32471795724474602596;
  constexpr double a1 = 1.0 / g;
  constexpr double a2 = 1.0 / (g * g);
  PointCloud cloud({Metric::EuclideanAmbient, 0}, 3);
  const std::uint64_t words = 1ULL << (2 * params.depth);
  for (std::uint64_t code = 0; code < words; ++code) {
    const Cell c = cell(word_from_code(code, params.depth), params);
    for (int i = 0; i < samples_per_cell; ++i) {
      const double u = std::fmod(0.5 + a1 * i, 1.0);
      const double v = std::fmod(0.5 + a2 * i, 1.0);
      const double pt[3] = {0.0, c.y + u * c.size, c.t + v * c.size};
      cloud.add(pt);
    }
  }
  return cloud;
}

std::array<double, 3> phi(double x, double y, double t) { return {x, y, t + 2.0 * x * y}; }

std::array<double, 3> phi_inverse(double x, double y, double t) { return {x, y, t - 2.0 * x * y}; }

bool column_contains(const HPoint& q, const Word& w, const IFSParams& params) {
  if (q.n() != 1) throw DimensionMismatch("column_contains: columns live in H^1");
  const auto c = q.coords();
  if (c[0] < 0.0 || c[0] > 1.0) return false;
  const auto img = phi(c[0], c[1], c[2]);
  return cell(w, params).contains(img[1], img[2]);
}

// ----------------------------------------------------------------------------
// ColumnNet

ColumnNet::ColumnNet(const Word& w, const IFSParams& params)
    : level_(static_cast<int>(w.size())),
      r_(std::pow(params.sigma, static_cast<double>(w.size()))),
      cell_(construction::cell(w, params)) {
  jmax_ = lattice_max(1.0, r_ / 4.0);
  kmax_ = lattice_max(cell_.size, r_ * r_ / 4.0);
  blocks_ = jmax_ / 4 + 1;
}

std::uint64_t ColumnNet::block_key(std::int64_t i, std::int64_t kb) {
  return (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(kb & 0xffffffff);
}

int ColumnNet::phase(std::int64_t i, std::int64_t kb) const {
  return 2 * static_cast<int>(i & 1) + static_cast<int>(kb & 1);
}

// In lattice units the sheared coordinate is (u - t0) / (r^2/4) = k - (4i+1.5) l,
// so twice it is the integer 2k - (8i+3) l and the slab of height 3r^2 is
// floor(2U / 24).
ColumnNet::BlockRange ColumnNet::slab_range(std::int64_t i) const {
  return {floor_div(-4 * (8 * i + 3), 24), floor_div(2 * kmax_, 24)};
}

NetPoint ColumnNet::lattice_point(const Cell& cell, double r, std::int64_t j, std::int64_t l,
                                  std::int64_t k) {
  NetPoint p;
  p.x = static_cast<double>(j) * (r / 4.0);
  p.y = cell.y + static_cast<double>(l) * (r / 4.0);
  const double tp = cell.t + static_cast<double>(k) * (r * r / 4.0);
  p.t = tp - 2.0 * p.x * p.y;
  p.jx = static_cast<std::uint32_t>(j);
  p.ly = static_cast<std::uint32_t>(l);
  p.kt = static_cast<std::uint32_t>(k);
  return p;
}

NetPoint ColumnNet::candidate(std::int64_t j, std::int64_t l, std::int64_t k) const {
  return lattice_point(cell_, r_, j, l, k);
}

bool ColumnNet::lattice_close(const NetPoint& a, const NetPoint& b) {
  const std::int64_t dj = static_cast<std::int64_t>(b.jx) - a.jx;
  const std::int64_t dl = static_cast<std::int64_t>(b.ly) - a.ly;
  const std::int64_t rho = dj * dj + dl * dl;
  if (rho >= 16) return false;
  // t' steps are r^2/4 = 4 h^2.
  const std::int64_t dk =
      4 * (static_cast<std::int64_t>(b.kt) - a.kt) - 2 * (static_cast<std::int64_t>(a.jx) + b.jx) * dl;
  return rho * rho + dk * dk < 256;
}

const std::vector<NetPoint>& ColumnNet::block(std::int64_t i, std::int64_t kb) {
  const std::uint64_t key = block_key(i, kb);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  // Blocks of the neighbouring x-blocks can interact across at most four
  // slabs; within the same x-block only adjacent slabs can.
  const int ph = phase(i, kb);
  std::vector<NetPoint> near;
  for (std::int64_t di = -1; di <= 1; ++di) {
    const std::int64_t ii = i + di;
    if (ii < 0 || ii >= blocks_) continue;
    const auto range = slab_range(ii);
    const std::int64_t reach = di == 0 ? 1 : 4;
    for (std::int64_t kk = std::max(range.lo, kb - reach); kk <= std::min(range.hi, kb + reach); ++kk) {
      if (phase(ii, kk) >= ph) continue;
      const auto& dep = block(ii, kk);
      near.insert(near.end(), dep.begin(), dep.end());
    }
  }

  std::vector<NetPoint> chosen;
  const std::int64_t jend = std::min(4 * i + 3, jmax_);
  for (std::int64_t j = 4 * i; j <= jend; ++j) {
    for (std::int64_t l = 0; l <= 4; ++l) {
      const std::int64_t shift = (8 * i + 3) * l;
      const std::int64_t klo = std::max<std::int64_t>(0, ceil_div(24 * kb + shift, 2));
      const std::int64_t khi = std::min<std::int64_t>(kmax_, floor_div(24 * kb + 23 + shift, 2));
      for (std::int64_t k = klo; k <= khi; ++k) {
        const NetPoint c = candidate(j, l, k);
        bool blocked = false;
        for (auto it = chosen.rbegin(); it != chosen.rend() && !blocked; ++it) blocked = lattice_close(*it, c);
        for (std::size_t q = 0; q < near.size() && !blocked; ++q) blocked = lattice_close(near[q], c);
        if (!blocked) chosen.push_back(c);
      }
    }
  }
  return memo_.emplace(key, std::move(chosen)).first->second;
}

std::vector<NetPoint> ColumnNet::all_points() {
  std::vector<NetPoint> out;
  for (std::int64_t i = 0; i < blocks_; ++i) {
    const auto range = slab_range(i);
    for (std::int64_t kb = range.lo; kb <= range.hi; ++kb) {
      const auto& b = block(i, kb);
      out.insert(out.end(), b.begin(), b.end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NetPoint> ColumnNet::candidates() const {
  std::vector<NetPoint> out;
  for (std::int64_t j = 0; j <= jmax_; ++j) {
    for (std::int64_t l = 0; l <= 4; ++l) {
      for (std::int64_t k = 0; k <= kmax_; ++k) out.push_back(candidate(j, l, k));
    }
  }
  return out;
}

void for_each_pair_within(const std::vector<NetPoint>& a, const std::vector<NetPoint>& b, double D,
                          bool same, const std::function<void(std::size_t, std::size_t, double)>& fn) {
  // Lines (jx, ly) are contiguous runs in lattice order, sorted by t'.
  std::unordered_map<std::uint64_t, std::pair<std::size_t, std::size_t>> lines;
  std::uint32_t jmax = 0;
  for (std::size_t i = 0; i < b.size();) {
    std::size_t e = i;
    while (e < b.size() && b[e].jx == b[i].jx && b[e].ly == b[i].ly) ++e;
    lines.emplace((static_cast<std::uint64_t>(b[i].jx) << 8) | b[i].ly, std::make_pair(i, e));
    jmax = std::max(jmax, b[i].jx);
    i = e;
  }
  if (b.empty()) return;
  auto tprime = [](const NetPoint& p) { return p.t + 2.0 * p.x * p.y; };
  // x-spacing of the lattice, from any point with j > 0.
  double h = 0.0;
  for (const auto& q : b) {
    if (q.jx > 0) {
      h = q.x / q.jx;
      break;
    }
  }
  const std::int64_t jreach = h > 0.0 ? static_cast<std::int64_t>(std::ceil(D / h)) : 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const NetPoint& p = a[i];
    const double tp = tprime(p);
    for (std::int64_t j = std::max<std::int64_t>(0, static_cast<std::int64_t>(p.jx) - jreach);
         j <= std::min<std::int64_t>(jmax, static_cast<std::int64_t>(p.jx) + jreach); ++j) {
      for (std::uint64_t l = 0; l <= 4; ++l) {
        auto it = lines.find((static_cast<std::uint64_t>(j) << 8) | l);
        if (it == lines.end()) continue;
        const auto [lo_i, hi_i] = it->second;
        const NetPoint& q0 = b[lo_i];
        if (std::abs(q0.y - p.y) >= D) continue;
        // d < D needs |t'_q - t'_p - 2 (x_p + x_q)(y_q - y_p)| < D^2.
        const double centre = tp + 2.0 * (p.x + q0.x) * (q0.y - p.y);
        const auto first = std::lower_bound(b.begin() + static_cast<std::ptrdiff_t>(lo_i),
                                             b.begin() + static_cast<std::ptrdiff_t>(hi_i), centre - D * D,
                                             [&](const NetPoint& q, double v) { return tprime(q) < v; });
        for (auto q = first; q != b.begin() + static_cast<std::ptrdiff_t>(hi_i); ++q) {
          if (tprime(*q) > centre + D * D) break;
          const auto qi = static_cast<std::size_t>(q - b.begin());
          if (same && qi <= i) continue;
          const double d = h1::dist(p.x, p.y, p.t, q->x, q->y, q->t);
          if (d < D) fn(i, qi, d);
        }
      }
    }
  }
}

std::size_t count_close_pairs(const std::vector<NetPoint>& points, double r, double rel_tol) {
  std::size_t close = 0;
  const double cut = r * (1.0 - rel_tol);
  for_each_pair_within(points, points, r, true, [&](std::size_t, std::size_t, double d) {
    if (d < cut) ++close;
  });
  return close;
}

std::vector<HPoint> build_net(const Word& w, const IFSParams& params) {
  ColumnNet net(w, params);
  std::vector<HPoint> out;
  for (const auto& p : net.all_points()) out.push_back(p.point());
  return out;
}

// ----------------------------------------------------------------------------
// Bumps and random vectors

double bump(double dist, double radius) { return std::clamp(2.0 - dist / radius, 0.0, 1.0); }

double bump(const BumpBall& B, const HPoint& q) { return bump(heis_dist(B.center, q), B.radius); }

std::vector<double> draw_unit_ball(CounterRng& rng, int N) {
  std::vector<double> v(static_cast<std::size_t>(N));
  while (true) {
    double s = 0.0;
    for (double& c : v) {
      c = rng.uniform(-1.0, 1.0);
      s += c * c;
    }
    if (s <= 1.0) return v;
  }
}

std::uint64_t ball_key(std::uint64_t seed, int level, std::uint64_t code, const NetPoint& p) {
  std::uint64_t k = derive(seed, static_cast<std::uint64_t>(level));
  k = derive(k, code);
  k = derive(k, p.jx);
  k = derive(k, p.ly);
  return derive(k, p.kt);
}

// ----------------------------------------------------------------------------
// RandomMap

RandomMap::RandomMap(IFSParams params, std::uint64_t seed, std::vector<std::vector<BumpBall>> levels)
    : params_(params), seed_(seed), levels_(std::move(levels)) {
  index_levels();
}

void RandomMap::index_levels() {
  index_.clear();
  for (std::size_t m = 0; m < levels_.size(); ++m) {
    const double R = 2.0 * std::pow(params_.sigma, static_cast<double>(m + 1));
    double zmax = 0.0;
    for (const auto& B : levels_[m]) {
      const auto c = B.center.coords();
      zmax = std::max(zmax, std::hypot(c[0], c[1]));
    }
    NeighborGrid grid({R, R, R * R + 2.0 * zmax * R});
    for (std::size_t b = 0; b < levels_[m].size(); ++b) {
      grid.insert(static_cast<std::uint32_t>(b), levels_[m][b].center.coords());
    }
    index_.push_back(std::move(grid));
  }
}

std::size_t RandomMap::overlap(int m, const HPoint& q) const {
  std::size_t n = 0;
  for_each_active(m, q, [&](const BumpBall&, double) { ++n; });
  return n;
}

std::vector<NetPoint> level_net(const IFSParams& params, int m) {
  return ColumnNet(word_from_code(0, m), params).all_points();
}

std::uint64_t level_ball_count(const IFSParams& params, int m) {
  return (1ULL << (2 * m)) * static_cast<std::uint64_t>(level_net(params, m).size());
}

RandomMap build_map(const IFSParams& params, std::uint64_t seed) {
  std::vector<std::vector<BumpBall>> levels;
  for (int m = 1; m <= params.depth; ++m) {
    const std::uint64_t words = 1ULL << (2 * m);
    const double r = std::pow(params.sigma, static_cast<double>(m));
    const auto net = level_net(params, m);
    std::vector<BumpBall> level(words * net.size(), BumpBall{HPoint(0.0, 0.0, 0.0), 0.0, 0, {}});
    parallel_for(words, [&](std::size_t code) {
      const Cell c = cell(word_from_code(code, m), params);
      for (std::size_t i = 0; i < net.size(); ++i) {
        const NetPoint p = ColumnNet::lattice_point(c, r, net[i].jx, net[i].ly, net[i].kt);
        CounterRng rng(ball_key(seed, m, code, p));
        level[code * net.size() + i] = {p.point(), r, m, draw_unit_ball(rng, params.target_N)};
      }
    });
    levels.push_back(std::move(level));
  }
  return RandomMap(params, seed, std::move(levels));
}

std::vector<double> eval_map(const RandomMap& map, const HPoint& q) {
  if (q.n() != 1) throw DimensionMismatch("eval_map: the mapping is defined on H^1");
  const auto& P = map.params();
  std::vector<double> out(static_cast<std::size_t>(P.target_N), 0.0);
  for (int m = 1; m <= map.depth(); ++m) {
    const double w = std::pow(1.0 + m, -2.0) * std::pow(P.sigma, m / P.alpha);
    map.for_each_active(m, q, [&](const BumpBall& B, double d) {
      const double psi = bump(d, B.radius);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * psi * B.xi[k];
    });
  }
  return out;
}

// ----------------------------------------------------------------------------
// LocalMap

LocalMap::LocalMap(IFSParams params, std::uint64_t seed) : params_(params), seed_(seed) {}

ColumnNet& LocalMap::column(int m, std::uint64_t code) {
  auto& slot = columns_[column_key(m, code)];
  if (!slot) slot = std::make_unique<ColumnNet>(word_from_code(code, m), params_);
  return *slot;
}

std::vector<std::uint64_t> LocalMap::nearby_words(int m, double qx, double qy, double qt) const {
  const double r = std::pow(params_.sigma, static_cast<double>(m));
  std::vector<std::uint64_t> out;
  if (qx <= -2.0 * r || qx >= 1.0 + 2.0 * r) return out;
  const auto img = phi(qx, qy, qt);
  // d < 2r forces |dy| < 2r and |dt'| < 4r^2 + 2|x_p + x_q| 2r.
  const double my = 2.0 * r;
  const double mt = 4.0 * r * r + 4.0 * r * (1.0 + std::abs(qx));
  const double s = params_.sigma;

  struct Node {
    std::uint64_t code;
    int depth;
    double y, t, size;
  };
  std::vector<Node> stack{{0, 0, 0.0, 0.0, 1.0}};
  while (!stack.empty()) {
    const Node nd = stack.back();
    stack.pop_back();
    if (img[1] < nd.y - my || img[1] > nd.y + nd.size + my) continue;
    if (img[2] < nd.t - mt || img[2] > nd.t + nd.size + mt) continue;
    if (nd.depth == m) {
      out.push_back(nd.code);
      continue;
    }
    for (int c = 3; c >= 0; --c) {
      const auto& o = kUnitOffsets[static_cast<std::size_t>(c)];
      stack.push_back({nd.code * 4 + static_cast<std::uint64_t>(c), nd.depth + 1,
                       nd.y + nd.size * (1.0 - s) * o[0], nd.t + nd.size * (1.0 - s) * o[1],
                       nd.size * s});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Fn>
void LocalMap::for_each_active(int m, const HPoint& q, Fn&& fn) {
  const auto c = q.coords();
  for (std::uint64_t code : nearby_words(m, c[0], c[1], c[2])) {
    ColumnNet& net = column(m, code);
    const double r = net.radius();
    net.for_each_near(c[0], c[1], c[2], [&](const NetPoint& p) {
      const double d = h1::dist(p.x, p.y, p.t, c[0], c[1], c[2]);
      if (d < 2.0 * r) fn(code, p, d, r);
    });
  }
}

std::vector<double> LocalMap::level_sum(int m, const HPoint& q) {
  if (q.n() != 1) throw DimensionMismatch("LocalMap: the mapping is defined on H^1");
  std::vector<double> out(static_cast<std::size_t>(params_.target_N), 0.0);
  for_each_active(m, q, [&](std::uint64_t code, const NetPoint& p, double d, double r) {
    CounterRng rng(ball_key(seed_, m, code, p));
    const auto xi = draw_unit_ball(rng, params_.target_N);
    const double psi = bump(d, r);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += psi * xi[k];
  });
  return out;
}

std::vector<double> LocalMap::eval(const HPoint& q) {
  std::vector<double> out(static_cast<std::size_t>(params_.target_N), 0.0);
  for (int m = 1; m <= params_.depth; ++m) {
    const double w = std::pow(1.0 + m, -2.0) * std::pow(params_.sigma, m / params_.alpha);
    const auto s = level_sum(m, q);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * s[k];
  }
  return out;
}

std::size_t LocalMap::overlap(int m, const HPoint& q) {
  if (q.n() != 1) throw DimensionMismatch("LocalMap: the mapping is defined on H^1");
  std::size_t n = 0;
  for_each_active(m, q, [&](std::uint64_t, const NetPoint&, double, double) { ++n; });
  return n;
}

// ----------------------------------------------------------------------------
// Sobolev norm and parameter samples

double unit_ball_volume_mc(std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("unit_ball_volume_mc: need samples");
  CounterRng rng(derive(seed, 0x50b01e5ULL));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    const double y = rng.uniform(-1.0, 1.0);
    const double t = rng.uniform(-1.0, 1.0);
    const double rho = x * x + y * y;
    if (rho * rho + t * t < 1.0) ++hits;
  }
  return 8.0 * static_cast<double>(hits) / static_cast<double>(samples);
}

double level_sobolev_norm(const IFSParams& params, int m, std::uint64_t balls, std::size_t mc_samples,
                          double p, std::uint64_t seed) {
  if (m < 1) throw DomainError("level_sobolev_norm: level must be >= 1");
  const double r = std::pow(params.sigma, static_cast<double>(m));
  const double lip = std::pow(params.sigma, m / params.alpha) / r;
  const double vol2B = unit_ball_volume_mc(mc_samples, seed) * std::pow(2.0 * r, 4.0);
  return static_cast<double>(balls) * std::pow(lip, p) * vol2B;
}

double level_sobolev_norm(const RandomMap& map, int m, std::size_t mc_samples, double p,
                          std::uint64_t seed) {
  if (m < 1 || m > map.depth()) throw DomainError("level_sobolev_norm: level outside 1..depth");
  return level_sobolev_norm(map.params(), m, map.level(m).size(), mc_samples, p, seed);
}

std::vector<ParameterPoint> sample_E_alpha(const IFSParams& params, std::size_t count,
                                           std::uint64_t seed) {
  std::vector<ParameterPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(derive(seed, i));
    Word w(static_cast<std::size_t>(params.depth));
    for (auto& c : w) c = static_cast<std::uint8_t>(1 + rng.below(4));
    const Cell c = cell(w, params);
    out.push_back({HPoint(0.0, c.center_y(), c.center_t()), std::move(w)});
  }
  return out;
}

}  // namespace heis::construction
