#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "heis/bounds.hpp"
#include "heis/construction.hpp"
#include "heis/core.hpp"
#include "heis/dimension.hpp"
#include "heis/subgroups.hpp"

namespace heis::experiments {

using Json = nlohmann::ordered_json;

inline constexpr const char* kArtifactVersion = "heisdistort 1.0.0";

/// One pass/fail decision and the threshold it was taken against.
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "<", ">", "in", "=="
  double threshold = 0.0;
  double threshold_hi = 0.0;  // upper end for "in"
  bool pass = false;
};

struct ExperimentReport {
  std::string id;
  std::uint64_t seed = 0;
  Json params = Json::object();
  Json records = Json::array();
  Json summary = Json::object();
  Json counterexample = nullptr;
  std::vector<Check> checks;
  std::optional<double> wall_time;  // seconds; omitted unless requested

  bool pass() const;
  void check(std::string name, double value, std::string relation, double threshold,
             double threshold_hi = 0.0);
  Json to_json() const;
};

/// The thresholds table with its version, as echoed into reports.
Json thresholds_json();

// ---------------------------------------------------------------------------

using GroupLaw = std::function<HPoint(const HPoint&, const HPoint&)>;

struct AxiomsOptions {
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  int n = 1;
  double scale = 2.0;  // coordinates drawn from [-scale, scale]
  /// Product under test; defaults to multiply. Tests substitute a corrupted law.
  GroupLaw product;
};

ExperimentReport cmd_axioms(const AxiomsOptions& opts);

struct TubesOptions {
  std::size_t trials = 16000;
  std::uint64_t seed = 1;
  double box_scale = 1.0;
  int n = 1;
  int m = 1;
  bool keep_records = true;
};

/// One randomized instance of the disjoint-tubes implication.
struct TubeTrial {
  std::vector<double> theta;  // coordinates in the vertical complement
  std::vector<double> a_hat;
  double t1 = 0.0;
  double t2 = 0.0;
  std::vector<double> s1;  // coefficients of v1, v2 in the subgroup basis
  std::vector<double> s2;
  double r = 0.0;
  double witness = 0.0;  // |(a1 v1)^-1 (a2 v2)|
  double margin = 0.0;   // |pi_t theta| - |2 w(theta, a_hat + v1 + v2)|
  bool vacuous = true;
  bool violated = false;
};

/// Evaluates one trial from its data (theta, a_hat, t1, t2, s1, s2, r).
TubeTrial evaluate_tube_trial(TubeTrial trial, int n, int m);

ExperimentReport cmd_tubes_lemma(const TubesOptions& opts);

struct ProjectionOptions {
  int n = 1;
  int m = 1;
  double box_scale = 1.0;
  std::size_t trials = 100000;  // N; the stability check also draws 10 N
  std::uint64_t seed = 1;
};

/// heis_dist(pv(a), pv(b)) / heis_dist(a, b) for a = (v, 0), b = a * (delta Jv, 0).
double heisenberg_projection_ratio(const HorizontalSubgroup& V, double delta);

ExperimentReport cmd_projection(const ProjectionOptions& opts);

struct BetaOptions {
  std::string formula = "fig1";  // main|euclidean|foliation|construction|fig1|fig2|fig3
  int n = 1;
  int m = 1;
  double p = 6.0;
  int points = 101;
};

std::vector<bounds::CurveSeries> beta_series(const BetaOptions& opts);
ExperimentReport cmd_beta(const BetaOptions& opts, const std::vector<bounds::CurveSeries>& series);
/// Columns alpha,beta,series; rows per series in increasing alpha.
void write_curves_csv(std::ostream& out, const std::vector<bounds::CurveSeries>& series);
Json curves_json(const std::vector<bounds::CurveSeries>& series);

struct DistortOptions {
  double p = 6.0;
  double alpha = 1.2;
  int depth = 6;
  int target_N = 2;
  std::size_t cosets = 20;
  std::size_t samples = 4096;
  std::uint64_t seed = 1;
  std::size_t seeds = 1;  // runs seed, seed+1, ...
};

/// Image cloud {f(a(s_k))}, s_k = k/(samples-1), of the coset through `base`.
PointCloud coset_image(construction::LocalMap& map, const HPoint& base, std::size_t samples);

/// Estimator settings used for image clouds: r_max = diameter/4,
/// r_min = 4 x median spacing of consecutive samples, 12 levels.
EstimateOptions image_estimate_options(const PointCloud& cloud);

/// Image-dimension estimate of one coset; degenerate clouds give value 0.
DimensionEstimate image_dimension(const PointCloud& cloud);

/// True iff the empirical CDF of `upper` lies below that of `lower` everywhere.
bool stochastically_dominates(std::vector<double> upper, std::vector<double> lower);

ExperimentReport cmd_distort(const DistortOptions& opts);

struct SobolevOptions {
  double p = 6.0;
  double alpha = 1.2;
  int depth = 5;
  std::size_t mc_samples = 200000;
  std::uint64_t seed = 1;
};

ExperimentReport cmd_sobolev(const SobolevOptions& opts);
/// Same, from per-level ball counts (index m-1 holds level m).
ExperimentReport sobolev_report(const construction::IFSParams& params, const std::vector<std::uint64_t>& counts,
                                std::size_t mc_samples, std::uint64_t seed);

struct StructureOptions {
  double p = 6.0;
  double alpha = 1.2;
  int depth = 5;
  std::uint64_t seed = 1;
  std::size_t overlap_queries = 20000;
  std::size_t mc_samples = 200000;
};

/// Ball counts, exact net separation, sibling-column separation, overlap and
/// level Sobolev norms. Uses one column per level (all columns of a level
/// share their lattice net) and on-demand columns for overlap queries, so the
/// map is never materialised.
ExperimentReport structure_report(const StructureOptions& opts);

}  // namespace heis::experiments
