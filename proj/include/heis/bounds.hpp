#pragma once

#include <string>
#include <vector>

#include "heis/core.hpp"

namespace heis::bounds {

/// (n, m, p, alpha) for the Heisenberg bound; validated on use.
struct BoundQuery {
  int n = 1;
  int m = 1;
  double p = 0.0;
  double alpha = 0.0;
};

/// Knot pm/(p-2) where the Heisenberg bound switches branch.
double knot(int m, double p);
/// Right end pm/(p - (2n+2-m)) of the admissible alpha interval.
double main_alpha_max(int n, int m, double p);

/// Piecewise upper bound on the Euclidean dimension of the set of cosets of
/// an m-dimensional horizontal subgroup of H^n whose image has dimension >= alpha:
///   (2n+1-m) - (p/2)(1 - m/alpha)   on [m, pm/(p-2)]
///   (2n+2-m) -  p   (1 - m/alpha)   on [pm/(p-2), pm/(p-(2n+2-m))]
double beta_main(const BoundQuery& q);

/// The two branches without domain checks, for continuity tests at the knot.
double beta_main_lower_branch(int n, int m, double p, double alpha);
double beta_main_upper_branch(int n, int m, double p, double alpha);

/// Euclidean counterpart (n-m) - p(1 - m/alpha) on [m, pm/(p-(n-m))], p > n.
double beta_euclidean(int n, int m, double p, double alpha);

/// Universal image-dimension bound ps/(p-(2n+2-s)) on H^n.
double universal_alpha_heis(int n, double p, double s);
/// Universal image-dimension bound ps/(p-(n-s)) on R^n.
double universal_alpha_eucl(int n, double p, double s);

/// Foliation bound (Q-s) - p(1 - s/alpha) for alpha in (s, ps/(p-Q+s)].
double beta_foliation(double Q, double s, double p, double alpha);
/// ((2n+1)-m) - p(1 - (m+1)/alpha): the foliation bound at Q = 2n+2, s = m+1.
double beta_foliation_heis(int n, int m, double p, double alpha);

/// Dimension 2 - p(1 - 1/alpha) of the four-corner parameter set, p > 4,
/// alpha in (1, p/(p-2)).
double construction_beta(double p, double alpha);

enum class Formula { Main, Euclidean, Foliation, Construction };

std::string to_string(Formula f);
Formula formula_from_string(const std::string& s);

struct CurveParams {
  int n = 1;
  int m = 1;
  double p = 6.0;
  /// Accept p = 2n+2 for the main and foliation curves. The bounds need
  /// p > 2n+2, but the closed forms stay finite there; figure data plotted
  /// at the critical exponent uses this.
  bool allow_critical_p = false;
};

struct CurveSeries {
  Formula formula = Formula::Main;
  CurveParams params;
  std::string label;
  std::vector<double> alpha;
  std::vector<double> beta;
};

/// Admissible alpha interval [lo, hi] of a formula (closure of its domain).
std::pair<double, double> alpha_interval(Formula f, const CurveParams& params);

/// `count` evenly spaced alphas over the closed domain, with the knot of the
/// main bound inserted exactly. Open endpoints of the construction and
/// foliation formulas are filled with their one-sided limits.
CurveSeries sample_curve(Formula f, const CurveParams& params, int count);

}  // namespace heis::bounds
