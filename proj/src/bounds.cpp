#include "heis/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace heis::bounds {

namespace {

[[noreturn]] void fail(const std::string& what) { throw DomainError(what); }

std::string str(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Endpoints are computed by the same expressions everywhere, so exact
// comparisons suffice; the slack only absorbs user-supplied decimals.
bool leq(double a, double b) { return a <= b + 1e-14 * std::max(1.0, std::abs(b)); }

void check_nm(int n, int m) {
  if (n < 1) fail("n must be >= 1");
  if (m < 1 || m > n) fail("m must satisfy 1 <= m <= n (m=" + std::to_string(m) + ")");
}

double construction_unchecked(double p, double alpha) { return 2.0 - p * (1.0 - 1.0 / alpha); }

double foliation_unchecked(double Q, double s, double p, double alpha) {
  return (Q - s) - p * (1.0 - s / alpha);
}

}  // namespace

double knot(int m, double p) { return p * m / (p - 2.0); }

double main_alpha_max(int n, int m, double p) { return p * m / (p - (2.0 * n + 2.0 - m)); }

double beta_main_lower_branch(int n, int m, double p, double alpha) {
  return (2.0 * n + 1.0 - m) - 0.5 * p * (1.0 - m / alpha);
}

double beta_main_upper_branch(int n, int m, double p, double alpha) {
  return (2.0 * n + 2.0 - m) - p * (1.0 - m / alpha);
}

double beta_main(const BoundQuery& q) {
  check_nm(q.n, q.m);
  const double Q = 2.0 * q.n + 2.0;
  if (!(q.p > Q)) fail("beta_main: p must exceed 2n+2 = " + str(Q));
  const double hi = main_alpha_max(q.n, q.m, q.p);
  if (!(leq(q.m, q.alpha) && leq(q.alpha, hi))) {
    fail("beta_main: alpha=" + str(q.alpha) + " outside [m, pm/(p-(2n+2-m))] = [" + str(q.m) + ", " +
         str(hi) + "]");
  }
  if (q.alpha <= knot(q.m, q.p)) return beta_main_lower_branch(q.n, q.m, q.p, q.alpha);
  return beta_main_upper_branch(q.n, q.m, q.p, q.alpha);
}

double beta_euclidean(int n, int m, double p, double alpha) {
  check_nm(n, m);
  if (!(p > n)) fail("beta_euclidean: p must exceed n");
  const double hi = p * m / (p - (n - m));
  if (!(leq(m, alpha) && leq(alpha, hi))) {
    fail("beta_euclidean: alpha=" + str(alpha) + " outside [m, pm/(p-(n-m))] = [" + str(m) + ", " +
         str(hi) + "]");
  }
  return (n - m) - p * (1.0 - m / alpha);
}

double universal_alpha_heis(int n, double p, double s) {
  if (n < 1) fail("n must be >= 1");
  const double Q = 2.0 * n + 2.0;
  if (!(p > Q)) fail("universal_alpha_heis: p must exceed 2n+2");
  if (!(s >= 0.0 && s < Q)) fail("universal_alpha_heis: need 0 <= s < 2n+2");
  return p * s / (p - (Q - s));
}

double universal_alpha_eucl(int n, double p, double s) {
  if (n < 1) fail("n must be >= 1");
  if (!(p > n)) fail("universal_alpha_eucl: p must exceed n");
  if (!(s >= 0.0 && s < n)) fail("universal_alpha_eucl: need 0 <= s < n");
  return p * s / (p - (n - s));
}

double beta_foliation(double Q, double s, double p, double alpha) {
  if (!(0.0 < s && s < Q && Q < p)) fail("beta_foliation: need 0 < s < Q < p");
  const double hi = p * s / (p - Q + s);
  if (!(alpha > s && leq(alpha, hi))) {
    fail("beta_foliation: alpha=" + str(alpha) + " outside (s, ps/(p-Q+s)] = (" + str(s) + ", " +
         str(hi) + "]");
  }
  return foliation_unchecked(Q, s, p, alpha);
}

double beta_foliation_heis(int n, int m, double p, double alpha) {
  check_nm(n, m);
  return ((2.0 * n + 1.0) - m) - p * (1.0 - (m + 1.0) / alpha);
}

double construction_beta(double p, double alpha) {
  if (!(p > 4.0)) fail("construction_beta: p must exceed 4");
  const double hi = p / (p - 2.0);
  if (!(alpha > 1.0 && alpha < hi)) {
    fail("construction_beta: alpha=" + str(alpha) + " outside (1, p/(p-2)) = (1, " + str(hi) + ")");
  }
  return construction_unchecked(p, alpha);
}

std::string to_string(Formula f) {
  switch (f) {
    case Formula::Main: return "main";
    case Formula::Euclidean: return "euclidean";
    case Formula::Foliation: return "foliation";
    case Formula::Construction: return "construction";
  }
  return "?";
}

Formula formula_from_string(const std::string& s) {
  if (s == "main") return Formula::Main;
  if (s == "euclidean") return Formula::Euclidean;
  if (s == "foliation") return Formula::Foliation;
  if (s == "construction") return Formula::Construction;
  fail("unknown formula '" + s + "'");
}

std::pair<double, double> alpha_interval(Formula f, const CurveParams& c) {
  switch (f) {
    case Formula::Main:
      check_nm(c.n, c.m);
      if (!(c.p > 2.0 * c.n + 2.0 || (c.allow_critical_p && c.p == 2.0 * c.n + 2.0))) {
        fail("main: p must exceed 2n+2");
      }
      return {static_cast<double>(c.m), main_alpha_max(c.n, c.m, c.p)};
    case Formula::Euclidean:
      check_nm(c.n, c.m);
      if (!(c.p > c.n)) fail("euclidean: p must exceed n");
      return {static_cast<double>(c.m), c.p * c.m / (c.p - (c.n - c.m))};
    case Formula::Foliation: {
      check_nm(c.n, c.m);
      const double Q = 2.0 * c.n + 2.0;
      const double s = c.m + 1.0;
      if (!(c.p > Q || (c.allow_critical_p && c.p == Q))) fail("foliation: p must exceed 2n+2");
      return {s, c.p * s / (c.p - Q + s)};
    }
    case Formula::Construction:
      if (!(c.p > 4.0)) fail("construction: p must exceed 4");
      return {1.0, c.p / (c.p - 2.0)};
  }
  fail("unknown formula");
}

CurveSeries sample_curve(Formula f, const CurveParams& params, int count) {
  if (count < 2) fail("sample_curve: need at least 2 points");
  const auto [lo, hi] = alpha_interval(f, params);

  std::vector<double> alphas;
  alphas.reserve(static_cast<std::size_t>(count) + 1);
  for (int k = 0; k < count; ++k) alphas.push_back(lo + (hi - lo) * k / (count - 1));
  alphas.front() = lo;
  alphas.back() = hi;

  if (f == Formula::Main) {
    const double k = knot(params.m, params.p);
    const double snap = 1e-12 * std::max(1.0, hi);
    auto it = std::find_if(alphas.begin(), alphas.end(),
                           [&](double a) { return std::abs(a - k) <= snap; });
    if (it != alphas.end()) {
      *it = k;
    } else {
      alphas.insert(std::upper_bound(alphas.begin(), alphas.end(), k), k);
    }
  }

  CurveSeries out;
  out.formula = f;
  out.params = params;
  out.label = to_string(f);
  out.alpha = alphas;
  const double Q = 2.0 * params.n + 2.0;
  for (double a : alphas) {
    switch (f) {
      case Formula::Main:
        if (params.allow_critical_p) {
          const bool lower = a <= knot(params.m, params.p);
          out.beta.push_back(lower ? beta_main_lower_branch(params.n, params.m, params.p, a)
                                   : beta_main_upper_branch(params.n, params.m, params.p, a));
        } else {
          out.beta.push_back(beta_main({params.n, params.m, params.p, a}));
        }
        break;
      case Formula::Euclidean:
        out.beta.push_back(beta_euclidean(params.n, params.m, params.p, a));
        break;
      case Formula::Foliation:
        if (a == lo) {
          out.beta.push_back(Q - (params.m + 1.0));
        } else if (params.allow_critical_p) {
          out.beta.push_back(foliation_unchecked(Q, params.m + 1.0, params.p, a));
        } else {
          out.beta.push_back(beta_foliation(Q, params.m + 1.0, params.p, a));
        }
        break;
      case Formula::Construction:
        out.beta.push_back(a == lo || a == hi ? construction_unchecked(params.p, a)
                                              : construction_beta(params.p, a));
        break;
    }
  }
  return out;
}

}  // namespace heis::bounds
