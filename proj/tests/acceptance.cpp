// Acceptance run: one PASS/FAIL line per criterion, with its measured values
// and runtime against the runtime limit. Exit code 1 if any criterion fails.
//
// Figure CSVs are written to ./acceptance_out (or the directory in argv[1])
// and re-read from disk for criterion 8.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "heis/experiments.hpp"
#include "heis/thresholds.hpp"

using namespace heis;
namespace ex = heis::experiments;
namespace th = heis::thresholds;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

std::string failed_checks(const ex::ExperimentReport& rep) {
  std::string out;
  for (const auto& c : rep.checks) {
    if (!c.pass) out += " [" + c.name + " = " + fmt(c.value, 6) + "]";
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome formula_anchors() {
  double worst_knot = 0.0, worst_end = 0.0, worst_cont = 0.0, worst_fol = 0.0;
  int grid = 0;
  for (int n = 1; n <= 4; ++n) {
    for (int m = 1; m <= n; ++m) {
      for (int k = 0; k < 10; ++k) {
        const double p = 2.0 * n + 2.0 + 0.25 + 1.7 * k;
        const double knot = bounds::knot(m, p);
        const double hi = bounds::main_alpha_max(n, m, p);
        worst_knot = std::max(worst_knot, std::abs(bounds::beta_main({n, m, p, knot}) - (2.0 * n - m)));
        worst_end = std::max(worst_end, std::abs(bounds::beta_main({n, m, p, hi})));
        worst_cont = std::max(worst_cont, std::abs(bounds::beta_main_lower_branch(n, m, p, knot) -
                                                   bounds::beta_main_upper_branch(n, m, p, knot)));
        const double Q = 2.0 * n + 2.0, s = m + 1.0;
        const double fhi = p * s / (p - Q + s);
        for (int j = 1; j <= 20; ++j) {
          const double a = s + (fhi - s) * j / 20.0;
          worst_fol = std::max(worst_fol, std::abs(bounds::beta_foliation(Q, s, p, a) -
                                                   bounds::beta_foliation_heis(n, m, p, a)));
        }
        ++grid;
      }
    }
  }
  const double tol = 1e-12;
  Outcome o;
  o.pass = grid == 100 && worst_knot <= tol && worst_end <= tol && worst_cont <= tol && worst_fol <= tol;
  o.detail = "grid " + std::to_string(grid) + ", max |knot - (2n-m)| " + fmt(worst_knot) + ", max |endpoint| " +
             fmt(worst_end) + ", max branch jump " + fmt(worst_cont) + ", max foliation gap " + fmt(worst_fol);
  return o;
}

Outcome group_metric() {
  ex::AxiomsOptions opts;
  opts.trials = 100000;
  Outcome o{true, ""};
  for (int n = 1; n <= 2; ++n) {
    opts.n = n;
    const auto rep = ex::cmd_axioms(opts);
    o.pass = o.pass && rep.pass();
    double worst = 0.0;
    std::string worst_name;
    for (const auto& c : rep.checks) {
      if (c.value / c.threshold >= worst) {
        worst = c.value / c.threshold;
        worst_name = c.name;
      }
    }
    o.detail += (n > 1 ? "; " : "") + std::string("n=") + std::to_string(n) + ": 7 invariants x 1e5 trials, " +
                "largest residual/tolerance " + fmt(worst, 3) + " (" + worst_name + ")" + failed_checks(rep);
  }
  return o;
}

Outcome split_projection() {
  ex::ProjectionOptions opts;
  const auto rep = ex::cmd_projection(opts);
  const auto& s = rep.summary;
  Outcome o;
  o.pass = rep.pass();
  o.detail = "split max rel " + fmt(s["split_round_trip_max"].get<double>()) + ", euclidean sup " +
             fmt(s["euclidean_sup_N"].get<double>()) + " -> " + fmt(s["euclidean_sup_10N"].get<double>()) +
             ", heisenberg ratio " + fmt(s["heisenberg_ratio_coarse"].get<double>()) + " -> " +
             fmt(s["heisenberg_ratio_fine"].get<double>()) + failed_checks(rep);
  return o;
}

Outcome tubes() {
  ex::TubesOptions opts;
  opts.keep_records = false;
  const auto rep = ex::cmd_tubes_lemma(opts);
  const auto nv = rep.summary["non_vacuous"].get<std::size_t>();
  const auto viol = rep.summary["violations"].get<std::size_t>();
  Outcome o;
  o.pass = rep.pass() && nv >= 10000 && viol == 0;
  o.detail = std::to_string(opts.trials) + " trials, " + std::to_string(nv) + " non-vacuous, " +
             std::to_string(viol) + " violations, max |t1-t2|/r^2 " +
             fmt(rep.summary["max_gap_over_r2"].get<double>()) + failed_checks(rep);
  return o;
}

Outcome calibration() {
  const std::size_t M = 4096;
  auto segment = [&](Metric tag, bool vertical, std::size_t count) {
    PointCloud c(MetricSel{tag, 0}, 3);
    for (std::size_t i = 0; i < count; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(count - 1);
      c.add(vertical ? HPoint(0, 0, u) : HPoint(u, 0, 0));
    }
    return c;
  };
  // The estimator settings of the distortion experiment, applied to known sets.
  auto est = [](const PointCloud& c) { return estimate_dim(c, ex::image_estimate_options(c)).value; };

  const double seg_h = est(segment(Metric::Heisenberg, false, M));
  const double seg_e = est(segment(Metric::EuclideanAmbient, false, M));
  const double t_axis = est(segment(Metric::Heisenberg, true, 65536));
  const double corner = est(construction::four_corner_cloud(construction::make_params(6.0, 1.2, 8)));

  const double exact = 8.0 / 3.0;
  std::vector<double> errs;
  for (std::size_t m : {1000, 2000, 4000, 8000}) {
    errs.push_back(std::abs(riesz_energy(segment(Metric::EuclideanAmbient, false, m), 0.5).value - exact) / exact);
  }
  bool shrinking = true;
  for (std::size_t k = 1; k < errs.size(); ++k) shrinking = shrinking && errs[k] < errs[k - 1];

  Outcome o;
  o.pass = std::abs(seg_h - 1.0) <= th::kDimTol && std::abs(seg_e - 1.0) <= th::kDimTol &&
           std::abs(t_axis - 2.0) <= th::kDimTolTwo && std::abs(corner - 1.0) <= th::kDimTol && shrinking &&
           errs.back() <= 0.10;
  o.detail = "segment " + fmt(seg_h) + " (heis) " + fmt(seg_e) + " (eucl), t-axis " + fmt(t_axis) +
             ", four-corner depth 8 " + fmt(corner) + ", riesz rel error M=1000..8000: " + fmt(errs[0], 3) + " " +
             fmt(errs[1], 3) + " " + fmt(errs[2], 3) + " " + fmt(errs[3], 3);
  return o;
}

Outcome structure() {
  const auto rep = ex::structure_report({});
  std::string ratios, overlaps;
  for (const auto& r : rep.records) {
    ratios += (ratios.empty() ? "" : " ") + fmt(r["count_ratio"].get<double>(), 4);
    overlaps += (overlaps.empty() ? "" : " ") + std::to_string(r["max_overlap"].get<std::size_t>());
  }
  std::string sob;
  for (const auto& r : rep.summary["sobolev"]) {
    if (r.contains("ratio_to_previous")) sob += (sob.empty() ? "" : " ") + fmt(r["ratio_to_previous"].get<double>(), 4);
  }
  Outcome o;
  o.pass = rep.pass();
  o.detail = "count ratios " + ratios + "; close pairs 0 required; max overlap per level " + overlaps +
             " (bound " + fmt(th::kOverlapBound) + "); sobolev ratios " + sob + failed_checks(rep);
  return o;
}

Outcome distortion() {
  ex::DistortOptions opts;
  opts.seeds = 3;
  const auto rep = ex::cmd_distort(opts);
  std::string meds;
  for (const auto& s : rep.summary["per_seed"]) {
    meds += (meds.empty() ? "" : " ") + fmt(s["median_estimate"].get<double>(), 4) +
            (s["dominates_controls"].get<bool>() ? "" : " (no dominance)");
  }
  Outcome o;
  o.pass = rep.pass();
  o.detail = "p=6 alpha=1.2 depth 6, 20 cosets x 4096 samples, seeds 1-3: medians " + meds + " (need >= " +
             fmt(th::kImageDimMedian) + ")" + failed_checks(rep);
  return o;
}

struct CsvRow {
  double alpha;
  double beta;
  std::string series;
};

std::vector<CsvRow> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  if (line != "alpha,beta,series") throw std::runtime_error("bad header in " + p.string());
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string a, b, s;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, s);
    rows.push_back({std::stod(a), std::stod(b), s});
  }
  return rows;
}

Outcome figures(const fs::path& dir) {
  struct Fig {
    std::string name;
    ex::BetaOptions opts;
  };
  std::vector<Fig> figs(3);
  figs[0] = {"fig1", {}};
  figs[1] = {"fig2", {}};
  figs[1].opts.formula = "fig2";
  figs[2] = {"fig3", {}};
  figs[2].opts.formula = "fig3";
  figs[2].opts.n = 2;

  fs::create_directories(dir);
  Outcome o{true, ""};
  for (const auto& f : figs) {
    const fs::path path = dir / (f.name + ".csv");
    {
      std::ofstream out(path);
      ex::write_curves_csv(out, ex::beta_series(f.opts));
    }
    const auto rows = read_csv(path);
    std::map<std::string, std::vector<CsvRow>> by_series;
    for (const auto& r : rows) by_series[r.series].push_back(r);

    bool monotone = true;
    for (const auto& [name, rs] : by_series) {
      for (std::size_t k = 1; k < rs.size(); ++k) monotone = monotone && rs[k].beta <= rs[k - 1].beta;
    }
    // The main series must hold its knot row and its zero endpoint row exactly.
    const int n = f.opts.n, m = f.opts.m;
    const double p = f.opts.p;
    bool knot_row = false, end_row = false;
    for (const auto& r : by_series["main"]) {
      knot_row = knot_row || (r.alpha == bounds::knot(m, p) && std::abs(r.beta - (2.0 * n - m)) <= 1e-12);
      end_row = end_row || (std::abs(r.alpha - bounds::main_alpha_max(n, m, p)) <= 1e-12 && std::abs(r.beta) <= 1e-12);
    }
    const bool ok = monotone && knot_row && end_row;
    o.pass = o.pass && ok;
    o.detail += (o.detail.empty() ? "" : "; ") + f.name + ": " + std::to_string(by_series.size()) + " series, " +
                std::to_string(rows.size()) + " rows" + (monotone ? "" : ", NOT monotone") +
                (knot_row ? "" : ", knot row missing") + (end_row ? "" : ", endpoint row missing");
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out_dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  struct Criterion {
    int id;
    std::string title;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "formula anchors", 1.0, formula_anchors},
      {2, "group and metric identities", 10.0, group_metric},
      {3, "split and projections", 30.0, split_projection},
      {4, "tubes lemma", 30.0, tubes},
      {5, "dimension estimator calibration", 120.0, calibration},
      {6, "construction structure", 300.0, structure},
      {7, "distortion experiment", 900.0, distortion},
      {8, "figure data", 1.0, [&] { return figures(out_dir); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::cout << "criterion " << c.id << " " << (pass ? "PASS" : "FAIL") << "  " << c.title << ": " << o.detail
              << "  [" << std::fixed << std::setprecision(2) << secs << " s, limit " << std::setprecision(0)
              << c.limit_s << " s" << (in_time ? "" : ", OVER LIMIT") << "]" << std::defaultfloat << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed"))
            << std::endl;
  return failed ? 1 : 0;
}
