// Command-line front end for the Heisenberg experiments.
//
//   heisdistort <axioms|tubes|projection|beta|distort|sobolev> [flags]
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 domain or usage error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "heis/experiments.hpp"
#include "heis/map_io.hpp"

namespace ex = heis::experiments;

namespace {

constexpr std::uint64_t kMaxSavedBalls = 50'000'000;

struct Flags {
  int n = 1;
  int m = 1;
  double p = 6.0;
  double alpha = 1.2;
  int depth = 5;
  std::size_t trials = 0;  // 0: command default
  std::size_t cosets = 20;
  std::size_t samples = 4096;
  std::size_t seeds = 1;
  std::uint64_t seed = 1;
  double box_scale = 1.0;
  int points = 101;
  std::string formula = "fig1";
  std::size_t mc_samples = 200000;
  std::string out;
  std::string format;
  std::string config;
  std::string save_map;
  bool timing = false;
  bool corrupt = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--seed", f.seed, "Base seed of the counter-based generator");
  sub->add_option("--out", f.out, "Write the report here instead of stdout");
  sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--config", f.config, "File of key=value lines pre-setting flags");
  sub->add_flag("--timing", f.timing, "Record wall time in the report (breaks byte-identity)");
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw CLI::ValidationError("--config", "expected key=value: " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::string csv_cell(const ex::Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    std::ostringstream s;
    s.precision(17);
    s << v.get<double>();
    return s.str();
  }
  if (v.is_array() || v.is_object()) return "\"" + v.dump() + "\"";
  return v.dump();
}

void write_records_csv(std::ostream& out, const ex::Json& records) {
  if (!records.is_array() || records.empty()) return;
  std::vector<std::string> cols;
  for (const auto& [k, v] : records.front().items()) cols.push_back(k);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : records) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << (i ? "," : "");
      if (r.contains(cols[i])) out << csv_cell(r[cols[i]]);
    }
    out << '\n';
  }
}

void emit(const Flags& f, const std::string& text) {
  if (f.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream o(f.out, std::ios::binary);
  if (!o) throw std::runtime_error("cannot write " + f.out);
  o << text;
}

int finish(const Flags& f, ex::ExperimentReport rep, double seconds) {
  if (f.timing) rep.wall_time = seconds;
  std::ostringstream s;
  if (f.format == "csv") {
    write_records_csv(s, rep.records);
  } else {
    s << rep.to_json().dump(2) << '\n';
  }
  emit(f, s.str());
  std::size_t failed = 0;
  for (const auto& c : rep.checks) {
    if (!c.pass) {
      ++failed;
      std::cerr << "FAIL " << c.name << ": " << c.value << " " << c.relation << " " << c.threshold;
      if (c.relation == "in") std::cerr << ".." << c.threshold_hi;
      std::cerr << '\n';
    }
  }
  if (!rep.counterexample.is_null()) std::cerr << "counterexample: " << rep.counterexample.dump() << '\n';
  std::cerr << rep.id << ": " << (failed ? "FAIL" : "PASS") << " (" << rep.checks.size() - failed << "/"
            << rep.checks.size() << " checks)\n";
  return failed ? 1 : 0;
}

struct Cli {
  CLI::App app{"Heisenberg group projection and dimension-distortion experiments", "heisdistort"};
  Flags f;
  std::vector<CLI::App*> subs;

  Cli() {
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    auto* ax = app.add_subcommand("axioms", "Group law and Koranyi metric identities");
    ax->add_option("--n", f.n, "Dimension n of H^n");
    ax->add_option("--trials", f.trials, "Random trials (default 100000)");
    ax->add_flag("--corrupt-group-law", f.corrupt, "Test hook: perturb the product by 1e-3 t t'")
        ->group("");
    add_common(ax, f);

    auto* tu = app.add_subcommand("tubes", "Randomized disjoint-tubes implication |t1-t2| <= 8r^2");
    tu->add_option("--n", f.n, "Dimension n of H^n");
    tu->add_option("--m", f.m, "Dimension of the horizontal subgroup");
    tu->add_option("--trials", f.trials, "Random trials (default 16000)");
    tu->add_option("--box-scale", f.box_scale, "Half-width R of the compact box");
    add_common(tu, f);

    auto* pr = app.add_subcommand("projection", "Lipschitz behaviour of the vertical projection");
    pr->add_option("--n", f.n, "Dimension n of H^n");
    pr->add_option("--m", f.m, "Dimension of the horizontal subgroup");
    pr->add_option("--trials", f.trials, "Pairs N for the Euclidean constant (default 100000)");
    pr->add_option("--box-scale", f.box_scale, "Half-width R of the compact box");
    add_common(pr, f);

    auto* be = app.add_subcommand("beta", "Dimension-distortion curves (figure data)");
    be->add_option("--formula", f.formula, "main|euclidean|foliation|construction|fig1|fig2|fig3");
    be->add_option("--n", f.n, "Dimension n of H^n");
    be->add_option("--m", f.m, "Dimension of the horizontal subgroup");
    be->add_option("--p", f.p, "Sobolev exponent");
    be->add_option("--points", f.points, "Evenly spaced alphas per series");
    add_common(be, f);

    auto* di = app.add_subcommand("distort", "Image dimension of cosets under the random mapping");
    di->add_option("--p", f.p, "Sobolev exponent");
    di->add_option("--alpha", f.alpha, "Target dimension alpha");
    di->add_option("--depth", f.depth, "Truncation depth");
    di->add_option("--cosets", f.cosets, "Cosets per seed");
    di->add_option("--samples", f.samples, "Samples per coset");
    di->add_option("--seeds", f.seeds, "Number of consecutive seeds");
    add_common(di, f);

    auto* so = app.add_subcommand("sobolev", "Level-wise Sobolev norms of the random mapping");
    so->add_option("--p", f.p, "Sobolev exponent");
    so->add_option("--alpha", f.alpha, "Target dimension alpha");
    so->add_option("--depth", f.depth, "Truncation depth");
    so->add_option("--samples", f.mc_samples, "Monte Carlo samples for the ball volume");
    so->add_option("--save-map", f.save_map, "Also write the built map to this file");
    add_common(so, f);

    subs = {ax, tu, pr, be, di, so};
  }
};

int run(Cli& cli) {
  Flags& f = cli.f;
  const auto t0 = std::chrono::steady_clock::now();
  auto seconds = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  const std::string cmd = cli.app.get_subcommands().front()->get_name();

  if (cmd == "axioms") {
    ex::AxiomsOptions o;
    o.n = f.n;
    o.seed = f.seed;
    if (f.trials) o.trials = f.trials;
    if (f.corrupt) {
      o.product = [](const heis::HPoint& a, const heis::HPoint& b) {
        heis::HPoint c = heis::multiply(a, b);
        std::vector<double> z(c.z().begin(), c.z().end());
        return heis::HPoint(z, c.t() + 1e-3 * a.t() * b.t());
      };
    }
    return finish(f, ex::cmd_axioms(o), seconds());
  }
  if (cmd == "tubes") {
    ex::TubesOptions o;
    o.n = f.n;
    o.m = f.m;
    o.seed = f.seed;
    o.box_scale = f.box_scale;
    if (f.trials) o.trials = f.trials;
    return finish(f, ex::cmd_tubes_lemma(o), seconds());
  }
  if (cmd == "projection") {
    ex::ProjectionOptions o;
    o.n = f.n;
    o.m = f.m;
    o.seed = f.seed;
    o.box_scale = f.box_scale;
    if (f.trials) o.trials = f.trials;
    return finish(f, ex::cmd_projection(o), seconds());
  }
  if (cmd == "beta") {
    ex::BetaOptions o;
    o.formula = f.formula;
    o.n = f.n;
    o.m = f.m;
    o.p = f.p;
    o.points = f.points;
    const auto series = ex::beta_series(o);
    auto rep = ex::cmd_beta(o, series);
    if (f.format.empty() || f.format == "csv") {
      std::ostringstream s;
      ex::write_curves_csv(s, series);
      emit(f, s.str());
      std::size_t failed = 0;
      for (const auto& c : rep.checks) failed += !c.pass;
      return failed ? 1 : 0;
    }
    return finish(f, rep, seconds());
  }
  if (cmd == "distort") {
    ex::DistortOptions o;
    o.p = f.p;
    o.alpha = f.alpha;
    o.depth = f.depth;
    o.cosets = f.cosets;
    o.samples = f.samples;
    o.seed = f.seed;
    o.seeds = f.seeds;
    return finish(f, ex::cmd_distort(o), seconds());
  }
  ex::SobolevOptions o;
  o.p = f.p;
  o.alpha = f.alpha;
  o.depth = f.depth;
  o.mc_samples = f.mc_samples;
  o.seed = f.seed;
  auto rep = ex::cmd_sobolev(o);
  if (!f.save_map.empty()) {
    const auto params = heis::construction::make_params(o.p, o.alpha, o.depth);
    std::uint64_t total = 0;
    for (const auto& r : rep.records) total += r["balls"].get<std::uint64_t>();
    if (total > kMaxSavedBalls) {
      throw heis::DomainError("--save-map: " + std::to_string(total) + " balls exceed the limit of " +
                              std::to_string(kMaxSavedBalls) + "; lower --depth");
    }
    heis::construction::save_map(f.save_map, heis::construction::build_map(params, o.seed));
  }
  return finish(f, rep, seconds());
}

}  // namespace

int parse_or_exit(Cli& cli, std::vector<std::string> args, int& code) {
  try {
    std::reverse(args.begin(), args.end());
    cli.app.parse(args);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int rc = cli.app.exit(e);
    code = rc == 0 ? 0 : 2;
    return 1;
  }
}

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    Cli first;
    int code = 0;
    if (parse_or_exit(first, args, code)) return code;
    if (first.f.config.empty()) return run(first);

    // Re-parse with the config entries placed before the user's flags; the
    // last occurrence of an option wins, so explicit flags override the file.
    CLI::App* sub = first.app.get_subcommands().front();
    std::vector<std::string> merged{sub->get_name()};
    for (const auto& [key, value] : read_config(first.f.config)) {
      const CLI::Option* opt = sub->get_option_no_throw("--" + key);
      if (opt == nullptr) {
        std::cerr << "usage error: unknown config key for " << sub->get_name() << ": " << key << '\n';
        return 2;
      }
      if (opt->get_type_size() == 0) {
        if (value == "true" || value == "1") merged.push_back("--" + key);
      } else {
        merged.push_back("--" + key);
        merged.push_back(value);
      }
    }
    bool skip_sub = true;
    for (const auto& a : args) {
      if (skip_sub && a == sub->get_name()) {
        skip_sub = false;
        continue;
      }
      merged.push_back(a);
    }
    Cli second;
    if (parse_or_exit(second, merged, code)) return code;
    return run(second);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const heis::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
