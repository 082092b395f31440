// Command line front end: experiment presets, forward solves, inversions,
// noise sweeps, diagnostics, and the acceptance suite.
//
// Exit codes: 0 success, 1 a check or run failed, 2 configuration error.

#include "CLI11.hpp"

#include "acceptance.hpp"
#include "csv.hpp"
#include "runner.hpp"

#include <degenid/diagnostics.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

namespace app = degenid::app;
using degenid::Vector;

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;

// Bad configuration (unknown preset, malformed or missing value, inconsistent
// spec) exits 2; failures during an otherwise well-formed run exit 1.
template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::logic_error& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    return kExitConfigError;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitCheckFailed;
  }
}

// Leftover "--key value" (or "--key=value") tokens become config overrides.
app::Config overrides_from(const std::vector<std::string>& extras) {
  app::Config cfg;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string token = extras[i];
    if (token.rfind("--", 0) != 0)
      throw std::invalid_argument("expected an override of the form --key value, got '" + token +
                                  "'");
    token = token.substr(2);
    const auto eq = token.find('=');
    if (eq != std::string::npos) {
      cfg.set(token.substr(0, eq), token.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size())
        throw std::invalid_argument("override --" + token + " is missing its value");
      cfg.set(token, extras[++i]);
    }
  }
  return cfg;
}

// Options shared by the config-driven subcommands; resolution order is
// preset, then config file, then named flags, then --key value overrides.
struct RunOptions {
  CLI::App* sub = nullptr;
  std::string preset, config_path, out;
  int nx = 0, nt = 0;
  double ell = 0.0, t0 = 0.0;
  std::string noise;
  std::uint64_t seed = 0;

  void attach(CLI::App* s) {
    sub = s;
    s->allow_extras();
    s->add_option("--preset,-p", preset, "built-in preset (test1..test14 or custom)");
    s->add_option("--config,-c", config_path, "config file (flat key = value lines)");
    s->add_option("--out,-o", out, "output directory");
    s->add_option("--nx", nx, "interior space nodes");
    s->add_option("--nt", nt, "time steps");
    s->add_option("--ell", ell, "domain length");
    s->add_option("--t0", t0, "interior observation time");
    s->add_option("--noise", noise, "comma separated noise levels");
    s->add_option("--seed", seed, "noise seed");
  }

  app::Config resolve() const {
    app::Config cfg;
    bool have = false;
    if (sub->count("--preset") != 0) {
      cfg = app::preset_config(preset);
      have = true;
    }
    if (sub->count("--config") != 0) {
      cfg.merge(app::Config::load(config_path));
      have = true;
    }
    if (!have) throw std::invalid_argument("need --preset or --config");
    if (sub->count("--nx") != 0) cfg.set("nx", nx);
    if (sub->count("--nt") != 0) cfg.set("nt", nt);
    if (sub->count("--ell") != 0) cfg.set("ell", ell);
    if (sub->count("--t0") != 0) cfg.set("t0", t0);
    if (sub->count("--noise") != 0) cfg.set("noise_levels", noise);
    if (sub->count("--seed") != 0) {
      // presets pin their own seed list, so the flag has to override both keys
      cfg.set("seed", std::to_string(seed));
      cfg.set("seeds", std::to_string(seed));
    }
    cfg.merge(overrides_from(sub->remaining()));
    return cfg;
  }

  std::string out_dir(const std::string& tag, const app::Config& cfg) const {
    if (!out.empty()) return out;
    return "runs/" + tag + "-" + cfg.get("name", "custom");
  }
};

std::string joined_params(const Vector<double>& p) {
  std::string s;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (k) s += ", ";
    s += app::format_double(p[k]);
  }
  return s;
}

int cmd_forward(const RunOptions& opts) {
  const app::Config cfg = opts.resolve();
  const app::ForwardReport rep = app::run_forward(cfg, opts.out_dir("forward", cfg));
  std::printf("forward solve written to %s\n", rep.out_dir.c_str());
  if (rep.checked_dissipativity) {
    std::printf("dissipativity: %s (max growth %.3g)\n", rep.dissipative ? "ok" : "VIOLATED",
                rep.max_growth);
    if (!rep.dissipative) return kExitCheckFailed;
  }
  return kExitSuccess;
}

int cmd_invert(const RunOptions& opts) {
  const app::Config cfg = opts.resolve();
  const app::ExperimentReport rep = app::run_experiment(cfg, opts.out_dir("invert", cfg));
  std::printf("%s: recovered [%s]\n", rep.name.c_str(), joined_params(rep.params).c_str());
  std::printf("  truth     [%s], max error %.3g\n", joined_params(rep.truth).c_str(),
              rep.max_param_error);
  std::printf("  cost %.6g after %d iterations (%s), %.2f s\n", rep.cost, rep.iterations,
              rep.termination.c_str(), rep.wall_seconds);
  if (rep.low_sensitivity_warning)
    std::printf("  warning: the observation barely depends on the parameters (weighted gradient "
                "energy below 1e-8), so the gradient vanishes and the result stays at the "
                "initial guess\n");
  std::printf("  artifacts in %s\n", rep.out_dir.c_str());
  if (rep.has_tol) {
    std::printf("  tolerance check: %s\n", rep.pass ? "pass" : "FAIL");
    if (!rep.pass) return kExitCheckFailed;
  }
  return kExitSuccess;
}

int cmd_noise_sweep(const RunOptions& opts) {
  const app::Config cfg = opts.resolve();
  const std::string dir = opts.out_dir("noise-sweep", cfg);
  const app::Problem pb = app::problem_from_config(cfg);
  std::vector<double> levels = {0.01, 0.001, 0.0001, 0.00001, 0.0};
  if (cfg.has("noise_levels")) levels = cfg.get_doubles("noise_levels");
  std::vector<std::uint64_t> seeds = {cfg.get_u64("seed", 1)};
  if (cfg.has("seeds")) seeds = cfg.get_u64s("seeds");

  const auto rows = degenid::noise_sweep(pb.spec, levels, seeds);
  std::filesystem::create_directories(dir);
  app::table_csv(rows, pb.param_names).save(dir + "/table.csv");

  std::printf("%-10s %-6s %-14s %-4s params\n", "noise %", "seed", "cost", "it");
  for (const auto& row : rows)
    std::printf("%-10g %-6llu %-14.6g %-4d [%s]\n", row.level * 100.0,
                static_cast<unsigned long long>(row.seed), row.cost, row.iterations,
                joined_params(row.params).c_str());
  for (const double level : levels) {
    std::vector<double> errs;
    for (const auto& row : rows)
      if (row.level == level) errs.push_back((row.params - pb.truth).cwiseAbs().maxCoeff());
    std::sort(errs.begin(), errs.end());
    const double med = errs.size() % 2 == 1
                           ? errs[errs.size() / 2]
                           : 0.5 * (errs[errs.size() / 2 - 1] + errs[errs.size() / 2]);
    std::printf("level %g%%: median max-error %.3g over %zu seeds\n", level * 100.0, med,
                errs.size());
  }
  std::printf("table written to %s/table.csv\n", dir.c_str());
  return kExitSuccess;
}

int cmd_stability(const RunOptions& opts, int trials, double eps_max) {
  const app::Config cfg = opts.resolve();
  if (cfg.get("obs", "interior") != "interior")
    throw std::invalid_argument("stability quotients need an interior-data preset");
  if (degenid::family_dim(app::family_by_name(cfg.get("family"))) != 1)
    throw std::invalid_argument("stability quotients need a one-parameter family");
  const app::Problem pb = app::problem_from_config(cfg);
  const std::uint64_t seed = opts.sub->count("--seed") != 0 ? opts.seed : 7;
  const auto q = degenid::stability_quotients(pb.spec, pb.truth[0], trials, eps_max, seed);

  std::printf("stability quotients, %d trials, eps in (0, %g], seed %llu\n", trials, eps_max,
              static_cast<unsigned long long>(seed));
  std::printf("  median %.4g, max %.4g, max/median %.3f, all finite: %s\n", q.median, q.max,
              q.max / q.median, q.all_finite ? "yes" : "no");
  if (!opts.out.empty()) {
    std::filesystem::create_directories(opts.out);
    app::CsvTable t({"trial", "quotient"});
    for (Eigen::Index j = 0; j < q.quotients.size(); ++j) {
      t.begin_row();
      t.add(int(j));
      t.add(q.quotients[j]);
    }
    t.save(opts.out + "/quotients.csv");
    std::printf("  quotients written to %s/quotients.csv\n", opts.out.c_str());
  }
  const bool pass = q.all_finite && q.max / q.median <= 20.0;
  std::printf("  bounded (max/median <= 20): %s\n", pass ? "pass" : "FAIL");
  return pass ? kExitSuccess : kExitCheckFailed;
}

int cmd_poincare(CLI::App* sub, double ell, int samples, std::uint64_t seed,
                 const std::string& out) {
  app::Config cfg;
  cfg.set("alphas", "0,0.5,1,1.3,1.9");
  cfg.merge(overrides_from(sub->remaining()));

  bool all_pass = true;
  app::CsvTable t({"alpha", "constant", "worst ratio", "samples", "pass"});
  for (const double alpha : cfg.get_doubles("alphas")) {
    const auto rep = degenid::verify_poincare(alpha, ell, samples, seed);
    all_pass = all_pass && rep.pass;
    std::printf("alpha %-4g ell %-5g C = %-10.6g worst ratio %-10.6g %4d samples  %s\n", alpha,
                ell, rep.constant, rep.worst_ratio, rep.samples_used, rep.pass ? "pass" : "FAIL");
    t.begin_row();
    t.add(alpha);
    t.add(rep.constant);
    t.add(rep.worst_ratio);
    t.add(rep.samples_used);
    t.add(std::string(rep.pass ? "yes" : "no"));
  }
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    t.save(out + "/poincare.csv");
    std::printf("table written to %s/poincare.csv\n", out.c_str());
  }
  return all_pass ? kExitSuccess : kExitCheckFailed;
}

int cmd_carleman(CLI::App* sub, const std::string& out) {
  app::Config cfg;
  cfg.set("theta", "0.4");
  cfg.set("delta", "0.1");
  cfg.set("lambda", "4");
  cfg.set("s_values", "10,20,40,80,160");
  cfg.merge(overrides_from(sub->remaining()));
  const double theta = cfg.get_double("theta"), delta = cfg.get_double("delta");
  const double lambda = cfg.get_double("lambda");
  const std::vector<double> s = cfg.get_doubles("s_values");

  bool all_pass = true;
  app::CsvTable t({"f", "s", "ratio"});
  const auto scan_one = [&](const char* label, auto&& f) {
    const auto scan = degenid::carleman_ratio_scan<double>(f, theta, delta, lambda, s);
    std::printf("f = %s on (%.3g, 1), weight exp(2 s phi), phi = exp(%.3g (x - %.3g)^2)\n", label,
                theta + delta, lambda, theta);
    for (Eigen::Index k = 0; k < scan.s.size(); ++k) {
      std::printf("  s = %-6g r(s) = %.6g%s\n", scan.s[k], scan.r[k],
                  k == scan.s.size() - 1 ? "  (plateau probe)" : "");
      t.begin_row();
      t.add(std::string(label));
      t.add(scan.s[k]);
      t.add(scan.r[k]);
    }
    const bool finite = scan.r.allFinite() && scan.r.minCoeff() > 0.0;
    std::printf("  plateau r(2 s_max) <= 1.2 r(s_max): %s\n",
                scan.plateau_pass && finite ? "pass" : "FAIL");
    all_pass = all_pass && scan.plateau_pass && finite;
  };
  scan_one("1-x", [](double x) { return 1.0 - x; });
  scan_one("(1-x)^2", [](double x) { return (1.0 - x) * (1.0 - x); });

  if (!out.empty()) {
    std::filesystem::create_directories(out);
    t.save(out + "/carleman.csv");
    std::printf("table written to %s/carleman.csv\n", out.c_str());
  }
  return all_pass ? kExitSuccess : kExitCheckFailed;
}

void print_criterion(const app::CriterionResult& r) {
  std::printf("C%02d %s  %s  [%.1f s]\n    %s\n", r.id, r.pass ? "PASS" : "FAIL", r.label.c_str(),
              r.seconds, r.detail.c_str());
  std::fflush(stdout);
}

int cmd_reznitskaya_check(const std::string& out) {
  const app::CriterionResult equiv = app::transform_equivalence_criterion();
  print_criterion(equiv);
  const app::CriterionResult ident = app::transform_identity_criterion();
  print_criterion(ident);
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    app::CsvTable t({"check", "pass", "detail"});
    for (const auto* r : {&equiv, &ident}) {
      t.begin_row();
      t.add(r->label);
      t.add(std::string(r->pass ? "yes" : "no"));
      t.add(r->detail);
    }
    t.save(out + "/reznitskaya.csv");
  }
  return equiv.pass && ident.pass ? kExitSuccess : kExitCheckFailed;
}

int cmd_suite(CLI::App* sub, const std::vector<std::string>& presets, const std::string& ells,
              const std::string& out, int jobs) {
  const app::Config overrides = overrides_from(sub->remaining());

  if (presets.empty()) {
    // no preset list: run the full acceptance battery
    std::printf("running the acceptance battery (16 criteria)\n");
    const auto results = app::run_acceptance(print_criterion);
    bool all = true;
    for (const auto& r : results) all = all && r.pass;
    if (!out.empty()) {
      std::filesystem::create_directories(out);
      app::CsvTable t({"id", "label", "pass", "seconds", "detail"});
      for (const auto& r : results) {
        t.begin_row();
        t.add(r.id);
        t.add(r.label);
        t.add(std::string(r.pass ? "yes" : "no"));
        t.add(r.seconds);
        t.add(r.detail);
      }
      t.save(out + "/acceptance.csv");
      std::printf("report written to %s/acceptance.csv\n", out.c_str());
    }
    std::printf("acceptance: %s\n", all ? "all criteria pass" : "FAILURES above");
    return all ? kExitSuccess : kExitCheckFailed;
  }

  std::vector<app::Config> configs;
  for (const auto& name : presets) {
    app::Config base = app::preset_config(name);
    base.merge(overrides);
    if (ells.empty()) {
      configs.push_back(base);
      continue;
    }
    std::istringstream in(ells);  // one run per requested domain length
    std::string item;
    while (std::getline(in, item, ',')) {
      app::Config c = base;
      c.set("ell", item);
      c.set("name", name + "_ell" + item);
      configs.push_back(c);
    }
  }

  const std::string root = out.empty() ? "runs/suite" : out;
  const app::SuiteReport rep = app::run_suite(configs, root, jobs);
  for (const auto& e : rep.entries) {
    if (!e.ok) {
      std::printf("%-14s ERROR %s\n", e.name.c_str(), e.error.c_str());
    } else {
      std::printf("%-14s %s  cost %-12.4g %3d it  max err %-10.3g [%s]\n", e.name.c_str(),
                  e.report.pass ? "pass" : "FAIL", e.report.cost, e.report.iterations,
                  e.report.max_param_error, joined_params(e.report.params).c_str());
    }
  }
  std::printf("suite artifacts in %s\n", root.c_str());
  return rep.all_pass ? kExitSuccess : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"identification toolkit for degenerate diffusion coefficients"};
  cli.require_subcommand(1);
  int exit_code = kExitSuccess;

  RunOptions fwd_opts, inv_opts, sweep_opts, stab_opts;
  fwd_opts.attach(cli.add_subcommand("forward", "solve the forward problem and save profiles"));
  inv_opts.attach(
      cli.add_subcommand("invert", "run one inversion experiment with its noise table"));
  sweep_opts.attach(
      cli.add_subcommand("noise-sweep", "re-run an inversion over noise levels and seeds"));
  stab_opts.attach(cli.add_subcommand("stability", "empirical stability quotients"));
  int trials = 50;
  double eps_max = 0.05;
  stab_opts.sub->add_option("--trials", trials, "number of perturbation trials");
  stab_opts.sub->add_option("--eps-max", eps_max, "largest perturbation size");

  auto* poi = cli.add_subcommand("poincare", "randomized weighted Poincare inequality check");
  poi->allow_extras();
  double poi_ell = 1.0;
  int poi_samples = 1000;
  std::uint64_t poi_seed = 20260816;
  std::string poi_out;
  poi->add_option("--ell", poi_ell, "domain length");
  poi->add_option("--samples", poi_samples, "random samples per alpha");
  poi->add_option("--seed", poi_seed, "sample seed");
  poi->add_option("--out,-o", poi_out, "output directory");

  auto* car = cli.add_subcommand("carleman", "1d Carleman ratio scan on the standard window");
  car->allow_extras();
  std::string car_out;
  car->add_option("--out,-o", car_out, "output directory");

  auto* rez = cli.add_subcommand("reznitskaya-check",
                                 "wave-to-parabolic transform identity and equivalence checks");
  std::string rez_out;
  rez->add_option("--out,-o", rez_out, "output directory");

  auto* suite = cli.add_subcommand("suite", "run presets, or the acceptance battery if none given");
  suite->allow_extras();
  std::vector<std::string> suite_presets;
  std::string suite_ells, suite_out;
  int suite_jobs = 1;
  suite->add_option("--preset,-p", suite_presets, "presets to run (repeatable)");
  suite->add_option("--ell", suite_ells, "comma list: run each preset once per domain length");
  suite->add_option("--out,-o", suite_out, "output directory");
  suite->add_option("--jobs", suite_jobs, "parallel preset runs");

  fwd_opts.sub->callback([&] { exit_code = guarded([&] { return cmd_forward(fwd_opts); }); });
  inv_opts.sub->callback([&] { exit_code = guarded([&] { return cmd_invert(inv_opts); }); });
  sweep_opts.sub->callback(
      [&] { exit_code = guarded([&] { return cmd_noise_sweep(sweep_opts); }); });
  stab_opts.sub->callback(
      [&] { exit_code = guarded([&] { return cmd_stability(stab_opts, trials, eps_max); }); });
  poi->callback([&] {
    exit_code = guarded([&] { return cmd_poincare(poi, poi_ell, poi_samples, poi_seed, poi_out); });
  });
  car->callback([&] { exit_code = guarded([&] { return cmd_carleman(car, car_out); }); });
  rez->callback([&] { exit_code = guarded([&] { return cmd_reznitskaya_check(rez_out); }); });
  suite->callback([&] {
    exit_code =
        guarded([&] { return cmd_suite(suite, suite_presets, suite_ells, suite_out, suite_jobs); });
  });

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? kExitSuccess : kExitConfigError;
  }
  return exit_code;
}
