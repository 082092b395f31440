#include "presets.hpp"

#include <cmath>
#include <stdexcept>

namespace degenid::app {

namespace {

// Baseline for the constant-coefficient experiments: x^1 a on (0,1), horizon
// 5, interior data at t0 = 0.2, box [0.05, 3].
Config constant_base() {
  Config c;
  c.set("family", "constant_a");
  c.set("kind", "strong");
  c.set("alpha", "1");
  c.set("ell", "1");
  c.set("T", "5");
  c.set("nx", "200");
  c.set("nt", "2000");
  c.set("u0", "cubic_bump");
  c.set("f", "none");
  c.set("obs", "interior");
  c.set("weight", "x");
  c.set("t0", "0.2");
  c.set("lower", "0.05");
  c.set("upper", "3");
  c.set("data_refine_x", "1");
  c.set("data_refine_t", "1");
  c.set("noise_levels", "0.01,0.001,0.0001,0.00001,0");
  c.set("seeds", "1");
  c.set("tol", "0.0001");
  c.set("tol_metric", "params");
  return c;
}

// Baseline for the exponent experiments: x^alpha on a longer horizon with the
// flatter initial bump, gradient weight x^2 for the interior functional.
Config power_base() {
  Config c = constant_base();
  c.set("family", "power_alpha");
  c.set("alpha", "0");
  c.set("T", "10");
  c.set("nt", "4000");
  c.set("u0", "quartic_bump");
  c.set("weight", "x2");
  c.set("tol", "0.001");
  return c;
}

Config profile_base() {
  Config c = constant_base();
  c.set("alpha", "0.6");
  c.set("kind", "weak");
  c.set("u0", "quartic_bump");
  c.set("obs", "boundary");
  return c;
}

Vector<double> parse_params(const Config& cfg, const std::string& key, int dim) {
  const std::vector<double> v = cfg.get_doubles(key);
  if (int(v.size()) != dim)
    throw std::invalid_argument("config: '" + key + "' needs " + std::to_string(dim) +
                                " comma separated values");
  return Eigen::Map<const Vector<double>>(v.data(), dim);
}

WeightKind weight_by_name(const std::string& name) {
  if (name == "x") return WeightKind::X;
  if (name == "x2") return WeightKind::X2;
  if (name == "xalpha") return WeightKind::XAlpha;
  throw std::invalid_argument("config: unknown weight '" + name + "'");
}

}  // namespace

ParamFamily family_by_name(const std::string& name) {
  if (name == "constant_a") return ParamFamily::ConstantA;
  if (name == "power_alpha") return ParamFamily::PowerAlpha;
  if (name == "profile_affine") return ParamFamily::ProfileAffine;
  if (name == "profile_quadratic") return ParamFamily::ProfileQuadratic;
  if (name == "power_quadratic") return ParamFamily::PowerQuadratic;
  throw std::invalid_argument("config: unknown family '" + name + "'");
}

DegeneracyKind kind_by_name(const std::string& name) {
  if (name == "weak") return DegeneracyKind::Weak;
  if (name == "strong") return DegeneracyKind::Strong;
  if (name == "nondegenerate") return DegeneracyKind::NonDegenerate;
  throw std::invalid_argument("config: unknown kind '" + name + "'");
}

std::function<double(double)> u0_by_name(const std::string& name) {
  if (name == "zero") return [](double) { return 0.0; };
  if (name == "cubic_bump") return [](double x) { return 0.5 * x * x * (1.0 - x); };
  if (name == "quartic_bump")
    return [](double x) { return 0.3 * x * x * (1.0 - x) * (1.0 - x); };
  throw std::invalid_argument("config: unknown u0 '" + name + "'");
}

SourceFn<double> source_by_name(const std::string& name) {
  if (name == "none") return {};
  if (name == "ramp") return [](double x, double t) { return 2.0 * x * t; };
  throw std::invalid_argument("config: unknown f '" + name + "'");
}

DiffusionModel<double> build_model(ParamFamily family, double fixed_alpha,
                                   const Vector<double>& p) {
  switch (family) {
    case ParamFamily::ConstantA: return DiffusionModel<double>::constant(p[0], fixed_alpha);
    case ParamFamily::PowerAlpha: return DiffusionModel<double>::power(p[0]);
    case ParamFamily::ProfileAffine:
      return DiffusionModel<double>::affine(fixed_alpha, p[0], p[1]);
    case ParamFamily::ProfileQuadratic:
      return DiffusionModel<double>::quadratic(fixed_alpha, p[0], p[1], p[2]);
    case ParamFamily::PowerQuadratic:
      return DiffusionModel<double>::quadratic(p[0], p[1], p[2], p[3]);
  }
  throw std::logic_error("build_model: unknown family");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (int i = 1; i <= 14; ++i) names.push_back("test" + std::to_string(i));
  return names;
}

Config preset_config(const std::string& name) {
  Config c;
  if (name == "test1" || name == "test4" || name == "test5") {
    c = constant_base();
    c.set("initial", "0.7");
    c.set("truth", "1.7");
  } else if (name == "test2" || name == "test6") {
    c = constant_base();
    c.set("initial", "0.2");
    c.set("truth", "1");
  } else if (name == "test3" || name == "test7") {
    c = constant_base();
    c.set("initial", "0.7");
    c.set("truth", "0.2");
  } else if (name == "test8") {
    c = power_base();
    c.set("kind", "weak");
    c.set("ell", "0.9");
    c.set("initial", "0.8");
    c.set("truth", "0.4");
    c.set("lower", "0.05");
    c.set("upper", "0.95");
  } else if (name == "test9") {
    c = power_base();
    c.set("kind", "strong");
    c.set("ell", "0.9");
    c.set("initial", "1.6");
    c.set("truth", "1.3");
    c.set("lower", "1");
    c.set("upper", "1.95");
  } else if (name == "test10") {
    c = power_base();
    c.set("kind", "weak");
    c.set("obs", "boundary");
    c.set("initial", "0.2");
    c.set("truth", "0.6");
    c.set("lower", "0.05");
    c.set("upper", "0.95");
  } else if (name == "test11" || name == "test12") {
    c = power_base();
    c.set("kind", "strong");
    c.set("obs", "boundary");
    c.set("ell", name == "test11" ? "0.99" : "1");
    c.set("initial", "1.6");
    c.set("truth", "1.3");
    c.set("lower", "1");
    c.set("upper", "1.95");
  } else if (name == "test13") {
    c = profile_base();
    c.set("family", "profile_affine");
    c.set("initial", "1,1");
    c.set("truth", "5,1.5");
    c.set("lower", "0.1,0.1");
    c.set("upper", "10,10");
    c.set("tol", "0.01");
  } else if (name == "test14") {
    c = profile_base();
    c.set("family", "profile_quadratic");
    c.set("initial", "3.5,2.5,0.5");
    c.set("truth", "4,3,1");
    c.set("lower", "0.1,0.1,0.1");
    c.set("upper", "10,10,10");
    // the three-parameter profile sits on a flat plateau: cost, not the
    // individual parameters, is what a run is judged on
    c.set("tol", "1e-10");
    c.set("tol_metric", "cost");
  } else if (name == "custom") {
    // bare template: every knob at the constant-family default, no signal,
    // and no pass/fail tolerance since the zero data identify nothing
    c = constant_base();
    c.set("u0", "zero");
    c.set("initial", "0.7");
    c.set("truth", "1.7");
    c.erase("tol");
    c.erase("tol_metric");
  } else {
    throw std::invalid_argument("unknown preset '" + name + "' (expected test1..test14 or custom)");
  }
  if (name == "test4") {
    c.set("f", "ramp");
    c.set("t0", "0.4");
    c.set("plot_solution", "1");
  }
  if (name == "test5" || name == "test6" || name == "test7") {
    c.set("obs", "boundary");
    c.set("tol", "0.001");
  }
  c.set("name", name);
  return c;
}

Problem problem_from_config(const Config& cfg) {
  const ParamFamily family = family_by_name(cfg.get("family"));
  const int dim = family_dim(family);
  const DegeneracyKind kind = kind_by_name(cfg.get("kind"));
  const double fixed_alpha = cfg.get_double("alpha", 0.0);

  const Grid<double> grid(cfg.get_double("ell"), cfg.get_int("nx"), cfg.get_double("T"),
                          cfg.get_int("nt"));
  const auto u0_fn = u0_by_name(cfg.get("u0", "zero"));
  const SourceFn<double> f = source_by_name(cfg.get("f", "none"));
  const ObsKind obs_kind =
      cfg.get("obs") == "boundary" ? ObsKind::Boundary : ObsKind::Interior;
  const WeightKind weight = weight_by_name(cfg.get("weight", "x"));
  const double t0 = cfg.get_double("t0", 0.2);

  const Vector<double> truth = parse_params(cfg, "truth", dim);
  const DiffusionModel<double> truth_model = build_model(family, fixed_alpha, truth);

  const int rx = cfg.get_int("data_refine_x", 1);
  const int rt = cfg.get_int("data_refine_t", 1);
  Observation<double> target = [&] {
    if (rx > 1 || rt > 1) {
      // honest-data path: generate on a finer grid, restrict by interpolation
      // (refinement must be strict in both directions, so floor either at 2)
      const Grid<double> data_grid(grid.ell, std::max(rx, 2) * (grid.nx + 1) - 1, grid.T,
                                   std::max(rt, 2) * grid.nt);
      return synthesize(truth_model, kind, data_grid, grid, u0_fn, f, obs_kind, t0, weight,
                        truth_model.alpha);
    }
    const Trajectory<double> traj =
        solve_parabolic(truth_model, kind, grid, sample_field(grid, u0_fn), f);
    if (obs_kind == ObsKind::Boundary)
      return Observation<double>{grid, measure_boundary_flux(traj)};
    return Observation<double>{grid, measure_interior(traj, t0, weight, truth_model.alpha)};
  }();

  Problem pb{cfg.get("name", "custom"),
             InverseProblemSpec<double>{family, fixed_alpha, parse_params(cfg, "lower", dim),
                                        parse_params(cfg, "upper", dim),
                                        parse_params(cfg, "initial", dim), kind, grid,
                                        sample_field(grid, u0_fn).values, f, weight,
                                        std::move(target)},
             truth,
             obs_kind,
             t0,
             family_param_names(family)};
  pb.spec.validate();
  return pb;
}

}  // namespace degenid::app
