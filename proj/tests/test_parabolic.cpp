#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <degenid/observations.hpp>
#include <degenid/parabolic.hpp>

#include <cmath>
#include <numbers>

using namespace degenid;

namespace {

constexpr double kPi = std::numbers::pi;

double rel_l2(const Vector<double>& got, const Vector<double>& want, double dx) {
  return std::sqrt(trapezoid_sq((got - want).eval(), dx) / trapezoid_sq(want, dx));
}

// Relative final-time error of the classical heat eigenmode u = e^{-pi^2 t} sin(pi x).
double eigenmode_error(int nx, int nt, double t_final) {
  Grid<double> g(1.0, nx, t_final, nt);
  const auto u0 = sample_field(g, [](double x) { return std::sin(kPi * x); });
  const auto traj = solve_parabolic(DiffusionModel<double>::constant(1.0, 0.0),
                                    DegeneracyKind::NonDegenerate, g, u0);
  const auto exact =
      sample_field(g, [&](double x) { return std::exp(-kPi * kPi * t_final) * std::sin(kPi * x); });
  return rel_l2(traj.u.row(nt).transpose(), exact.values, g.dx());
}

Field<double> quartic_bump(const Grid<double>& g) {
  return sample_field(g, [](double x) { return 0.3 * x * x * (1 - x) * (1 - x); });
}

}  // namespace

TEST_CASE("half-node coefficients: constant, power, profile") {
  Grid<double> g(1.0, 8, 1.0, 8);  // dx = 1/9, so x_half(4) = 0.5 exactly

  const auto ones =
      coefficient_at_half_nodes(DiffusionModel<double>::constant(1.0, 0.0), g);
  CHECK(ones.size() == 9);
  CHECK(ones.minCoeff() == 1.0);
  CHECK(ones.maxCoeff() == 1.0);

  const auto kx = coefficient_at_half_nodes(DiffusionModel<double>::power(1.0), g);
  for (int i = 0; i <= g.nx; ++i)
    CHECK(kx[i] == doctest::Approx(g.x_half(i)).epsilon(1e-15));

  const auto prof =
      coefficient_at_half_nodes(DiffusionModel<double>::affine(0.6, 5.0, 1.5), g);
  CHECK(prof[4] == doctest::Approx(std::pow(0.5, 0.6) * 4.0).epsilon(1e-13));
}

TEST_CASE("coefficient positivity and table length are enforced") {
  Grid<double> g(1.0, 8, 1.0, 8);
  CHECK_THROWS_AS(coefficient_at_half_nodes(DiffusionModel<double>::affine(0.5, 1.0, -0.2), g),
                  std::domain_error);
  CHECK_THROWS_AS(
      coefficient_at_half_nodes(DiffusionModel<double>::tabulated(0.5, Vector<double>::Ones(5)), g),
      std::invalid_argument);
  const auto tab =
      coefficient_at_half_nodes(DiffusionModel<double>::tabulated(1.0, Vector<double>::Ones(9)), g);
  for (int i = 0; i <= g.nx; ++i)
    CHECK(tab[i] == doctest::Approx(g.x_half(i)).epsilon(1e-15));
}

TEST_CASE("model construction validates alpha") {
  CHECK_THROWS_AS(DiffusionModel<double>::power(2.0), std::invalid_argument);
  CHECK_THROWS_AS(DiffusionModel<double>::constant(1.0, -0.5), std::invalid_argument);
  CHECK_NOTHROW(DiffusionModel<double>::power(1.999));
}

TEST_CASE("degeneracy kind must match alpha") {
  Grid<double> g(1.0, 16, 0.1, 16);
  const auto u0 = quartic_bump(g);
  CHECK_THROWS_AS(
      solve_parabolic(DiffusionModel<double>::power(0.5), DegeneracyKind::Strong, g, u0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      solve_parabolic(DiffusionModel<double>::constant(1.0, 0.0), DegeneracyKind::Weak, g, u0),
      std::invalid_argument);
  CHECK(kind_for(0.5) == DegeneracyKind::Weak);
  CHECK(kind_for(1.0) == DegeneracyKind::Strong);
  CHECK(kind_for(0.0) == DegeneracyKind::NonDegenerate);
  CHECK_THROWS_AS(kind_for(2.0), std::invalid_argument);
}

TEST_CASE("classical eigenmode decays at the exact rate") {
  CHECK(eigenmode_error(200, 4000, 0.1) <= 2e-4);  // spec budget 1e-2, observed 1.4e-4
}

TEST_CASE("halving dx and quartering dt cuts the eigenmode error by 3x or more") {
  const double e1 = eigenmode_error(100, 200, 0.1);
  const double e2 = eigenmode_error(201, 800, 0.1);
  CHECK(e1 / e2 >= 3.0);
}

TEST_CASE("row zero stores the initial datum verbatim, pins apply afterwards") {
  Grid<double> g(1.2, 32, 1.0, 32);  // u0(ell) != 0: incompatible end data stays recorded
  const auto u0 = quartic_bump(g);
  const auto traj =
      solve_parabolic(DiffusionModel<double>::power(0.5), DegeneracyKind::Weak, g, u0);
  for (int i = 0; i < g.nodes(); ++i) CHECK(traj.u(0, i) == u0.values[i]);
  CHECK(traj.u(0, g.nx + 1) != 0.0);
  CHECK(traj.u(1, 0) == 0.0);
  CHECK(traj.u(1, g.nx + 1) == 0.0);
}

TEST_CASE("zero data stays exactly zero") {
  Grid<double> g(1.0, 16, 1.0, 16);
  const auto traj = solve_parabolic(DiffusionModel<double>::power(1.3), DegeneracyKind::Strong, g,
                                    sample_field(g, [](double) { return 0.0; }));
  CHECK(traj.u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("source-free trajectories are dissipative") {
  for (const auto& [alpha, kind, ell] :
       {std::tuple{1.0, DegeneracyKind::Strong, 1.0},
        std::tuple{0.5, DegeneracyKind::Weak, 1.2},
        std::tuple{1.3, DegeneracyKind::Strong, 1.0},
        std::tuple{0.0, DegeneracyKind::NonDegenerate, 1.0}}) {
    Grid<double> g(ell, 100, 1.0, 200);
    const auto traj = solve_parabolic(DiffusionModel<double>::power(alpha), kind, g,
                                      quartic_bump(g));
    const auto rep = dissipativity_check(traj);
    CAPTURE(alpha);
    CHECK(rep.ok);
    CHECK(rep.max_violation <= 1e-10);
  }
}

TEST_CASE("an injected growth step is flagged") {
  Grid<double> g(1.0, 64, 1.0, 64);
  auto traj = solve_parabolic(DiffusionModel<double>::power(1.0), DegeneracyKind::Strong, g,
                              quartic_bump(g));
  traj.u.row(30) *= 1.5;
  const auto rep = dissipativity_check(traj);
  CHECK_FALSE(rep.ok);
  CHECK(rep.max_violation >= 0.4);
}

TEST_CASE("self-refinement error ratio stays below 4x") {
  // No closed form in the degenerate regimes, so the solver is its own
  // oracle: the (nx,nt) -> (2nx,4nt) gap must shrink at least as fast as the
  // (2nx,4nt) -> (4nx,16nt) gap grows back, up to the factor-4 budget.
  for (const auto& [alpha, kind] : {std::tuple{0.5, DegeneracyKind::Weak},
                                    std::tuple{1.3, DegeneracyKind::Strong}}) {
    std::vector<Vector<double>> finals;
    std::vector<double> dxs;
    for (const auto& [nx, nt] : {std::pair{100, 200}, std::pair{200, 800}, std::pair{400, 3200}}) {
      Grid<double> g(1.0, nx, 1.0, nt);
      finals.push_back(solve_parabolic(DiffusionModel<double>::power(alpha), kind, g,
                                       quartic_bump(g))
                           .u.row(nt)
                           .transpose());
      dxs.push_back(g.dx());
    }
    const auto restrict_to = [&](int coarse, int fine) {
      return detail::interp_uniform(finals[fine], dxs[fine], dxs[coarse],
                                    finals[coarse].size());
    };
    const double d1 = std::sqrt(trapezoid_sq((finals[0] - restrict_to(0, 1)).eval(), dxs[0]));
    const double d2 = std::sqrt(trapezoid_sq((finals[1] - restrict_to(1, 2)).eval(), dxs[1]));
    CAPTURE(alpha);
    CHECK(d1 / d2 <= 4.0);
  }
}

TEST_CASE("zero-flux origin: the discrete flux stays bounded under refinement") {
  std::vector<double> fluxes;
  for (const int nx : {100, 200, 400}) {
    Grid<double> g(1.0, nx, 1.0, 400);
    const auto traj = solve_parabolic(DiffusionModel<double>::power(1.3),
                                      DegeneracyKind::Strong, g, quartic_bump(g));
    const auto kappa =
        coefficient_at_half_nodes(DiffusionModel<double>::power(1.3), g);
    fluxes.push_back(std::abs(kappa[0] * (traj.u(g.nt, 1) - traj.u(g.nt, 0)) / g.dx()));
  }
  for (const double f : fluxes) CHECK(f <= 1e-2);
}

TEST_CASE("source term enters at the new time level") {
  // u0 = 0 with f(x, t) = t: sampling f at the new level makes
  // u^1 = dt^2 (I + dt A)^{-1} 1 > 0; old-level sampling would leave u^1 = 0.
  Grid<double> g(1.0, 16, 1.0, 16);
  const auto traj = solve_parabolic(
      DiffusionModel<double>::constant(1.0, 0.0), DegeneracyKind::NonDegenerate, g,
      sample_field(g, [](double) { return 0.0; }), [](double, double t) { return t; });
  CHECK(traj.u.row(1).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("scalar type is generic for the solver") {
  Grid<float> g(1.0f, 16, 0.1f, 32);
  const auto u0 = sample_field(g, [](float x) { return x * (1 - x); });
  const auto traj =
      solve_parabolic(DiffusionModel<float>::power(0.5f), DegeneracyKind::Weak, g, u0);
  CHECK(traj.u.allFinite());
  CHECK(dissipativity_check(traj).ok);
}
