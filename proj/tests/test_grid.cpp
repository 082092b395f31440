#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <degenid/grid.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace degenid;

namespace {

double l2_err_of_x2(int nx) {
  Grid<double> g(1.0, nx, 1.0, 8);
  const auto u = sample_field(g, [](double x) { return x * x; });
  return std::abs(l2_norm_sq(u) - 0.2);
}

}  // namespace

TEST_CASE("grid validates its extents") {
  CHECK_THROWS_AS(Grid<double>(1.0, 7, 1.0, 100), std::invalid_argument);
  CHECK_THROWS_AS(Grid<double>(1.0, 100, 1.0, 7), std::invalid_argument);
  CHECK_THROWS_AS(Grid<double>(0.0, 100, 1.0, 100), std::invalid_argument);
  CHECK_THROWS_AS(Grid<double>(1.0, 100, -1.0, 100), std::invalid_argument);
  CHECK_NOTHROW(Grid<double>(1.0, 8, 1.0, 8));
}

TEST_CASE("node coordinates span [0, ell] exactly") {
  for (const double ell : {1.0, 0.9, 0.99, 1.01, 1.1, 1.2, 2.5}) {
    Grid<double> g(ell, 200, 5.0, 2000);
    CHECK(g.x(0) == 0.0);
    const double hi = g.x(g.nx + 1);
    CHECK(hi >= std::nextafter(ell, 0.0));
    CHECK(hi <= std::nextafter(ell, 2.0 * ell));
    CHECK(g.dx() == doctest::Approx(ell / 201).epsilon(1e-15));
    CHECK(g.x_half(0) == doctest::Approx(0.5 * g.dx()).epsilon(1e-15));
  }
}

TEST_CASE("fields reject wrong sizes and non-finite values") {
  Grid<double> g(1.0, 8, 1.0, 8);
  CHECK_THROWS_AS(Field<double>(g, Vector<double>::Zero(9)), std::invalid_argument);
  Vector<double> bad = Vector<double>::Zero(10);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Field<double>(g, bad), std::invalid_argument);
  CHECK_NOTHROW(Field<double>(g, Vector<double>::Zero(10)));
}

TEST_CASE("l2 norm: zero, constant one, and u = x") {
  Grid<double> g(1.0, 199, 1.0, 8);
  CHECK(l2_norm_sq(sample_field(g, [](double) { return 0.0; })) == 0.0);
  CHECK(l2_norm_sq(sample_field(g, [](double) { return 1.0; })) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l2_norm_sq(sample_field(g, [](double x) { return x; })) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("plain trapezoid integrates constants exactly") {
  Grid<double> g(0.9, 50, 1.0, 8);
  const auto ones = sample_field(g, [](double) { return 1.0; });
  CHECK(trapezoid(ones.values, g.dx()) == doctest::Approx(0.9).epsilon(1e-14));
  CHECK_THROWS_AS(trapezoid(Vector<double>::Zero(1), 0.1), std::invalid_argument);
}

TEST_CASE("weighted H1 seminorm matches closed forms") {
  Grid<double> g(1.0, 400, 1.0, 8);
  const auto c = sample_field(g, [](double) { return 3.7; });
  CHECK(weighted_h1_seminorm_sq(c, 0.5) == 0.0);

  const auto lin = sample_field(g, [](double x) { return x; });
  CHECK(weighted_h1_seminorm_sq(lin, 1.0) == doctest::Approx(0.5).epsilon(1e-6));

  Grid<double> gs(1.0, 999, 1.0, 8);
  const auto s = sample_field(gs, [](double x) { return std::sin(std::numbers::pi * x); });
  const double exact = std::numbers::pi * std::numbers::pi / 2.0;
  CHECK(weighted_h1_seminorm_sq(s, 0.0) == doctest::Approx(exact).epsilon(1e-3));

  CHECK_THROWS_AS(weighted_h1_seminorm_sq(lin, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(weighted_h1_seminorm_sq(lin, -0.1), std::invalid_argument);
}

TEST_CASE("quadrature error drops by at least 3.5x when dx halves") {
  // nx = 50 -> 101 halves dx exactly (dx = 1/51 -> 1/102).
  const double e1 = l2_err_of_x2(50);
  const double e2 = l2_err_of_x2(101);
  CHECK(e1 / e2 >= 3.5);

  auto h1_err = [](int nx) {
    Grid<double> g(1.0, nx, 1.0, 8);
    const auto u = sample_field(g, [](double x) { return x * x; });
    return std::abs(weighted_h1_seminorm_sq(u, 0.0) - 4.0 / 3.0);
  };
  CHECK(h1_err(50) / h1_err(101) >= 3.5);
}

TEST_CASE("seminorm ignores constant shifts") {
  Grid<double> g(1.2, 123, 1.0, 8);
  std::mt19937_64 eng(5);
  Vector<double> v(g.nodes());
  for (int i = 0; i < g.nodes(); ++i)
    v[i] = 2.0 * (double(eng() >> 11) * 0x1.0p-53) - 1.0;
  const Field<double> u(g, v);
  const Field<double> shifted(g, (v.array() + 5.0).matrix());
  const double a = weighted_h1_seminorm_sq(u, 0.7);
  const double b = weighted_h1_seminorm_sq(shifted, 0.7);
  CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
}

TEST_CASE("scalar type is generic") {
  Grid<float> g(1.0f, 16, 1.0f, 16);
  const auto u = sample_field(g, [](float x) { return x; });
  CHECK(l2_norm_sq(u) == doctest::Approx(1.0f / 3.0f).epsilon(1e-3));
  CHECK(weighted_h1_seminorm_sq(u, 1.0f) == doctest::Approx(0.5f).epsilon(1e-3));
}
