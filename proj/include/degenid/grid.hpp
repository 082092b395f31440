#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace degenid {

template <class S>
using Vector = Eigen::VectorX<S>;

// Row n of a trajectory is a time level, so keep time-major storage contiguous.
template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Uniform space-time grid on [0, ell] x [0, T]. Nodes 0..nx+1 with spacing
// dx = ell/(nx+1); nodes 1..nx are interior. Time levels 0..nt with dt = T/nt.
template <class S>
struct Grid {
  S ell;
  int nx;
  S T;
  int nt;

  Grid(S ell_, int nx_, S T_, int nt_) : ell(ell_), nx(nx_), T(T_), nt(nt_) {
    if (!(ell > S(0)) || !(T > S(0)))
      throw std::invalid_argument("grid: ell and T must be positive");
    if (nx < 8 || nt < 8)
      throw std::invalid_argument("grid: nx and nt must both be at least 8");
  }

  S dx() const { return ell / S(nx + 1); }
  S dt() const { return T / S(nt); }
  int nodes() const { return nx + 2; }

  // Multiply before dividing so x(nx+1) lands on ell to the last ulp.
  S x(int i) const { return S(i) * ell / S(nx + 1); }
  S x_half(int i) const { return (S(i) + S(0.5)) * ell / S(nx + 1); }
  S t(int n) const { return S(n) * T / S(nt); }
};

template <class S>
bool same_grid(const Grid<S>& a, const Grid<S>& b) {
  return a.ell == b.ell && a.nx == b.nx && a.T == b.T && a.nt == b.nt;
}

// Nodal values bound to the grid they were sampled on.
template <class S>
struct Field {
  Grid<S> grid;
  Vector<S> values;

  Field(Grid<S> g, Vector<S> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.nodes())
      throw std::invalid_argument("field: value count must be nx+2");
    if (!values.allFinite())
      throw std::invalid_argument("field: values must be finite");
  }
};

template <class S, class F>
Field<S> sample_field(const Grid<S>& g, F&& f) {
  Vector<S> v(g.nodes());
  for (int i = 0; i < g.nodes(); ++i) v[i] = f(g.x(i));
  return Field<S>(g, std::move(v));
}

// Trapezoid rule for int g dx over uniformly spaced nodal values.
template <class D, class S = typename D::Scalar>
S trapezoid(const Eigen::MatrixBase<D>& g, S dx) {
  const auto n = g.size();
  if (n < 2) throw std::invalid_argument("trapezoid: need at least two nodes");
  return (g.sum() - (g[0] + g[n - 1]) / S(2)) * dx;
}

// Trapezoid rule for int u^2 dx; accepts any Eigen expression.
template <class D, class S = typename D::Scalar>
S trapezoid_sq(const Eigen::MatrixBase<D>& u, S dx) {
  const auto n = u.size();
  if (n < 2) throw std::invalid_argument("trapezoid_sq: need at least two nodes");
  S s = u.squaredNorm();
  s -= (u[0] * u[0] + u[n - 1] * u[n - 1]) / S(2);
  return s * dx;
}

template <class S>
S l2_norm_sq(const Field<S>& u) {
  return trapezoid_sq(u.values, u.grid.dx());
}

// Midpoint rule for int x^alpha |u'|^2 dx. The weight is evaluated at cell
// midpoints only, so the degenerate origin is never sampled.
template <class S>
S weighted_h1_seminorm_sq(const Field<S>& u, S alpha) {
  if (!(alpha >= S(0)) || !(alpha < S(2)))
    throw std::invalid_argument("weighted_h1_seminorm_sq: alpha must lie in [0, 2)");
  const Grid<S>& g = u.grid;
  const S dx = g.dx();
  S acc = S(0);
  for (int i = 0; i <= g.nx; ++i) {
    const S du = (u.values[i + 1] - u.values[i]) / dx;
    acc += std::pow(g.x_half(i), alpha) * du * du * dx;
  }
  return acc;
}

}  // namespace degenid
