#pragma once

#include "model.hpp"

#include <functional>
#include <type_traits>
#include <limits>

namespace degenid {

// Source term f(x, t); an empty function means f = 0.
template <class S>
using SourceFn = std::function<S(S, S)>;

// Dense record of one forward solve: row n holds u(., n dt). Row 0 is the
// initial datum exactly as sampled, boundary pins apply from level 1 on.
template <class S>
struct Trajectory {
  Grid<S> grid;
  Matrix<S> u;

  auto level(int n) const { return u.row(n); }
};

namespace detail {

// LU factorization of a tridiagonal matrix, reused across time steps since the
// implicit Euler matrix is constant.
template <class S>
struct TridiagonalFactor {
  Vector<S> diag;   // pivots after elimination
  Vector<S> upper;  // unchanged superdiagonal
  Vector<S> mult;   // row multipliers

  TridiagonalFactor(const Vector<S>& lower, Vector<S> d, Vector<S> up)
      : diag(std::move(d)), upper(std::move(up)), mult(lower.size()) {
    const auto n = diag.size();
    for (Eigen::Index i = 1; i < n; ++i) {
      const S w = lower[i - 1] / diag[i - 1];
      mult[i - 1] = w;
      diag[i] -= w * upper[i - 1];
    }
    if (!(diag.cwiseAbs().minCoeff() > S(0)))
      throw std::runtime_error("tridiagonal: zero pivot");
  }

  void solve_in_place(Vector<S>& rhs) const {
    const auto n = diag.size();
    for (Eigen::Index i = 1; i < n; ++i) rhs[i] -= mult[i - 1] * rhs[i - 1];
    rhs[n - 1] /= diag[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i)
      rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
};

}  // namespace detail

// Implicit Euler for u_t = (kappa u_x)_x + f with the conservative stencil
//   (u_i^{n+1} - u_i^n)/dt
//     = [kappa_{i+1/2}(u_{i+1}-u_i) - kappa_{i-1/2}(u_i-u_{i-1})]^{n+1}/dx^2 + f_i^{n+1}.
// Weak and NonDegenerate pin both ends to zero. Strong pins only x = ell and
// evolves node 0 by the zero-flux row
//   (u_0^{n+1} - u_0^n)/dt = kappa_{1/2}(u_1 - u_0)^{n+1}/dx^2 + f_0^{n+1},
// first order at that node, which is what the self-refinement oracle expects.
template <class S>
Trajectory<S> solve_parabolic(const DiffusionModel<S>& model, DegeneracyKind kind,
                              const Grid<S>& grid, const Field<S>& u0,
                              const SourceFn<std::type_identity_t<S>>& f = {}) {
  if (!kind_compatible(kind, model.alpha))
    throw std::invalid_argument("solve_parabolic: alpha is incompatible with the degeneracy kind");
  if (!same_grid(u0.grid, grid))
    throw std::invalid_argument("solve_parabolic: u0 lives on a different grid");

  const Vector<S> kappa = coefficient_at_half_nodes(model, grid);
  const S dx = grid.dx();
  const S dt = grid.dt();
  const S r = dt / (dx * dx);

  // Unknowns: nodes lo..hi inclusive.
  const int lo = (kind == DegeneracyKind::Strong) ? 0 : 1;
  const int hi = grid.nx;
  const int m = hi - lo + 1;

  Vector<S> sub(m - 1), diag(m), sup(m - 1);
  for (int i = lo; i <= hi; ++i) {
    const int k = i - lo;
    const S kl = (i == 0) ? S(0) : kappa[i - 1];  // node 0 row keeps only the right flux
    const S kr = kappa[i];
    diag[k] = S(1) + r * (kl + kr);
    if (k > 0) sub[k - 1] = -r * kl;
    if (k < m - 1) sup[k] = -r * kr;
  }
  const detail::TridiagonalFactor<S> lu(sub, std::move(diag), std::move(sup));

  Trajectory<S> traj{grid, Matrix<S>::Zero(grid.nt + 1, grid.nodes())};
  traj.u.row(0) = u0.values.transpose();

  Vector<S> rhs(m);
  for (int n = 0; n < grid.nt; ++n) {
    rhs = traj.u.row(n).segment(lo, m).transpose();
    if (f) {
      const S tn1 = grid.t(n + 1);
      for (int i = lo; i <= hi; ++i) rhs[i - lo] += dt * f(grid.x(i), tn1);
    }
    lu.solve_in_place(rhs);
    traj.u.row(n + 1).setZero();
    traj.u.row(n + 1).segment(lo, m) = rhs.transpose();
  }

  if (!traj.u.allFinite())
    throw std::runtime_error("solve_parabolic: solution is not finite");
  return traj;
}

template <class S>
struct DissipativityReport {
  bool ok;
  S max_violation;  // max over n of ||u^{n+1}|| / ||u^n|| - 1
};

// With f = 0 the step matrix is an L2 contraction, so the discrete norm must
// not grow beyond roundoff. Checked a posteriori on the stored trajectory.
template <class S>
DissipativityReport<S> dissipativity_check(const Trajectory<S>& traj) {
  const S tol = S(1e-10);
  const S dx = traj.grid.dx();
  S worst = std::numeric_limits<S>::lowest();
  bool any = false;
  S prev = std::sqrt(trapezoid_sq(traj.u.row(0).transpose(), dx));
  for (int n = 1; n < traj.u.rows(); ++n) {
    const S cur = std::sqrt(trapezoid_sq(traj.u.row(n).transpose(), dx));
    const S denom = std::max(prev, std::numeric_limits<S>::min());
    worst = std::max(worst, cur / denom - S(1));
    any = true;
    prev = cur;
  }
  if (!any) return {true, S(0)};
  return {worst <= tol, worst};
}

}  // namespace degenid
