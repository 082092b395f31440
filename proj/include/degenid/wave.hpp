#pragma once

#include "parabolic.hpp"

#include <numbers>
#include <vector>

namespace degenid {

// Leapfrog record for utt = (kappa ux)x with ut(., 0) = 0 and Dirichlet ends.
// dt is chosen by the CFL bound, not by the caller.
template <class S>
struct WaveTrajectory {
  S ell;
  int nx;
  S dt;
  Matrix<S> u;  // rows are time levels 0..n_steps

  S dx() const { return ell / S(nx + 1); }
  int levels() const { return int(u.rows()); }
};

// Explicit leapfrog, u^{n+1} = 2u^n - u^{n-1} + dt^2 Lh u^n, started by the
// second order half step u^1 = u^0 + dt^2/2 Lh u^0. Only the Dirichlet
// regimes are meaningful here (the zero-flux hyperbolic problem is out of
// scope), so alpha must stay below 1.
template <class S>
WaveTrajectory<S> solve_wave(const DiffusionModel<S>& model, S ell, int nx,
                             S t_max, const Field<S>& u0, S cfl = S(0.9)) {
  if (!(model.alpha < S(1)))
    throw std::invalid_argument("solve_wave: needs alpha < 1 (Dirichlet regime)");
  if (!(t_max > S(0)) || !(cfl > S(0)) || cfl > S(1))
    throw std::invalid_argument("solve_wave: bad t_max or cfl");
  if (u0.grid.ell != ell || u0.grid.nx != nx)
    throw std::invalid_argument("solve_wave: u0 lives on a different grid");

  // Any grid with matching space part gives the same coefficients.
  const Grid<S> gx(ell, nx, S(1), 8);
  const Vector<S> kappa = coefficient_at_half_nodes(model, gx);
  const S dx = gx.dx();
  const S dt_stable = cfl * dx / std::sqrt(kappa.maxCoeff());
  const int n_steps = std::max(1, int(std::ceil(t_max / dt_stable)));
  const S dt = t_max / S(n_steps);

  WaveTrajectory<S> w{ell, nx, dt, Matrix<S>::Zero(n_steps + 1, nx + 2)};
  w.u.row(0) = u0.values.transpose();

  const S r = dt * dt / (dx * dx);
  Vector<S> lh(nx + 2);
  auto apply_lh = [&](int n) {
    lh.setZero();
    for (int i = 1; i <= nx; ++i)
      lh[i] = kappa[i] * (w.u(n, i + 1) - w.u(n, i)) - kappa[i - 1] * (w.u(n, i) - w.u(n, i - 1));
  };

  apply_lh(0);
  for (int i = 1; i <= nx; ++i) w.u(1, i) = w.u(0, i) + r / S(2) * lh[i];
  for (int n = 1; n < n_steps; ++n) {
    apply_lh(n);
    for (int i = 1; i <= nx; ++i)
      w.u(n + 1, i) = S(2) * w.u(n, i) - w.u(n - 1, i) + r * lh[i];
  }

  if (!w.u.allFinite()) throw std::runtime_error("solve_wave: solution is not finite");
  return w;
}

// Gaussian averaging kernel G(t, tau) = exp(-tau^2/(4t)) / sqrt(pi t). Its
// mass on [0, inf) is one; beyond tau = 13 sqrt(t) the tail is below 1e-10,
// which sets the quadrature horizon.
template <class S>
S kernel_value(S t, S tau) {
  return std::exp(-tau * tau / (S(4) * t)) / std::sqrt(std::numbers::pi_v<S> * t);
}

template <class S>
S kernel_horizon(S t) {
  return S(13) * std::sqrt(t);
}

// Quadrature layout for one transform evaluation: uniform tau levels
// 0..n_tau with spacing dtau covering [0, tau_max].
template <class S>
struct KernelQuadrature {
  S t;
  S tau_max;
  int n_tau;

  KernelQuadrature(S t_, S tau_max_, int n_tau_) : t(t_), tau_max(tau_max_), n_tau(n_tau_) {
    if (!(t > S(0)) || n_tau < 8)
      throw std::invalid_argument("kernel quadrature: need t > 0 and n_tau >= 8");
    if (!(tau_max >= kernel_horizon(t)))
      throw std::invalid_argument("kernel quadrature: tau_max must cover 13 sqrt(t)");
  }

  S dtau() const { return tau_max / S(n_tau); }
};

// Trapezoid weights for K(eta)(t) = int eta(tau) G(t, tau) dtau applied to a
// series sampled at uniform tau levels. The series must reach the horizon.
template <class S>
Vector<S> kernel_weights(S t, S dtau, Eigen::Index series_levels) {
  if (!(t > S(0)) || !(dtau > S(0)))
    throw std::invalid_argument("kernel weights: need t > 0 and dtau > 0");
  const S tau_max = kernel_horizon(t);
  if (S(series_levels - 1) * dtau < tau_max * (S(1) - S(1e-12)))
    throw std::invalid_argument("reznitskaya: series horizon is shorter than 13 sqrt(t)");
  const auto m = std::min(series_levels - 1, Eigen::Index(std::ceil(tau_max / dtau)));
  Vector<S> w = Vector<S>::Zero(series_levels);
  for (Eigen::Index j = 0; j <= m; ++j) w[j] = kernel_value(t, S(j) * dtau) * dtau;
  w[0] /= S(2);
  w[m] /= S(2);
  return w;
}

template <class S>
S reznitskaya_apply(const Vector<S>& eta, S dtau, S t) {
  return kernel_weights<S>(t, dtau, eta.size()).dot(eta);
}

// Transforms a whole wave trajectory at once: component i is K applied to the
// time series at node i.
template <class S>
Vector<S> reznitskaya_apply(const WaveTrajectory<S>& w, S t) {
  const Vector<S> weights = kernel_weights<S>(t, w.dt, w.u.rows());
  return (weights.transpose() * w.u).transpose();
}

// Max defect of d/dt K(eta) = K(eta'') over the given times, for analytic
// eta with known second derivative. The time derivative uses a centered
// difference with step h_t; each transform uses its own trapezoid horizon.
template <class S, class F1, class F2>
S transform_identity_defect(F1&& eta, F2&& eta_dd, const std::vector<S>& ts,
                            S h_t = S(5e-4), S dtau = S(1e-3)) {
  auto apply_to = [&](auto&& fn, S t) {
    const S tau_max = kernel_horizon(t);
    const int m = int(std::ceil(tau_max / dtau));
    Vector<S> series(m + 1);
    for (int j = 0; j <= m; ++j) series[j] = fn(S(j) * dtau);
    return reznitskaya_apply(series, dtau, t);
  };
  S worst = S(0);
  for (const S t : ts) {
    if (!(t - h_t > S(0)))
      throw std::invalid_argument("transform_identity_defect: t - h_t must stay positive");
    const S lhs = (apply_to(eta, t + h_t) - apply_to(eta, t - h_t)) / (S(2) * h_t);
    const S rhs = apply_to(eta_dd, t);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

// Relative L2 mismatch between the transformed wave solution and the
// parabolic solution of the same model on the same grid, at each requested
// time (snapped to parabolic levels). On a shared grid both solvers
// discretize the identical spatial operator, so this isolates the time
// discretization error.
template <class S>
std::vector<S> transform_equivalence_errors(const DiffusionModel<S>& model,
                                            DegeneracyKind kind, const Grid<S>& grid,
                                            const Field<S>& u0, const std::vector<S>& ts) {
  if (ts.empty()) return {};
  S t_hi = S(0);
  for (const S t : ts) {
    if (!(t > S(0)) || t > grid.T)
      throw std::invalid_argument("transform_equivalence_errors: times must lie in (0, T]");
    t_hi = std::max(t_hi, t);
  }

  const Trajectory<S> par = solve_parabolic(model, kind, grid, u0);

  // One wave solve covers every requested time. Refining the grid tightens
  // the CFL step, so the transform quadrature refines along with it.
  const S t_max = kernel_horizon(t_hi);
  Field<S> w0 = u0;
  if (kind == DegeneracyKind::Weak) w0.values[0] = S(0);  // wave problem is Dirichlet at 0
  const WaveTrajectory<S> w = solve_wave(model, grid.ell, grid.nx, t_max, w0);

  std::vector<S> errs;
  errs.reserve(ts.size());
  for (const S t : ts) {
    const int n0 = std::max(1, int(std::llround(t / grid.dt())));
    const S t_snap = grid.t(n0);
    const Vector<S> ku = reznitskaya_apply(w, t_snap);
    const Vector<S> ref = par.u.row(n0).transpose();
    errs.push_back(std::sqrt(trapezoid_sq((ku - ref).eval(), grid.dx()) /
                             trapezoid_sq(ref, grid.dx())));
  }
  return errs;
}

}  // namespace degenid
