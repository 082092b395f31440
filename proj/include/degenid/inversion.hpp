#pragma once

#include "observations.hpp"

#include <chrono>
#include <string>
#include <vector>

namespace degenid {

// Which coefficient parameters the optimizer sees.
enum class ParamFamily {
  ConstantA,        // {a},           x^alpha a
  PowerAlpha,       // {alpha},       x^alpha
  ProfileAffine,    // {b, c},        x^alpha (b x + c)
  ProfileQuadratic, // {b, c, h},     x^alpha (b x^2 + c x + h)
  PowerQuadratic,   // {alpha, b, c, h}
};

inline int family_dim(ParamFamily f) {
  switch (f) {
    case ParamFamily::ConstantA: return 1;
    case ParamFamily::PowerAlpha: return 1;
    case ParamFamily::ProfileAffine: return 2;
    case ParamFamily::ProfileQuadratic: return 3;
    case ParamFamily::PowerQuadratic: return 4;
  }
  return 0;
}

inline std::vector<std::string> family_param_names(ParamFamily f) {
  switch (f) {
    case ParamFamily::ConstantA: return {"a"};
    case ParamFamily::PowerAlpha: return {"alpha"};
    case ParamFamily::ProfileAffine: return {"b", "c"};
    case ParamFamily::ProfileQuadratic: return {"b", "c", "h"};
    case ParamFamily::PowerQuadratic: return {"alpha", "b", "c", "h"};
  }
  return {};
}

template <class S>
struct InverseProblemSpec {
  ParamFamily family;
  S fixed_alpha;      // alpha for the families that do not optimize it
  Vector<S> lower;    // component bounds, one per free parameter
  Vector<S> upper;
  Vector<S> initial;  // strictly inside the box
  DegeneracyKind kind;
  Grid<S> grid;
  Vector<S> u0;       // nodal values on grid
  SourceFn<S> f;
  WeightKind weight;  // interior measurement weight
  Observation<S> target;

  void validate() const {
    const int d = family_dim(family);
    if (lower.size() != d || upper.size() != d || initial.size() != d)
      throw std::invalid_argument("inverse spec: parameter vectors must match the family size");
    for (int k = 0; k < d; ++k)
      if (!(lower[k] < upper[k]) || !(initial[k] > lower[k]) || !(initial[k] < upper[k]))
        throw std::invalid_argument("inverse spec: initial guess must lie strictly inside the box");
    if (u0.size() != grid.nodes())
      throw std::invalid_argument("inverse spec: u0 must have nx+2 values");
    if (!same_grid(target.grid, grid))
      throw std::invalid_argument("inverse spec: target observation lives on a different grid");
  }
};

template <class S>
DiffusionModel<S> model_from_params(const InverseProblemSpec<S>& spec, const Vector<S>& p) {
  switch (spec.family) {
    case ParamFamily::ConstantA:
      return DiffusionModel<S>::constant(p[0], spec.fixed_alpha);
    case ParamFamily::PowerAlpha:
      return DiffusionModel<S>::power(p[0]);
    case ParamFamily::ProfileAffine:
      return DiffusionModel<S>::affine(spec.fixed_alpha, p[0], p[1]);
    case ParamFamily::ProfileQuadratic:
      return DiffusionModel<S>::quadratic(spec.fixed_alpha, p[0], p[1], p[2]);
    case ParamFamily::PowerQuadratic:
      return DiffusionModel<S>::quadratic(p[0], p[1], p[2], p[3]);
  }
  throw std::logic_error("model_from_params: unknown family");
}

template <class S>
Trajectory<S> forward_solve(const InverseProblemSpec<S>& spec, const Vector<S>& p) {
  const DiffusionModel<S> model = model_from_params(spec, p);
  return solve_parabolic(model, spec.kind, spec.grid, Field<S>(spec.grid, spec.u0), spec.f);
}

// J(p) = 1/2 ||gamma(p) - gamma*||^2 + 1/2 ||beta(p) - beta*||^2 in the
// trapezoid L2 norm at the observation's snapped time level.
template <class S>
S cost_interior(const InverseProblemSpec<S>& spec, const Vector<S>& p) {
  const auto* target = std::get_if<InteriorObservation<S>>(&spec.target.data);
  if (!target) throw std::invalid_argument("cost_interior: target is not interior data");
  const Trajectory<S> traj = forward_solve(spec, p);
  const S alpha_w = model_from_params(spec, p).alpha;
  const InteriorObservation<S> got = measure_interior(traj, target->t0, spec.weight, alpha_w);
  const S dx = spec.grid.dx();
  return (trapezoid_sq((got.gamma - target->gamma).eval(), dx) +
          trapezoid_sq((got.beta - target->beta).eval(), dx)) / S(2);
}

// J(p) = 1/2 int_0^T |eta(p) - eta*|^2 dt by the trapezoid rule in time.
template <class S>
S cost_boundary(const InverseProblemSpec<S>& spec, const Vector<S>& p) {
  const auto* target = std::get_if<BoundaryObservation<S>>(&spec.target.data);
  if (!target) throw std::invalid_argument("cost_boundary: target is not boundary data");
  const Trajectory<S> traj = forward_solve(spec, p);
  const BoundaryObservation<S> got = measure_boundary_flux(traj);
  return trapezoid_sq((got.eta - target->eta).eval(), spec.grid.dt()) / S(2);
}

template <class S>
S cost(const InverseProblemSpec<S>& spec, const Vector<S>& p) {
  if (std::holds_alternative<InteriorObservation<S>>(spec.target.data))
    return cost_interior(spec, p);
  return cost_boundary(spec, p);
}

// Finite difference gradient of an arbitrary box-constrained objective,
// centered with step max(1e-6, 1e-6 |p_k|), falling back to the one sided
// difference when a probe would leave the box.
template <class S, class F>
Vector<S> gradient_fd(F&& objective, const Vector<S>& p, const Vector<S>& lower,
                      const Vector<S>& upper) {
  const int d = int(p.size());
  Vector<S> g(d);
  S j_center = S(0);  // computed on demand, only the one sided branches need it
  bool have_center = false;
  auto center = [&] {
    if (!have_center) { j_center = objective(p); have_center = true; }
    return j_center;
  };
  for (int k = 0; k < d; ++k) {
    const S h = std::max(S(1e-6), S(1e-6) * std::abs(p[k]));
    const bool up_ok = p[k] + h <= upper[k];
    const bool dn_ok = p[k] - h >= lower[k];
    Vector<S> q = p;
    if (up_ok && dn_ok) {
      q[k] = p[k] + h;
      const S jp = objective(q);
      q[k] = p[k] - h;
      g[k] = (jp - objective(q)) / (S(2) * h);
    } else if (up_ok) {
      q[k] = p[k] + h;
      g[k] = (objective(q) - center()) / h;
    } else if (dn_ok) {
      q[k] = p[k] - h;
      g[k] = (center() - objective(q)) / h;
    } else {
      throw std::invalid_argument("gradient_fd: box is narrower than the probe step");
    }
  }
  return g;
}

template <class S>
Vector<S> gradient_fd(const InverseProblemSpec<S>& spec, const Vector<S>& p) {
  return gradient_fd([&spec](const Vector<S>& q) { return cost(spec, q); }, p, spec.lower,
                     spec.upper);
}

template <class S>
struct InversionResult {
  Vector<S> params;
  S cost;
  std::vector<S> cost_history;               // one entry per accepted iterate, J(p0) first
  std::vector<Vector<S>> param_history;
  int iterations;
  std::string termination;                   // cost_tol | grad_tol | max_iterations | line_search_failed
  double wall_seconds;
  bool low_sensitivity_warning;               // weighted gradient energy at the initial guess is tiny
};

namespace detail {

template <class S>
Vector<S> clip_to_box(const Vector<S>& p, const Vector<S>& lo, const Vector<S>& hi) {
  return p.cwiseMax(lo).cwiseMin(hi);
}

// Gradient with active box faces zeroed out; its norm is the stationarity
// measure for the projected method.
template <class S>
Vector<S> projected_gradient(const Vector<S>& g, const Vector<S>& p, const Vector<S>& lo,
                             const Vector<S>& hi) {
  Vector<S> pg = g;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const S span = hi[k] - lo[k];
    if (p[k] <= lo[k] + S(1e-14) * span && g[k] > S(0)) pg[k] = S(0);
    if (p[k] >= hi[k] - S(1e-14) * span && g[k] < S(0)) pg[k] = S(0);
  }
  return pg;
}

}  // namespace detail

// Projected BFGS on the box. Backtracking Armijo line search from t = 1; a
// clean unit step then expands (step doubling while Armijo holds), which is
// what keeps the iteration count low on the concave far side of the optimum
// where every curvature pair is rejected and the direction stays -g.
template <class S>
InversionResult<S> minimize(const InverseProblemSpec<S>& spec, int max_iterations = 100,
                            S cost_tol = S(1e-22), S grad_tol = S(1e-12)) {
  spec.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const S c1 = S(1e-4);
  const int d = family_dim(spec.family);

  InversionResult<S> res;
  res.low_sensitivity_warning = false;
  if (std::holds_alternative<InteriorObservation<S>>(spec.target.data)) {
    // mu-hat check: weighted gradient energy of the initial-guess solution at t0.
    const auto& target = std::get<InteriorObservation<S>>(spec.target.data);
    const Trajectory<S> traj0 = forward_solve(spec, spec.initial);
    const Field<S> ut0(spec.grid, traj0.u.row(target.level).transpose());
    const S mu = weighted_h1_seminorm_sq(ut0, model_from_params(spec, spec.initial).alpha);
    res.low_sensitivity_warning = mu < S(1e-8);
  }

  Vector<S> p = detail::clip_to_box(spec.initial, spec.lower, spec.upper);
  S jp = cost(spec, p);
  res.cost_history.push_back(jp);
  res.param_history.push_back(p);

  Eigen::MatrixX<S> H = Eigen::MatrixX<S>::Identity(d, d);
  Vector<S> g = gradient_fd(spec, p);
  std::string reason = "max_iterations";
  int it = 0;

  while (it < max_iterations) {
    if (jp <= cost_tol) { reason = "cost_tol"; break; }
    if (detail::projected_gradient(g, p, spec.lower, spec.upper).norm() <= grad_tol) {
      reason = "grad_tol";
      break;
    }

    Vector<S> dir = -(H * g);
    if (dir.dot(g) >= S(0)) {  // not a descent direction, restart from steepest descent
      H.setIdentity();
      dir = -g;
    }

    S t = S(1);
    Vector<S> p_new;
    S j_new = S(0);
    bool accepted = false;
    while (t >= S(1e-16)) {
      p_new = detail::clip_to_box((p + t * dir).eval(), spec.lower, spec.upper);
      j_new = cost(spec, p_new);
      if (j_new <= jp + c1 * g.dot(p_new - p)) { accepted = true; break; }
      t /= S(2);
    }
    if (!accepted) { reason = "line_search_failed"; break; }
    // Armijo can accept a step whose decrease is below double resolution
    // (noisy targets bottom out at a positive cost); treat that as failure
    // too, otherwise the loop spins to the iteration cap on null steps.
    if (!(j_new < jp)) { reason = "line_search_failed"; break; }

    if (t == S(1)) {
      while (true) {  // expansion: keep doubling while Armijo still holds
        const Vector<S> p2 =
            detail::clip_to_box((p + S(2) * t * dir).eval(), spec.lower, spec.upper);
        if ((p2 - p_new).cwiseAbs().maxCoeff() == S(0)) break;
        const S j2 = cost(spec, p2);
        if (j2 <= jp + c1 * g.dot(p2 - p)) {
          t *= S(2);
          p_new = p2;
          j_new = j2;
        } else {
          break;
        }
      }
    }

    const Vector<S> g_new = gradient_fd(spec, p_new);
    const Vector<S> s = p_new - p;
    const Vector<S> y = g_new - g;
    const S sy = s.dot(y);
    if (sy > S(1e-12) * s.norm() * y.norm()) {
      const S rho = S(1) / sy;
      const Eigen::MatrixX<S> V =
          Eigen::MatrixX<S>::Identity(d, d) - rho * s * y.transpose();
      H = V * H * V.transpose() + rho * s * s.transpose();
    }

    p = p_new;
    jp = j_new;
    g = g_new;
    ++it;
    res.cost_history.push_back(jp);
    res.param_history.push_back(p);
    if (jp <= cost_tol) { reason = "cost_tol"; break; }
  }

  res.params = p;
  res.cost = jp;
  res.iterations = it;
  res.termination = reason;
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

// Least squares fit of log e_{n+1} = kappa log e_n + log c over the pairs
// whose e_n falls in (1e-12, 1e-1) and whose e_{n+1} is positive.
template <class S>
struct OrderEstimate {
  S rate;
  S prefactor;
  int pairs;
};

template <class S>
OrderEstimate<S> estimate_order(const std::vector<S>& errors) {
  std::vector<std::pair<S, S>> pts;
  for (std::size_t n = 0; n + 1 < errors.size(); ++n) {
    const S en = errors[n], en1 = errors[n + 1];
    if (en > S(1e-12) && en < S(1e-1) && en1 > S(0))
      pts.emplace_back(std::log(en), std::log(en1));
  }
  if (pts.size() < 4)
    throw std::invalid_argument("estimate_order: need at least four usable error pairs");
  Eigen::MatrixX<S> A(pts.size(), 2);
  Vector<S> b(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    A(i, 0) = pts[i].first;
    A(i, 1) = S(1);
    b[i] = pts[i].second;
  }
  const Vector<S> sol = A.colPivHouseholderQr().solve(b);
  return {sol[0], std::exp(sol[1]), int(pts.size())};
}

// Convergence order of an iterate sequence against the known answer,
// e_n = |p_n - truth| (Euclidean norm for multi-parameter families).
template <class S>
OrderEstimate<S> estimate_order(const std::vector<Vector<S>>& iterates, const Vector<S>& truth) {
  std::vector<S> errors;
  errors.reserve(iterates.size());
  for (const auto& p : iterates) errors.push_back((p - truth).norm());
  return estimate_order(errors);
}

template <class S>
struct NoiseSweepRow {
  S level;
  std::uint64_t seed;
  Vector<S> params;
  S cost;
  int iterations;
};

// Re-runs the inversion against noisy copies of the target, one row per
// (level, seed). Level zero rows reproduce the noiseless run bit for bit.
template <class S>
std::vector<NoiseSweepRow<S>> noise_sweep(const InverseProblemSpec<S>& spec,
                                          const std::vector<S>& levels,
                                          const std::vector<std::uint64_t>& seeds) {
  std::vector<NoiseSweepRow<S>> rows;
  rows.reserve(levels.size() * seeds.size());
  for (const S level : levels) {
    for (const auto seed : seeds) {
      InverseProblemSpec<S> noisy = spec;
      noisy.target = add_noise(spec.target, NoiseSpec<S>{level, seed});
      const InversionResult<S> r = minimize(noisy);
      rows.push_back({level, seed, r.params, r.cost, r.iterations});
    }
  }
  return rows;
}

}  // namespace degenid
