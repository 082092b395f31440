#pragma once

#include "inversion.hpp"

namespace degenid {

// Weighted Poincare constant: ||u||^2 <= C_p int x^alpha |u'|^2 for the
// admissible class of the regime. alpha = 1 has the log form and only makes
// sense for ell <= 1.
template <class S>
S poincare_constant(S alpha, S ell) {
  if (!(alpha >= S(0)) || !(alpha < S(2)) || !(ell > S(0)))
    throw std::invalid_argument("poincare_constant: need alpha in [0, 2) and ell > 0");
  if (alpha == S(1)) {
    if (ell > S(1))
      throw std::invalid_argument("poincare_constant: the alpha = 1 form requires ell <= 1");
    return ell * (S(1) - std::log(ell));
  }
  return std::pow(ell, S(2) - alpha) / (S(2) - alpha);
}

template <class S>
struct PoincareReport {
  S constant;
  S worst_ratio;  // max over samples of ||u||^2 / int x^alpha |u'|^2
  int samples_used;
  bool pass;      // worst_ratio <= constant * 1.01
};

// Inequality check over caller-supplied admissible samples. Rejects samples
// that violate the regime's endpoint constraints (u(ell) = 0 always, u(0) = 0
// while the origin keeps its Dirichlet condition, i.e. alpha < 1); skips
// identically zero samples (0/0).
template <class S>
PoincareReport<S> verify_poincare(const std::vector<Field<S>>& samples, S alpha, S ell) {
  const S cp = poincare_constant(alpha, ell);
  S worst = S(0);
  int used = 0;
  for (const Field<S>& u : samples) {
    if (u.grid.ell != ell)
      throw std::invalid_argument("verify_poincare: sample lives on a different interval");
    const S sup = u.values.cwiseAbs().maxCoeff();
    if (sup == S(0)) continue;
    if (std::abs(u.values[u.values.size() - 1]) > S(1e-12) * sup ||
        (alpha < S(1) && std::abs(u.values[0]) > S(1e-12) * sup))
      throw std::invalid_argument("verify_poincare: sample violates the boundary constraints");
    const S denom = weighted_h1_seminorm_sq(u, alpha);
    if (denom <= S(0)) continue;
    worst = std::max(worst, l2_norm_sq(u) / denom);
    ++used;
  }
  return {cp, worst, used, worst <= cp * S(1.01)};
}

// Monte Carlo front end: random piecewise linear samples with 8..40 interior
// nodes, iid values in [-1, 1], endpoints pinned per regime.
template <class S>
PoincareReport<S> verify_poincare(S alpha, S ell, int n_samples = 1000,
                                  std::uint64_t seed = 20260816) {
  std::mt19937_64 eng(seed);
  auto u01 = [&] { return S(double(eng() >> 11) * 0x1.0p-53); };

  std::vector<Field<S>> samples;
  samples.reserve(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    const int nx = 8 + int(eng() % 33);  // 8..40
    Grid<S> g(ell, nx, S(1), 8);
    Vector<S> v(g.nodes());
    for (int i = 0; i < g.nodes(); ++i) v[i] = S(2) * u01() - S(1);
    v[g.nodes() - 1] = S(0);
    if (alpha < S(1)) v[0] = S(0);
    samples.emplace_back(g, std::move(v));
  }
  return verify_poincare(samples, alpha, ell);
}

template <class S>
struct LipschitzCase {
  S lhs;       // coefficient distance
  S rhs;       // combined data norm at t0
  S constant;  // stability constant of the estimate
  S mu_hat;    // smallest weighted gradient energy among the two solutions
  bool pass;   // lhs <= constant * rhs * 1.05
};

namespace detail {

template <class S>
Field<S> level_field(const Trajectory<S>& traj, int n) {
  return Field<S>(traj.grid, traj.u.row(n).transpose());
}

// rhs^2 = ||du/dt(., t0)||^2 + int w(x) |d(u2-u1)/dx(., t0)|^2 applied to the
// difference of two solutions sharing a grid; the time slope is the same
// backward difference the measurements use.
template <class S>
S data_norm_at_t0(const Trajectory<S>& t1, const Trajectory<S>& t2, int n0, S weight_exponent) {
  const Grid<S>& g = t1.grid;
  const Vector<S> wdiff = (t2.u.row(n0) - t1.u.row(n0)).transpose();
  const Vector<S> wprev = (t2.u.row(n0 - 1) - t1.u.row(n0 - 1)).transpose();
  const S dt_part = trapezoid_sq(((wdiff - wprev) / g.dt()).eval(), g.dx());
  const S dx_part = weighted_h1_seminorm_sq(Field<S>(g, wdiff), weight_exponent);
  return std::sqrt(dt_part + dx_part);
}

}  // namespace detail

// Stability estimate for the constant family (alpha = 1): two forward solves,
// |a2 - a1| against the weighted data norm of their difference at t0, with
// C = (sqrt(C_p) + a_high) / mu_hat.
template <class S>
LipschitzCase<S> lipschitz_check_constant(S a1, S a2, S a_high, const Grid<S>& grid,
                                          const Vector<S>& u0, S t0) {
  const Field<S> u0f(grid, u0);
  const Trajectory<S> t1 =
      solve_parabolic(DiffusionModel<S>::constant(a1), DegeneracyKind::Strong, grid, u0f);
  const Trajectory<S> t2 =
      solve_parabolic(DiffusionModel<S>::constant(a2), DegeneracyKind::Strong, grid, u0f);
  const int n0 = snap_time_level(grid, t0);

  const S mu = std::min(weighted_h1_seminorm_sq(detail::level_field(t1, n0), S(1)),
                        weighted_h1_seminorm_sq(detail::level_field(t2, n0), S(1)));
  if (mu < S(1e-10))
    throw std::domain_error("lipschitz check: solution gradients too small to be informative");

  LipschitzCase<S> r;
  r.lhs = std::abs(a2 - a1);
  r.rhs = detail::data_norm_at_t0(t1, t2, n0, S(1));
  r.constant = (std::sqrt(poincare_constant(S(1), grid.ell)) + a_high) / mu;
  r.mu_hat = mu;
  r.pass = r.lhs <= r.constant * r.rhs * S(1.05);
  return r;
}

// Stability estimate for the power family on ell < 1: exponents sorted so
// alpha1 <= alpha2, difference measured with weight x^{alpha2}, and
// C = (sqrt(C_p(alpha1)) + ell^{(alpha2-alpha1)/2}) / (ell (1 - ell) mu_hat).
template <class S>
LipschitzCase<S> lipschitz_check_power(S alpha_a, S alpha_b, const Grid<S>& grid,
                                       const Vector<S>& u0, S t0) {
  if (!(grid.ell < S(1)))
    throw std::invalid_argument("lipschitz check: the power family estimate needs ell < 1");
  const S alpha1 = std::min(alpha_a, alpha_b);
  const S alpha2 = std::max(alpha_a, alpha_b);
  const Field<S> u0f(grid, u0);
  const Trajectory<S> t1 =
      solve_parabolic(DiffusionModel<S>::power(alpha1), kind_for(alpha1), grid, u0f);
  const Trajectory<S> t2 =
      solve_parabolic(DiffusionModel<S>::power(alpha2), kind_for(alpha2), grid, u0f);
  const int n0 = snap_time_level(grid, t0);

  const S mu = std::min(weighted_h1_seminorm_sq(detail::level_field(t1, n0), alpha1),
                        weighted_h1_seminorm_sq(detail::level_field(t2, n0), alpha2));
  if (mu < S(1e-10))
    throw std::domain_error("lipschitz check: solution gradients too small to be informative");

  LipschitzCase<S> r;
  r.lhs = alpha2 - alpha1;
  r.rhs = detail::data_norm_at_t0(t1, t2, n0, alpha2);
  r.constant = (std::sqrt(poincare_constant(alpha1, grid.ell)) +
                std::pow(grid.ell, (alpha2 - alpha1) / S(2))) /
               (grid.ell * (S(1) - grid.ell) * mu);
  r.mu_hat = mu;
  r.pass = r.lhs <= r.constant * r.rhs * S(1.05);
  return r;
}

template <class S>
struct StabilityQuotients {
  Vector<S> quotients;
  S median;
  S max;
  bool all_finite;
};

namespace detail {

template <class S>
S median_of(Vector<S> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return (n % 2 == 1) ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / S(2);
}

}  // namespace detail

// Empirical whole-map stability: perturb both data channels by one random
// scalar eps in (0, eps_max], re-invert, and record
// K = |a_true - a_recovered| / (||gamma - gamma_eps|| + ||beta - beta_eps||).
// The target in `spec` must be noiseless interior data for `truth`.
template <class S>
StabilityQuotients<S> stability_quotients(const InverseProblemSpec<S>& spec, S truth,
                                          int n_trials = 50, S eps_max = S(0.05),
                                          std::uint64_t seed = 7) {
  const auto* target = std::get_if<InteriorObservation<S>>(&spec.target.data);
  if (!target) throw std::invalid_argument("stability_quotients: needs interior target data");
  std::mt19937_64 eng(seed);

  StabilityQuotients<S> out;
  out.quotients.resize(n_trials);
  const S dx = spec.grid.dx();
  for (int j = 0; j < n_trials; ++j) {
    S eps = S(0);
    while (!(eps > S(0))) eps = eps_max * S(double(eng() >> 11) * 0x1.0p-53);

    InverseProblemSpec<S> perturbed = spec;
    auto& data = std::get<InteriorObservation<S>>(perturbed.target.data);
    data.gamma.array() += eps;
    data.beta.array() += eps;
    const InversionResult<S> rec = minimize(perturbed);

    const S denom = std::sqrt(trapezoid_sq((data.gamma - target->gamma).eval(), dx)) +
                    std::sqrt(trapezoid_sq((data.beta - target->beta).eval(), dx));
    out.quotients[j] = std::abs(truth - rec.params[0]) / denom;
  }
  out.median = detail::median_of(out.quotients);
  out.max = out.quotients.maxCoeff();
  out.all_finite = out.quotients.allFinite();
  return out;
}

template <class S>
struct CarlemanScan {
  Vector<S> s;  // requested s values plus the doubled plateau probe at the end
  Vector<S> r;
  bool plateau_pass;  // r(2 s_max) <= 1.2 r(s_max)
};

// r(s) = s int f^2 e^{2s phi} / int (f')^2 e^{2s phi} on the window
// (theta + delta, 1) with phi(x) = exp(lambda (x - theta)^2). Weights are
// rescaled by e^{-2s max phi} before integrating, otherwise they overflow for
// the larger s; the ratio is unchanged. The window mesh must be fine enough
// to resolve the O(1/s) boundary layer of the weight at x = 1.
template <class S, class F>
CarlemanScan<S> carleman_ratio_scan(F&& f, S theta, S delta, S lambda,
                                    std::vector<S> s_values, int n_mesh = 400000) {
  if (!(theta > S(0)) || !(delta > S(0)) || !(theta + delta < S(1)))
    throw std::invalid_argument("carleman: window (theta + delta, 1) is empty");
  if (s_values.empty()) throw std::invalid_argument("carleman: need at least one s");
  if (n_mesh < 8) throw std::invalid_argument("carleman: mesh too coarse");

  const S x0 = theta + delta;
  const S dx = (S(1) - x0) / S(n_mesh);
  Vector<S> fx(n_mesh + 1), phi(n_mesh + 1);
  for (int i = 0; i <= n_mesh; ++i) {
    const S x = x0 + S(i) * dx;
    fx[i] = f(x);
    phi[i] = std::exp(lambda * (x - theta) * (x - theta));
  }
  if (!(fx.cwiseAbs().maxCoeff() > S(0)))
    throw std::invalid_argument("carleman: f must not vanish identically");
  if (std::abs(fx[n_mesh]) > S(1e-12) * fx.cwiseAbs().maxCoeff())
    throw std::invalid_argument("carleman: f must vanish at x = 1");
  const Vector<S> dfx = gradient_second_order(fx, dx);
  const S phi_max = phi.maxCoeff();

  std::sort(s_values.begin(), s_values.end());
  s_values.push_back(S(2) * s_values.back());

  CarlemanScan<S> out;
  out.s = Eigen::Map<const Vector<S>>(s_values.data(), s_values.size());
  out.r.resize(out.s.size());
  for (Eigen::Index k = 0; k < out.s.size(); ++k) {
    const S s = out.s[k];
    const Vector<S> w = (S(2) * s * (phi.array() - phi_max)).exp().matrix();
    const S num = trapezoid((fx.array().square() * w.array()).matrix().eval(), dx);
    const S den = trapezoid((dfx.array().square() * w.array()).matrix().eval(), dx);
    out.r[k] = s * num / den;
  }
  const auto n = out.r.size();
  out.plateau_pass = out.r[n - 1] <= S(1.2) * out.r[n - 2];
  return out;
}

}  // namespace degenid
