#pragma once

#include "parabolic.hpp"

#include <cstdint>
#include <random>
#include <variant>

namespace degenid {

// Spatial weight multiplying the measured gradient.
enum class WeightKind { X, X2, XAlpha };

// Which observation channel a data set carries.
enum class ObsKind { Interior, Boundary };

template <class S>
S weight_value(WeightKind w, S x, S alpha = S(0)) {
  switch (w) {
    case WeightKind::X: return x;
    case WeightKind::X2: return x * x;
    case WeightKind::XAlpha: return std::pow(x, alpha);
  }
  return S(0);
}

// Interior data at one time: gamma ~ du/dt(., t0) and beta ~ w(x) du/dx(., t0),
// with t0 snapped to the trajectory level recorded here. weight_kind (and its
// exponent when the weight is x^alpha) records how beta was weighted.
template <class S>
struct InteriorObservation {
  S t0;
  int level;
  Vector<S> gamma;
  Vector<S> beta;
  WeightKind weight_kind = WeightKind::X;
  S weight_alpha = S(0);
};

// Boundary flux proxy du/dx(ell, t) per time level 0..nt.
template <class S>
struct BoundaryObservation {
  Vector<S> eta;
};

template <class S>
struct Observation {
  Grid<S> grid;
  std::variant<InteriorObservation<S>, BoundaryObservation<S>> data;
};

// Nodal du/dx, second order everywhere: centered inside, one sided at the
// ends (exact on quadratics, which the boundary checks rely on).
template <class D, class S = typename D::Scalar>
Vector<S> gradient_second_order(const Eigen::MatrixBase<D>& u, S dx) {
  const auto n = u.size();
  if (n < 3) throw std::invalid_argument("gradient: need at least three nodes");
  Vector<S> g(n);
  g[0] = (S(-3) * u[0] + S(4) * u[1] - u[2]) / (S(2) * dx);
  for (Eigen::Index i = 1; i < n - 1; ++i) g[i] = (u[i + 1] - u[i - 1]) / (S(2) * dx);
  g[n - 1] = (S(3) * u[n - 1] - S(4) * u[n - 2] + u[n - 3]) / (S(2) * dx);
  return g;
}

// Snap t0 to the nearest time level, at least level 1 so the backward
// difference for gamma has a predecessor.
template <class S>
int snap_time_level(const Grid<S>& g, S t0) {
  if (!(t0 > S(0)) || !(t0 <= g.T))
    throw std::invalid_argument("measure: t0 must lie in (0, T]");
  return std::min(g.nt, std::max(1, int(std::llround(t0 / g.dt()))));
}

template <class S>
InteriorObservation<S> measure_interior(const Trajectory<S>& traj, S t0,
                                        WeightKind weight, S weight_alpha = S(0)) {
  const Grid<S>& g = traj.grid;
  const int n0 = snap_time_level(g, t0);
  InteriorObservation<S> obs;
  obs.level = n0;
  obs.t0 = g.t(n0);
  obs.weight_kind = weight;
  obs.weight_alpha = weight_alpha;
  obs.gamma = ((traj.u.row(n0) - traj.u.row(n0 - 1)) / g.dt()).transpose();
  obs.beta = gradient_second_order(traj.u.row(n0).transpose().eval(), g.dx());
  for (int i = 0; i < g.nodes(); ++i) obs.beta[i] *= weight_value(weight, g.x(i), weight_alpha);
  return obs;
}

template <class S>
BoundaryObservation<S> measure_boundary_flux(const Trajectory<S>& traj) {
  const Grid<S>& g = traj.grid;
  const int last = g.nodes() - 1;
  BoundaryObservation<S> obs;
  obs.eta.resize(g.nt + 1);
  for (int n = 0; n <= g.nt; ++n)
    obs.eta[n] = (S(3) * traj.u(n, last) - S(4) * traj.u(n, last - 1) + traj.u(n, last - 2)) /
                 (S(2) * g.dx());
  return obs;
}

// Uniform draw on [-1, 1) from raw engine bits; fixed mapping keeps noisy
// artifacts bit identical across platforms.
inline double uniform_pm1(std::mt19937_64& eng) {
  const double u01 = double(eng() >> 11) * 0x1.0p-53;
  return 2.0 * u01 - 1.0;
}

template <class S>
struct NoiseSpec {
  S level;  // relative level, e.g. 0.01 for 1%
  std::uint64_t seed;
};

namespace detail {

template <class S>
void perturb_channel(Vector<S>& d, S level, std::mt19937_64& eng) {
  const S scale = level * d.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] += scale * S(uniform_pm1(eng));
}

}  // namespace detail

// d -> d + level * max|d| * U, U iid uniform(-1, 1), each channel scaled by
// its own sup norm. Draw order: gamma nodes then beta nodes, or eta levels.
// Level zero never touches the engine.
template <class S>
Observation<S> add_noise(const Observation<S>& obs, const NoiseSpec<S>& spec) {
  if (!(spec.level >= S(0)) || !(spec.level < S(1)))
    throw std::invalid_argument("add_noise: level must lie in [0, 1)");
  if (spec.level == S(0)) return obs;
  Observation<S> out = obs;
  std::mt19937_64 eng(spec.seed);
  if (auto* in = std::get_if<InteriorObservation<S>>(&out.data)) {
    detail::perturb_channel(in->gamma, spec.level, eng);
    detail::perturb_channel(in->beta, spec.level, eng);
  } else {
    detail::perturb_channel(std::get<BoundaryObservation<S>>(out.data).eta, spec.level, eng);
  }
  return out;
}

namespace detail {

// Linear interpolation of nodal values from one uniform mesh to another over
// the same interval.
template <class S>
Vector<S> interp_uniform(const Vector<S>& fine, S dx_fine, S dx_coarse, Eigen::Index n_coarse) {
  Vector<S> out(n_coarse);
  for (Eigen::Index i = 0; i < n_coarse; ++i) {
    const S x = S(i) * dx_coarse;
    const S s = x / dx_fine;
    const auto j = std::min(Eigen::Index(fine.size() - 2), Eigen::Index(std::floor(s)));
    const S w = std::min(S(1), s - S(j));
    out[i] = (S(1) - w) * fine[j] + w * fine[j + 1];
  }
  return out;
}

}  // namespace detail

// Generates observation data on a strictly finer grid and restricts it to the
// inversion grid by linear interpolation. This is the honest-data path; its
// measurement bias is documented by the property tests. The presets instead
// measure directly on the inversion grid (see the runner).
template <class S, class U0>
Observation<S> synthesize_interior(const DiffusionModel<S>& model, DegeneracyKind kind,
                                   const Grid<S>& data_grid, const Grid<S>& inversion_grid,
                                   U0&& u0, const SourceFn<std::type_identity_t<S>>& f, S t0, WeightKind weight,
                                   S weight_alpha = S(0)) {
  if (!(data_grid.dx() < inversion_grid.dx()) || !(data_grid.dt() < inversion_grid.dt()) ||
      data_grid.ell != inversion_grid.ell || data_grid.T != inversion_grid.T)
    throw std::invalid_argument("synthesize: data grid must be strictly finer on the same domain");
  const Trajectory<S> traj =
      solve_parabolic(model, kind, data_grid, sample_field(data_grid, u0), f);
  const InteriorObservation<S> fine = measure_interior(traj, t0, weight, weight_alpha);
  InteriorObservation<S> coarse;
  coarse.level = snap_time_level(inversion_grid, t0);
  coarse.t0 = inversion_grid.t(coarse.level);
  coarse.weight_kind = weight;
  coarse.weight_alpha = weight_alpha;
  coarse.gamma = detail::interp_uniform(fine.gamma, data_grid.dx(), inversion_grid.dx(),
                                        inversion_grid.nodes());
  coarse.beta = detail::interp_uniform(fine.beta, data_grid.dx(), inversion_grid.dx(),
                                       inversion_grid.nodes());
  return Observation<S>{inversion_grid, std::move(coarse)};
}

template <class S, class U0>
Observation<S> synthesize_boundary(const DiffusionModel<S>& model, DegeneracyKind kind,
                                   const Grid<S>& data_grid, const Grid<S>& inversion_grid,
                                   U0&& u0, const SourceFn<std::type_identity_t<S>>& f) {
  if (!(data_grid.dx() < inversion_grid.dx()) || !(data_grid.dt() < inversion_grid.dt()) ||
      data_grid.ell != inversion_grid.ell || data_grid.T != inversion_grid.T)
    throw std::invalid_argument("synthesize: data grid must be strictly finer on the same domain");
  const Trajectory<S> traj =
      solve_parabolic(model, kind, data_grid, sample_field(data_grid, u0), f);
  const BoundaryObservation<S> fine = measure_boundary_flux(traj);
  BoundaryObservation<S> coarse;
  coarse.eta = detail::interp_uniform(fine.eta, data_grid.dt(), inversion_grid.dt(),
                                      inversion_grid.nt + 1);
  return Observation<S>{inversion_grid, std::move(coarse)};
}

// Kind-dispatched front end; interior synthesis reads t0/weight, boundary
// ignores them.
template <class S, class U0>
Observation<S> synthesize(const DiffusionModel<S>& model, DegeneracyKind kind,
                          const Grid<S>& data_grid, const Grid<S>& inversion_grid, U0&& u0,
                          const SourceFn<std::type_identity_t<S>>& f, ObsKind obs_kind,
                          S t0 = S(0), WeightKind weight = WeightKind::X,
                          S weight_alpha = S(0)) {
  if (obs_kind == ObsKind::Boundary)
    return synthesize_boundary(model, kind, data_grid, inversion_grid,
                               std::forward<U0>(u0), f);
  return synthesize_interior(model, kind, data_grid, inversion_grid, std::forward<U0>(u0), f,
                             t0, weight, weight_alpha);
}

}  // namespace degenid
