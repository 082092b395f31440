#pragma once

#include "grid.hpp"

#include <variant>

namespace degenid {

// Boundary regime of x^alpha a(x): Weak keeps the Dirichlet condition at the
// origin (alpha in (0,1)), Strong replaces it by the zero-flux condition
// (alpha in [1,2)), NonDegenerate is the classical alpha = 0 problem.
enum class DegeneracyKind { Weak, Strong, NonDegenerate };

template <class S>
bool kind_compatible(DegeneracyKind kind, S alpha) {
  switch (kind) {
    case DegeneracyKind::Weak: return alpha > S(0) && alpha < S(1);
    case DegeneracyKind::Strong: return alpha >= S(1) && alpha < S(2);
    case DegeneracyKind::NonDegenerate: return alpha == S(0);
  }
  return false;
}

template <class S>
DegeneracyKind kind_for(S alpha) {
  if (alpha == S(0)) return DegeneracyKind::NonDegenerate;
  if (alpha > S(0) && alpha < S(1)) return DegeneracyKind::Weak;
  if (alpha >= S(1) && alpha < S(2)) return DegeneracyKind::Strong;
  throw std::invalid_argument("kind_for: alpha must lie in [0, 2)");
}

template <class S>
struct ConstantProfile { S a; };

// a(x) = b x + c
template <class S>
struct AffineProfile { S b, c; };

// a(x) = b x^2 + c x + h
template <class S>
struct QuadraticProfile { S b, c, h; };

// a given by its values at the nx+1 half nodes of some grid.
template <class S>
struct TabulatedProfile { Vector<S> half_node_values; };

template <class S>
using Profile = std::variant<ConstantProfile<S>, AffineProfile<S>,
                             QuadraticProfile<S>, TabulatedProfile<S>>;

// Diffusion coefficient x^alpha a(x).
template <class S>
struct DiffusionModel {
  S alpha;
  Profile<S> a;

  static DiffusionModel constant(S a, S alpha = S(1)) {
    return make(alpha, ConstantProfile<S>{a});
  }
  static DiffusionModel power(S alpha) {
    return make(alpha, ConstantProfile<S>{S(1)});
  }
  static DiffusionModel affine(S alpha, S b, S c) {
    return make(alpha, AffineProfile<S>{b, c});
  }
  static DiffusionModel quadratic(S alpha, S b, S c, S h) {
    return make(alpha, QuadraticProfile<S>{b, c, h});
  }
  static DiffusionModel tabulated(S alpha, Vector<S> half_node_values) {
    return make(alpha, TabulatedProfile<S>{std::move(half_node_values)});
  }

  // Pointwise a(x) for the analytic profiles. Tabulated values are tied to
  // half nodes of a grid this model does not know, so they have no pointwise
  // evaluation here.
  S a_at(S x) const {
    if (auto* c = std::get_if<ConstantProfile<S>>(&a)) return c->a;
    if (auto* l = std::get_if<AffineProfile<S>>(&a)) return l->b * x + l->c;
    if (auto* q = std::get_if<QuadraticProfile<S>>(&a)) return (q->b * x + q->c) * x + q->h;
    throw std::logic_error("a_at: tabulated profile has no pointwise form");
  }

 private:
  static DiffusionModel make(S alpha, Profile<S> p) {
    if (!(alpha >= S(0)) || !(alpha < S(2)))
      throw std::invalid_argument("model: alpha must lie in [0, 2)");
    return DiffusionModel{alpha, std::move(p)};
  }
};

// kappa_{i+1/2} = x_{i+1/2}^alpha a(x_{i+1/2}) for i = 0..nx. Positivity of a
// is enforced here, the one place every solver passes through.
template <class S>
Vector<S> coefficient_at_half_nodes(const DiffusionModel<S>& m, const Grid<S>& g) {
  Vector<S> kappa(g.nx + 1);
  if (auto* tab = std::get_if<TabulatedProfile<S>>(&m.a)) {
    if (tab->half_node_values.size() != g.nx + 1)
      throw std::invalid_argument("coefficient: tabulated profile needs nx+1 half-node values");
    for (int i = 0; i <= g.nx; ++i)
      kappa[i] = std::pow(g.x_half(i), m.alpha) * tab->half_node_values[i];
  } else {
    for (int i = 0; i <= g.nx; ++i)
      kappa[i] = std::pow(g.x_half(i), m.alpha) * m.a_at(g.x_half(i));
  }
  if (!(kappa.minCoeff() > S(0)) || !kappa.allFinite())
    throw std::domain_error("coefficient: a(x) must be positive at every half node");
  return kappa;
}

}  // namespace degenid
