/**
 * @file numcalc.hpp
 * @brief Finite-difference exterior calculus: gradients, Jacobians, pullbacks,
 *        exterior derivatives of one- and two-forms, interior products.
 *
 * All stencils are central. The default gradient step follows
 * h_i = rel_step * (1 + |x_i|). Exterior derivatives default to a coarser
 * step because their inputs are often themselves finite-difference results.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gupred/types.hpp"

namespace gupred {

struct FdOptions {
  double rel_step = 1e-5;
  int order = 2;  // 2 or 4
  std::optional<Box> box{};

  /// Stencil used for first-level derivatives that later get differentiated again.
  static FdOptions smooth() { return FdOptions{1e-3, 4, std::nullopt}; }
  /// Stencil for exterior derivatives.
  static FdOptions exterior() { return FdOptions{1e-4, 2, std::nullopt}; }
};

namespace detail {

inline double step_for(double xi, const FdOptions& opt) { return opt.rel_step * (1.0 + std::abs(xi)); }

inline void check_stencil(const Vector& x, Eigen::Index i, double reach, const FdOptions& opt) {
  if (!opt.box) {
    return;
  }
  if (x(i) - reach < opt.box->lo(i) || x(i) + reach > opt.box->hi(i)) {
    throw DomainEscape("finite-difference stencil leaves the admissible box along axis " +
                       std::to_string(i));
  }
}

/// Central difference of a generic (vector- or scalar-valued) map along axis i.
template <class Fn>
auto central_difference(Fn&& fn, const Vector& x, Eigen::Index i, const FdOptions& opt) {
  const double h = step_for(x(i), opt);
  check_stencil(x, i, opt.order == 4 ? 2.0 * h : h, opt);
  Vector xp = x;
  Vector xm = x;
  xp(i) = x(i) + h;
  xm(i) = x(i) - h;
  // Use the realised step so that rounding of x +- h does not bias the quotient.
  const double span = xp(i) - xm(i);
  if (opt.order == 4) {
    Vector xpp = x;
    Vector xmm = x;
    xpp(i) = x(i) + 2.0 * h;
    xmm(i) = x(i) - 2.0 * h;
    const double h4 = (xpp(i) - xmm(i)) / 4.0;
    return ((8.0 * (fn(xp) - fn(xm)) - (fn(xpp) - fn(xmm))) / (12.0 * h4)).eval();
  }
  return ((fn(xp) - fn(xm)) / span).eval();
}

template <class Fn>
double central_difference_scalar(Fn&& fn, const Vector& x, Eigen::Index i, const FdOptions& opt) {
  const double h = step_for(x(i), opt);
  check_stencil(x, i, opt.order == 4 ? 2.0 * h : h, opt);
  Vector xp = x;
  Vector xm = x;
  xp(i) = x(i) + h;
  xm(i) = x(i) - h;
  if (opt.order == 4) {
    Vector xpp = x;
    Vector xmm = x;
    xpp(i) = x(i) + 2.0 * h;
    xmm(i) = x(i) - 2.0 * h;
    const double h4 = (xpp(i) - xmm(i)) / 4.0;
    return (8.0 * (fn(xp) - fn(xm)) - (fn(xpp) - fn(xmm))) / (12.0 * h4);
  }
  return (fn(xp) - fn(xm)) / (xp(i) - xm(i));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// ScalarField
// ---------------------------------------------------------------------------

/// A real function of n variables, optionally carrying its exact gradient.
class ScalarField {
 public:
  using Eval = std::function<double(const Vector&)>;
  using Grad = std::function<Vector(const Vector&)>;

  ScalarField() = default;
  ScalarField(int arity, Eval eval, Grad grad = {})
      : arity_(arity), eval_(std::move(eval)), grad_(std::move(grad)) {}

  static ScalarField constant(int arity, double c) {
    return ScalarField(
        arity, [c](const Vector&) { return c; },
        [arity](const Vector&) { return Vector::Zero(arity).eval(); });
  }

  [[nodiscard]] int arity() const { return arity_; }
  [[nodiscard]] bool valid() const { return static_cast<bool>(eval_); }
  [[nodiscard]] bool has_exact_gradient() const { return static_cast<bool>(grad_); }

  double operator()(const Vector& x) const {
    if (x.size() != arity_) {
      throw DomainError("scalar field of arity " + std::to_string(arity_) + " evaluated on " +
                        std::to_string(x.size()) + " coordinates");
    }
    return eval_(x);
  }

  /// Exact gradient when registered, otherwise a fourth-order central stencil.
  [[nodiscard]] Vector gradient(const Vector& x) const;

 private:
  int arity_ = 0;
  Eval eval_{};
  Grad grad_{};
};

using VectorMap = std::function<Vector(const Vector&)>;
using OneFormField = std::function<Vector(const Vector&)>;
using TwoFormField = std::function<Matrix(const Vector&)>;

/// Central-difference gradient, component i = (F(x + h e_i) - F(x - h e_i)) / 2h.
inline Vector fd_gradient(const ScalarField& F, const Vector& x, const FdOptions& opt = {}) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    g(i) = detail::central_difference_scalar([&](const Vector& y) { return F(y); }, x, i, opt);
  }
  return g;
}

/// Same stencil with an absolute step h on every axis.
inline Vector fd_gradient(const ScalarField& F, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x;
    Vector xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (F(xp) - F(xm)) / (xp(i) - xm(i));
  }
  return g;
}

inline Vector ScalarField::gradient(const Vector& x) const {
  if (grad_) {
    return grad_(x);
  }
  return fd_gradient(*this, x, FdOptions::smooth());
}

/// Jacobian of a vector map: entry (r, c) = d map_r / d u_c.
inline Matrix fd_jacobian(const VectorMap& map, const Vector& u, const FdOptions& opt = {}) {
  const Vector y0 = map(u);
  Matrix jac(y0.size(), u.size());
  for (Eigen::Index c = 0; c < u.size(); ++c) {
    jac.col(c) = detail::central_difference(map, u, c, opt);
  }
  return jac;
}

inline Matrix fd_jacobian(const VectorMap& map, const Vector& u, double h) {
  const Vector y0 = map(u);
  Matrix jac(y0.size(), u.size());
  for (Eigen::Index c = 0; c < u.size(); ++c) {
    Vector up = u;
    Vector um = u;
    up(c) += h;
    um(c) -= h;
    jac.col(c) = (map(up) - map(um)) / (up(c) - um(c));
  }
  return jac;
}

// ---------------------------------------------------------------------------
// Charts and pullbacks
// ---------------------------------------------------------------------------

/// Parametrisation of a submanifold: params -> ambient coordinates.
struct Chart {
  std::string name;
  std::vector<std::string> param_names;
  VectorMap map;
  std::function<Matrix(const Vector&)> jacobian{};  // exact, when registered
  VectorMap projection{};                          // params -> reduced coordinates

  [[nodiscard]] Eigen::Index param_count() const { return static_cast<Eigen::Index>(param_names.size()); }

  [[nodiscard]] Matrix differential(const Vector& u, const FdOptions& opt = {}) const {
    if (jacobian) {
      return jacobian(u);
    }
    return fd_jacobian(map, u, opt);
  }
};

/// J^T omega(Phi(u)) J for a lower-index two-form field on the ambient space.
inline FormMatrix pullback_two_form(const TwoFormField& omega, const Chart& chart, const Vector& u,
                                    const FdOptions& opt = {}) {
  const Matrix jac = chart.differential(u, opt);
  const Matrix w = omega(chart.map(u));
  if (w.rows() != jac.rows()) {
    throw DomainError("chart '" + chart.name + "' lands in a space of different dimension than the form");
  }
  return FormMatrix{jac.transpose() * w * jac, Variance::lower};
}

/// Pullback through the composition outer(inner(u)); used to check functoriality.
inline Chart compose(const Chart& outer, const Chart& inner) {
  Chart c;
  c.name = outer.name + "∘" + inner.name;
  c.param_names = inner.param_names;
  c.map = [outer, inner](const Vector& u) { return outer.map(inner.map(u)); };
  c.jacobian = [outer, inner](const Vector& u) -> Matrix {
    return outer.differential(inner.map(u)) * inner.differential(u);
  };
  return c;
}

// ---------------------------------------------------------------------------
// Exterior calculus
// ---------------------------------------------------------------------------

/// (d alpha)_ab = d_a alpha_b - d_b alpha_a
inline FormMatrix exterior_derivative_one_form(const OneFormField& alpha, const Vector& x,
                                               const FdOptions& opt = FdOptions::exterior()) {
  const Matrix jac = fd_jacobian(alpha, x, opt);  // jac(b, a) = d_a alpha_b
  return FormMatrix{jac.transpose() - jac, Variance::lower};
}

/// max over a<b<c of |d_a w_bc + d_b w_ca + d_c w_ab|
inline double exterior_derivative_two_form(const TwoFormField& omega, const Vector& x,
                                           const FdOptions& opt = FdOptions::exterior()) {
  const Eigen::Index n = x.size();
  std::vector<Matrix> d(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < n; ++c) {
    d[static_cast<std::size_t>(c)] = detail::central_difference(omega, x, c, opt);
  }
  double worst = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      for (Eigen::Index c = b + 1; c < n; ++c) {
        const double v = d[static_cast<std::size_t>(a)](b, c) + d[static_cast<std::size_t>(b)](c, a) +
                         d[static_cast<std::size_t>(c)](a, b);
        worst = std::max(worst, std::abs(v));
      }
    }
  }
  return worst;
}

/// (X ⌟ omega)_b = X^a omega_ab
inline Vector interior_product(const Vector& X, const FormMatrix& omega) {
  if (X.size() != omega.size()) {
    throw DomainError("interior product: vector and form dimensions differ");
  }
  return omega.entries.transpose() * X;
}

}  // namespace gupred
