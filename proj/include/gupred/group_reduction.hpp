/**
 * @file group_reduction.hpp
 * @brief SO(2)/SO(3) symplectic reduction of rotational deformed algebras:
 *        momentum maps, action certificates, constraint-surface charts and the
 *        reduced form on the quotient.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "gupred/core_algebra.hpp"
#include "gupred/numcalc.hpp"

namespace gupred::group {

inline constexpr double kLeakTolerance = 1e-9;

/// J = (q1 p2 - q2 p1) / f
inline double momentum_map_2d(const DeformationProfile& profile, const PhasePoint& x) {
  if (profile.dim() != 2) {
    throw DomainError("momentum_map_2d needs a two-dimensional profile");
  }
  return profile.angular_momentum(x)(0);
}

/// J_i = eps_ijk q_j p_k / f
inline Vector momentum_map_3d(const DeformationProfile& profile, const PhasePoint& x) {
  if (profile.dim() != 3) {
    throw DomainError("momentum_map_3d needs a three-dimensional profile");
  }
  return profile.angular_momentum(x);
}

/// Lie algebra element xi and its fundamental vector field on phase space.
/// so(2): xi has one entry (the generator [[0,1],[-1,0]] scaled by xi_0).
/// so(3): xi = xi^i T_i.
struct LieGenerator {
  std::string label;
  Vector xi;

  [[nodiscard]] int dim() const { return xi.size() == 1 ? 2 : 3; }

  /// rho(xi) = eps_ijk xi^i q_k d/dq_j + eps_ijk xi^i p_k d/dp_j
  [[nodiscard]] Vector vector_field(const PhasePoint& x) const {
    if (x.dim() != dim()) {
      throw DomainError("generator " + label + " applied to a phase point of wrong dimension");
    }
    if (dim() == 2) {
      Vector v(4);
      v << x.q(1), -x.q(0), x.p(1), -x.p(0);
      return xi(0) * v;
    }
    Vector v = Vector::Zero(6);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
          const double e = levi_civita(i, j, k) * xi(i);
          v(j) += e * x.q(k);
          v(3 + j) += e * x.p(k);
        }
      }
    }
    return v;
  }

  /// J_xi = <mu, xi>
  [[nodiscard]] ScalarField momentum(const DeformationProfile& profile) const {
    const Vector coeff = xi;
    return ScalarField(2 * profile.dim(), [profile, coeff](const Vector& y) {
      return coeff.dot(profile.angular_momentum(PhasePoint(y)));
    });
  }
};

inline LieGenerator so2_generator() { return LieGenerator{"so(2)", Vector::Ones(1)}; }

inline LieGenerator so3_generator(int i) {
  Vector xi = Vector::Zero(3);
  xi(i) = 1.0;
  return LieGenerator{"T" + std::to_string(i + 1), xi};
}

/// max |rho(xi) ⌟ omega - dJ_xi| with dJ_xi from central differences.
inline double hamiltonian_action_residual(const DeformationProfile& profile, const LieGenerator& gen,
                                          const PhasePoint& x, const FdOptions& opt = {}) {
  if (!is_rotational(profile.kind())) {
    throw DomainError("momentum-map certificate needs a rotational profile");
  }
  const Vector lhs = interior_product(gen.vector_field(x), omega_lower(profile, x));
  const Vector rhs = fd_gradient(gen.momentum(profile), x.coords(), opt);
  return max_abs(lhs - rhs);
}

/// The 3 x 6 tangent map of q x p used for the rank diagnostic.
inline Matrix dmu_matrix_3d(const PhasePoint& x) {
  const double q1 = x.q(0), q2 = x.q(1), q3 = x.q(2);
  const double p1 = x.p(0), p2 = x.p(1), p3 = x.p(2);
  Matrix m(3, 6);
  m << 0, -p3, p2, 0, -q3, q2,
       p3, 0, -p1, q3, 0, -q1,
       -p2, p1, 0, -q2, q1, 0;
  return m;
}

/// Numerical rank: singular values above 1e-9 of the largest.
inline int rank_dmu_3d(const PhasePoint& x) {
  const Eigen::JacobiSVD<Matrix> svd(dmu_matrix_3d(x));
  const Vector s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) {
    return 0;
  }
  return static_cast<int>((s.array() > 1e-9 * s(0)).count());
}

// ---------------------------------------------------------------------------
// Constraint-surface charts
// ---------------------------------------------------------------------------

/// (r, rho, theta) -> q = r (cos, sin), p = rho (cos, sin)
inline PhasePoint chart_2d(double r, double rho, double theta) {
  if (!(r > 0.0)) {
    throw DomainError("chart_2d needs r > 0");
  }
  const double c = std::cos(theta), s = std::sin(theta);
  Vector x(4);
  x << r * c, r * s, rho * c, rho * s;
  return PhasePoint(x);
}

/// (r, rho, theta, phi) -> q = r n(theta, phi), p = rho n(theta, phi)
inline PhasePoint chart_3d(double r, double rho, double theta, double phi) {
  if (!(r > 0.0)) {
    throw DomainError("chart_3d needs r > 0");
  }
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  Vector x(6);
  x << r * st * cp, r * st * sp, r * ct, rho * st * cp, rho * st * sp, rho * ct;
  return PhasePoint(x);
}

inline Chart constraint_chart_2d() {
  Chart c;
  c.name = "so2";
  c.param_names = {"r", "rho", "theta"};
  c.map = [](const Vector& u) { return chart_2d(u(0), u(1), u(2)).coords(); };
  c.jacobian = [](const Vector& u) {
    const double r = u(0), rho = u(1), cs = std::cos(u(2)), sn = std::sin(u(2));
    Matrix j(4, 3);
    j << cs, 0, -r * sn,
         sn, 0, r * cs,
         0, cs, -rho * sn,
         0, sn, rho * cs;
    return j;
  };
  c.projection = [](const Vector& u) { return u.head(2).eval(); };
  return c;
}

inline Chart constraint_chart_3d() {
  Chart c;
  c.name = "so3";
  c.param_names = {"r", "rho", "theta", "phi"};
  c.map = [](const Vector& u) { return chart_3d(u(0), u(1), u(2), u(3)).coords(); };
  c.jacobian = [](const Vector& u) {
    const double r = u(0), rho = u(1);
    const double st = std::sin(u(2)), ct = std::cos(u(2));
    const double sp = std::sin(u(3)), cp = std::cos(u(3));
    // unit vector n and its angular derivatives
    const Eigen::Vector3d n(st * cp, st * sp, ct);
    const Eigen::Vector3d n_theta(ct * cp, ct * sp, -st);
    const Eigen::Vector3d n_phi(-st * sp, st * cp, 0.0);
    Matrix j = Matrix::Zero(6, 4);
    j.block(0, 0, 3, 1) = n;
    j.block(0, 2, 3, 1) = r * n_theta;
    j.block(0, 3, 3, 1) = r * n_phi;
    j.block(3, 1, 3, 1) = n;
    j.block(3, 2, 3, 1) = rho * n_theta;
    j.block(3, 3, 3, 1) = rho * n_phi;
    return j;
  };
  c.projection = [](const Vector& u) { return u.head(2).eval(); };
  return c;
}

inline Chart constraint_chart(int dim) { return dim == 2 ? constraint_chart_2d() : constraint_chart_3d(); }

// ---------------------------------------------------------------------------
// Reduced form
// ---------------------------------------------------------------------------

struct ReducedForm {
  double w = 0.0;     ///< coefficient on dr ^ drho
  double leak = 0.0;  ///< largest pullback entry involving an angle parameter
  FormMatrix pullback;
};

/// Pullback of omega through the chart, split into the (r, rho) coefficient and
/// the angle leak. Never throws on leakage.
inline ReducedForm reduced_form_report(const DeformationProfile& profile, const Chart& chart, const Vector& u) {
  const TwoFormField omega = [&profile](const Vector& y) { return omega_lower(profile, PhasePoint(y)).entries; };
  ReducedForm out;
  out.pullback = pullback_two_form(omega, chart, u);
  const Matrix& m = out.pullback.entries;
  out.w = m(0, 1);
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    for (Eigen::Index b = 2; b < m.cols(); ++b) {
      out.leak = std::max({out.leak, std::abs(m(a, b)), std::abs(m(b, a))});
    }
  }
  return out;
}

/// Coefficient w of the reduced form w dr ^ drho. Throws ReductionLeak when any
/// angle component of the pullback exceeds the tolerance.
inline ReducedForm reduced_form_group(const DeformationProfile& profile, const Chart& chart, const Vector& u,
                                      double tolerance = kLeakTolerance) {
  ReducedForm out = reduced_form_report(profile, chart, u);
  if (out.leak > tolerance) {
    throw ReductionLeak("pullback through chart '" + chart.name + "' leaks into angle directions (max " +
                        std::to_string(out.leak) + ")");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sign-extended charts on the 2d quotient
// ---------------------------------------------------------------------------

enum class SignChart { q1_nonzero, q2_nonzero };

inline double sgn(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

/// r = |q|, rho = sgn(p_k / q_k) |p| on the chart where q_k != 0.
inline std::pair<double, double> sign_chart_coords(const PhasePoint& x, SignChart active) {
  if (x.dim() != 2) {
    throw DomainError("sign charts live on the two-dimensional constraint surface");
  }
  const int k = active == SignChart::q1_nonzero ? 0 : 1;
  if (x.q(k) == 0.0) {
    throw ChartDomainError(std::string("sign chart needs q") + (k == 0 ? "1" : "2") + " != 0");
  }
  return {x.q().norm(), sgn(x.p(k) / x.q(k)) * x.p().norm()};
}

}  // namespace gupred::group
