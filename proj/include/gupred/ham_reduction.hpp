/**
 * @file ham_reduction.hpp
 * @brief Reduction by a single Hamiltonian constraint for Bianchi models in
 *        Misner variables (q0, q1, q2, p0, p1, p2).
 *
 * The constraint surface S = {H = 0} is charted on its positive branch by
 * (q0, q1, q2, p1, p2) with p0 = +sqrt(p1^2 + p2^2 + e^{4 q0} V). The reduced
 * phase space N is the slice q0 = 0 with coordinates s = (q1, q2, p1, p2); the
 * clock field is d/dq0 and X_t drops the q0 component of X_H on the slice q0 = t.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "gupred/core_algebra.hpp"
#include "gupred/numcalc.hpp"
#include "gupred/sampling.hpp"

namespace gupred::cosmo {

/// Reduced coordinates (q1, q2, p1, p2) at external time t.
struct ReducedState {
  Vector s = Vector::Zero(4);
  double t = 0.0;

  [[nodiscard]] double q1() const { return s(0); }
  [[nodiscard]] double q2() const { return s(1); }
  [[nodiscard]] double p1() const { return s(2); }
  [[nodiscard]] double p2() const { return s(3); }
};

/// A Bianchi model: deformation profile plus anisotropy potential V(q1, q2).
struct BianchiScenario {
  DeformationProfile profile = DeformationProfile::bianchi(ScalarField::constant(6, 1.0));
  ScalarField potential = ScalarField::constant(2, 1.0);
  Box reduced_box = Box::uniform(4, -1.0, 1.0);
  double t_min = -0.5;
  double t_max = 0.5;
};

namespace detail {

inline Vector anisotropy(double q1, double q2) {
  Vector y(2);
  y << q1, q2;
  return y;
}

inline void require_bianchi(const DeformationProfile& profile) {
  if (profile.kind() != ProfileKind::bianchi) {
    throw DomainError("Hamiltonian-constraint reduction needs a bianchi profile");
  }
}

inline double checked(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw NonFiniteResult(std::string(what) + " is not finite");
  }
  return v;
}

}  // namespace detail

/// H = -p0^2 + p1^2 + p2^2 + e^{4 q0} V(q1, q2)
inline double bianchi_H(const PhasePoint& x, const ScalarField& V) {
  const double v = V(detail::anisotropy(x.q(1), x.q(2)));
  return detail::checked(-x.p(0) * x.p(0) + x.p(1) * x.p(1) + x.p(2) * x.p(2) + std::exp(4.0 * x.q(0)) * v, "H");
}

/// Gradient of H, with dV from the potential's registered or finite-difference gradient.
inline Vector bianchi_dH(const PhasePoint& x, const ScalarField& V) {
  const Vector y = detail::anisotropy(x.q(1), x.q(2));
  const double e4 = std::exp(4.0 * x.q(0));
  const Vector dv = V.gradient(y);
  Vector g(6);
  g << 4.0 * e4 * V(y), e4 * dv(0), e4 * dv(1), -2.0 * x.p(0), 2.0 * x.p(1), 2.0 * x.p(2);
  return g;
}

inline ScalarField bianchi_hamiltonian(const ScalarField& V) {
  return ScalarField(
      6, [V](const Vector& y) { return bianchi_H(PhasePoint(y), V); },
      [V](const Vector& y) { return bianchi_dH(PhasePoint(y), V); });
}

/// Explicit Hamiltonian vector field (solves omega_lower X = dH):
///   qdot0 = -2 p0 f,  qdot1 = 2 p1 f + e^{4q0} l dV/dq2,  qdot2 = 2 p2 f - e^{4q0} l dV/dq1,
///   pdot0 = -4 e^{4q0} f V,  pdot_i = -e^{4q0} f dV/dq_i.
inline Vector bianchi_Xh(const DeformationProfile& profile, const PhasePoint& x, const ScalarField& V) {
  detail::require_bianchi(profile);
  const double f = profile.nonsingular_f(x);
  const double l = profile.bianchi_l(x);
  const Vector y = detail::anisotropy(x.q(1), x.q(2));
  const double v = V(y);
  const Vector dv = V.gradient(y);
  const double e4 = std::exp(4.0 * x.q(0));
  Vector X(6);
  X << -2.0 * x.p(0) * f,
       2.0 * x.p(1) * f + e4 * l * dv(1),
       2.0 * x.p(2) * f - e4 * l * dv(0),
       -4.0 * e4 * f * v,
       -e4 * f * dv(0),
       -e4 * f * dv(1);
  return X;
}

/// Positive root p0 = sqrt(p1^2 + p2^2 + e^{4 q0} V(q1, q2)).
inline double lift_to_branch(double q0, double q1, double q2, double p1, double p2, const ScalarField& V) {
  const double radicand = p1 * p1 + p2 * p2 + std::exp(4.0 * q0) * V(detail::anisotropy(q1, q2));
  if (radicand < 0.0) {
    throw NegativeRadicand("no real p0 on the constraint surface (radicand " + std::to_string(radicand) + ")");
  }
  return std::sqrt(radicand);
}

/// (t, q1, q2, p0, p1, p2) on the positive branch over the slice q0 = t.
inline PhasePoint embed(double t, const Vector& s, const ScalarField& V) {
  Vector x(6);
  x << t, s(0), s(1), lift_to_branch(t, s(0), s(1), s(2), s(3), V), s(2), s(3);
  return PhasePoint(x);
}

/// Explicit reduced field X_t on N (coordinates q1, q2, p1, p2).
inline Vector reduced_Xt(double t, const Vector& s, const DeformationProfile& profile, const ScalarField& V) {
  detail::require_bianchi(profile);
  const PhasePoint x = embed(t, s, V);
  const double f = profile.nonsingular_f(x);
  const double l = profile.bianchi_l(x);
  const Vector dv = V.gradient(detail::anisotropy(s(0), s(1)));
  const double e4 = std::exp(4.0 * t);
  Vector X(4);
  X << 2.0 * s(2) * f + e4 * l * dv(1),
       2.0 * s(3) * f - e4 * l * dv(0),
       -e4 * f * dv(0),
       -e4 * f * dv(1);
  return X;
}

/// X_t obtained generically: solve for the ambient X_H at the lifted point and
/// drop the q0 and p0 components.
inline Vector projected_Xt(double t, const Vector& s, const DeformationProfile& profile, const ScalarField& V) {
  const PhasePoint x = embed(t, s, V);
  const Vector X = hamiltonian_vector_field(profile, bianchi_dH(x, V), x);
  Vector out(4);
  out << X(1), X(2), X(4), X(5);
  return out;
}

/// Explicit omega|_N = (1/f)(dp1 ^ dq1 + dp2 ^ dq2 + (l/f) dp1 ^ dp2),
/// ordering (q1, q2, p1, p2).
inline FormMatrix reduced_omega_N(const DeformationProfile& profile, const Vector& s, const ScalarField& V) {
  detail::require_bianchi(profile);
  const PhasePoint x = embed(0.0, s, V);
  const double f = profile.nonsingular_f(x);
  const double l = profile.bianchi_l(x);
  Matrix m = Matrix::Zero(4, 4);
  m(0, 2) = -1.0 / f;
  m(1, 3) = -1.0 / f;
  m(2, 0) = 1.0 / f;
  m(3, 1) = 1.0 / f;
  m(2, 3) = l / (f * f);
  m(3, 2) = -l / (f * f);
  return FormMatrix{m, Variance::lower};
}

/// Embedding of N into the ambient phase space with its exact Jacobian.
inline Chart slice_embedding(const ScalarField& V) {
  Chart c;
  c.name = "bianchi-slice";
  c.param_names = {"q1", "q2", "p1", "p2"};
  c.map = [V](const Vector& s) { return embed(0.0, s, V).coords(); };
  c.jacobian = [V](const Vector& s) {
    const double p0 = lift_to_branch(0.0, s(0), s(1), s(2), s(3), V);
    const Vector dv = V.gradient(detail::anisotropy(s(0), s(1)));
    Matrix j = Matrix::Zero(6, 4);
    j(1, 0) = 1.0;
    j(2, 1) = 1.0;
    j(3, 0) = dv(0) / (2.0 * p0);
    j(3, 1) = dv(1) / (2.0 * p0);
    j(3, 2) = s(2) / p0;
    j(3, 3) = s(3) / p0;
    j(4, 2) = 1.0;
    j(5, 3) = 1.0;
    return j;
  };
  return c;
}

/// omega|_N as the pullback of the ambient form through the slice embedding.
inline FormMatrix pulled_back_omega_N(const DeformationProfile& profile, const Vector& s, const ScalarField& V) {
  const TwoFormField omega = [&profile](const Vector& y) { return omega_lower(profile, PhasePoint(y)).entries; };
  return pullback_two_form(omega, slice_embedding(V), s);
}

/// H_t = p1^2 + p2^2 + e^{4t} V(q1, q2)
inline double reduced_H(double t, const Vector& s, const ScalarField& V) {
  return detail::checked(s(2) * s(2) + s(3) * s(3) + std::exp(4.0 * t) * V(detail::anisotropy(s(0), s(1))), "H_t");
}

/// X_{H_t}: solution of omega|_N X = dH_t, dH_t by central differences.
inline Vector reduced_hamiltonian_field(double t, const Vector& s, const DeformationProfile& profile,
                                        const ScalarField& V) {
  const ScalarField ht(4, [t, V](const Vector& y) { return reduced_H(t, y, V); });
  const Vector grad = fd_gradient(ht, s);
  const FormMatrix w = pulled_back_omega_N(profile, s, V);
  Eigen::PartialPivLU<Matrix> lu(w.entries);
  if (!(lu.rcond() > 1e-300)) {
    throw LinearSolveFailure("omega|_N is numerically singular");
  }
  return lu.solve(grad);
}

/// max |d(X_t ⌟ omega|_N)| at s; zero means X_t is a symplectic field on N.
/// Uses the generic routes for both X_t and omega|_N so that fixtures which
/// break the flat-coordinate condition are measured faithfully.
inline double lie_derivative_residual(double t, const DeformationProfile& profile, const ScalarField& V,
                                      const Vector& s, const FdOptions& opt = FdOptions::exterior()) {
  const OneFormField alpha = [&](const Vector& y) -> Vector {
    return interior_product(projected_Xt(t, y, profile, V), pulled_back_omega_N(profile, y, V));
  };
  return max_abs(exterior_derivative_one_form(alpha, s, opt).entries);
}

// ---------------------------------------------------------------------------
// Flat-coordinate precondition
// ---------------------------------------------------------------------------

struct FlatCoordinateReport {
  bool pass = true;
  double max = 0.0;
  std::string worst{};
};

/// Brackets that must vanish for the reduced flow to be Hamiltonian: the clock
/// q0 with (q1, q2, p1, p2), and (q1, q2, p1, p2) with p0.
inline FlatCoordinateReport flat_coordinate_check(const DeformationProfile& profile, int samples = 200,
                                                  std::uint64_t seed = 1, double tolerance = 1e-10) {
  detail::require_bianchi(profile);
  struct Entry {
    int a, b;
    const char* name;
  };
  static constexpr std::array<Entry, 8> entries{{{0, 1, "{q0,q1}"},
                                                 {0, 2, "{q0,q2}"},
                                                 {0, 4, "{q0,p1}"},
                                                 {0, 5, "{q0,p2}"},
                                                 {1, 3, "{q1,p0}"},
                                                 {2, 3, "{q2,p0}"},
                                                 {4, 3, "{p1,p0}"},
                                                 {5, 3, "{p2,p0}"}}};
  Sampler sampler(seed);
  const Box box = Box::uniform(6, -2.0, 2.0);
  FlatCoordinateReport report;
  for (int n = 0; n < samples; ++n) {
    const PhasePoint x(sampler.uniform(box));
    const Matrix up = omega_upper(profile, x).entries;
    for (const auto& e : entries) {
      const double v = std::abs(up(e.a, e.b));
      if (v > report.max) {
        report.max = v;
        report.worst = e.name;
      }
    }
  }
  report.pass = report.max < tolerance;
  return report;
}

/// Seeded (t, s) sample with the positive-branch lift defined.
inline ReducedState sample_reduced(const BianchiScenario& sc, Sampler& sampler) {
  ReducedState st;
  st.t = sampler.uniform(sc.t_min, sc.t_max);
  st.s = sampler.uniform(sc.reduced_box);
  return st;
}

}  // namespace gupred::cosmo
