/**
 * @file presets.hpp
 * @brief Built-in deformation profiles and the negative-control fixtures.
 */
#pragma once

#include <cmath>

#include "gupred/core_algebra.hpp"

namespace gupred::presets {

/// f = 1 + beta |p|^2 over a d-dimensional phase space, with exact gradient.
inline ScalarField maggiore_f(int dim, double beta) {
  return ScalarField(
      2 * dim, [dim, beta](const Vector& x) { return 1.0 + beta * x.tail(dim).squaredNorm(); },
      [dim, beta](const Vector& x) {
        Vector g = Vector::Zero(2 * dim);
        g.tail(dim) = 2.0 * beta * x.tail(dim);
        return g;
      });
}

/// a = -2 beta f solves f df/dp_i = -a p_i for f = 1 + beta |p|^2.
inline ScalarField maggiore_a(int dim, double beta) {
  return ScalarField(2 * dim, [dim, beta](const Vector& x) { return -2.0 * beta * (1.0 + beta * x.tail(dim).squaredNorm()); });
}

inline DeformationProfile maggiore2d(double beta = 0.1) {
  return DeformationProfile::rotational(2, maggiore_f(2, beta), maggiore_a(2, beta));
}

inline DeformationProfile maggiore3d(double beta = 0.1) {
  return DeformationProfile::rotational(3, maggiore_f(3, beta), maggiore_a(3, beta));
}

/// f = 1 + beta (p1^2 + p2^2) on (q0, q1, q2, p0, p1, p2); independent of p0.
inline DeformationProfile bianchi_maggiore(double beta = 0.1) {
  ScalarField f(
      6, [beta](const Vector& x) { return 1.0 + beta * (x(4) * x(4) + x(5) * x(5)); },
      [beta](const Vector& x) {
        Vector g = Vector::Zero(6);
        g(4) = 2.0 * beta * x(4);
        g(5) = 2.0 * beta * x(5);
        return g;
      });
  return DeformationProfile::bianchi(std::move(f));
}

/// V = 1 + (q1^2 + q2^2) / 2, positive everywhere, with exact gradient.
inline ScalarField bianchi_potential() {
  return ScalarField(
      2, [](const Vector& y) { return 1.0 + 0.5 * y.squaredNorm(); }, [](const Vector& y) { return Vector(y); });
}

inline DeformationProfile bianchi_canonical() { return DeformationProfile::bianchi(ScalarField::constant(6, 1.0)); }

/// Negative control: constant {q1, q2} = 0.1 with non-constant f, violating closure.
inline DeformationProfile broken_closure() {
  return DeformationProfile::custom(2, maggiore_f(2, 0.1), {BracketEntry{0, 1, ScalarField::constant(4, 0.1)}});
}

/// Negative control: direction-dependent f = 1 + 0.1 p1 dressed as a rotational profile.
inline DeformationProfile nonrotational2d() {
  ScalarField f(
      4, [](const Vector& x) { return 1.0 + 0.1 * x(2); },
      [](const Vector&) {
        Vector g = Vector::Zero(4);
        g(2) = 0.1;
        return g;
      });
  return DeformationProfile::rotational(2, std::move(f)).with_momentum_only(false);
}

/// Negative control: Bianchi profile with clock/space noncommutativity {q0, q1} = eps.
inline DeformationProfile flat_violating_bianchi(double eps = 0.1, double beta = 0.1) {
  return bianchi_maggiore(beta).with_injected(0, 1, ScalarField::constant(6, eps));
}

/// H = 1/2 |p|^2 on a d-dimensional phase space.
inline ScalarField free_hamiltonian(int dim) {
  return ScalarField(
      2 * dim, [dim](const Vector& x) { return 0.5 * x.tail(dim).squaredNorm(); },
      [dim](const Vector& x) {
        Vector g = Vector::Zero(2 * dim);
        g.tail(dim) = x.tail(dim);
        return g;
      });
}

/// H = 1/2 (q^2 + p^2), one degree of freedom.
inline ScalarField oscillator_hamiltonian() {
  return ScalarField(
      2, [](const Vector& x) { return 0.5 * x.squaredNorm(); }, [](const Vector& x) { return Vector(x); });
}

/// Homogeneous SO(3) Yang-Mills in the Lambda = 0 gauge: H = 1/2 |p|^2 with a
/// Maggiore-deformed bracket; the Gauss constraint is eps_ijk q_j p_k.
struct YangMills {
  DeformationProfile profile = maggiore3d(0.1);
  ScalarField hamiltonian = free_hamiltonian(3);
};

/// Gauss constraint component i of q x p.
inline ScalarField gauss_component(int i) {
  return ScalarField(6, [i](const Vector& x) {
    const Eigen::Vector3d q = x.head(3);
    const Eigen::Vector3d p = x.tail(3);
    return q.cross(p)(i);
  });
}

}  // namespace gupred::presets
