/**
 * @file dynamics.hpp
 * @brief Fixed-step flows of deformed Hamiltonian systems with conservation
 *        and symplecticity monitors.
 */
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gupred/core_algebra.hpp"
#include "gupred/numcalc.hpp"

namespace gupred::dyn {

using TimeField = std::function<Vector(double t, const Vector& x)>;

enum class Method { rk4, implicit_midpoint };

inline const char* to_string(Method m) { return m == Method::rk4 ? "rk4" : "implicit_midpoint"; }

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::map<std::string, std::vector<double>> monitors;

  [[nodiscard]] std::size_t size() const { return times.size(); }
  [[nodiscard]] const Vector& back() const { return states.back(); }
};

/// Solves omega_lower(x) X = dH(x).
inline Vector generic_Xh(const DeformationProfile& profile, const ScalarField& H, const PhasePoint& x) {
  return hamiltonian_vector_field(profile, H.gradient(x.coords()), x);
}

inline TimeField hamiltonian_flow(const DeformationProfile& profile, const ScalarField& H) {
  return [profile, H](double, const Vector& x) { return generic_Xh(profile, H, PhasePoint(x)); };
}

struct MidpointOptions {
  int max_iterations = 50;
  double tolerance = 1e-12;
};

namespace detail {

inline Vector rk4_step(const TimeField& field, double t, const Vector& x, double h) {
  const Vector k1 = field(t, x);
  const Vector k2 = field(t + 0.5 * h, x + 0.5 * h * k1);
  const Vector k3 = field(t + 0.5 * h, x + 0.5 * h * k2);
  const Vector k4 = field(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// y = x + h F(t + h/2, (x + y)/2), solved by fixed-point iteration.
inline Vector midpoint_step(const TimeField& field, double t, const Vector& x, double h, const MidpointOptions& opt) {
  Vector y = x + h * field(t, x);
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Vector next = x + h * field(t + 0.5 * h, 0.5 * (x + y));
    const double change = max_abs(next - y);
    y = next;
    if (change <= opt.tolerance * (1.0 + max_abs(y))) {
      return y;
    }
  }
  throw NonConvergence("implicit midpoint iteration did not converge within " +
                       std::to_string(opt.max_iterations) + " iterations at t = " + std::to_string(t));
}

}  // namespace detail

/// One fixed step of size h (negative h steps backwards).
inline Vector step(const TimeField& field, double t, const Vector& x, double h, Method method,
                   const MidpointOptions& opt = {}) {
  Vector y = method == Method::rk4 ? detail::rk4_step(field, t, x, h) : detail::midpoint_step(field, t, x, h, opt);
  if (!y.allFinite()) {
    throw NonFiniteState("state became non-finite at t = " + std::to_string(t + h));
  }
  return y;
}

/// Fixed-step integration from t0 to t1 (t1 < t0 integrates backwards).
inline Trajectory integrate(const TimeField& field, const Vector& x0, double t0, double t1, int n_steps,
                            Method method, const MidpointOptions& opt = {}) {
  if (n_steps < 1) {
    throw DomainError("integrate needs at least one step");
  }
  const double h = (t1 - t0) / n_steps;
  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.states.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.times.push_back(t0);
  traj.states.push_back(x0);
  Vector x = x0;
  for (int n = 0; n < n_steps; ++n) {
    const double t = t0 + n * h;
    x = step(field, t, x, h, method, opt);
    traj.times.push_back(n + 1 == n_steps ? t1 : t0 + (n + 1) * h);
    traj.states.push_back(x);
  }
  return traj;
}

struct DriftReport {
  double max = 0.0;
  double mean = 0.0;
};

/// max and mean of |Q(x(t)) - Q(x(t0))| along the trajectory.
inline DriftReport monitor_conservation(const Trajectory& traj, const ScalarField& Q) {
  DriftReport r;
  if (traj.states.empty()) {
    return r;
  }
  const double q0 = Q(traj.states.front());
  double sum = 0.0;
  for (const auto& x : traj.states) {
    const double d = std::abs(Q(x) - q0);
    r.max = std::max(r.max, d);
    sum += d;
  }
  r.mean = sum / static_cast<double>(traj.states.size());
  return r;
}

/// Componentwise family version; the report holds the worst component.
inline DriftReport monitor_conservation(const Trajectory& traj, const std::vector<ScalarField>& family) {
  DriftReport worst;
  for (const auto& q : family) {
    const DriftReport r = monitor_conservation(traj, q);
    worst.max = std::max(worst.max, r.max);
    worst.mean = std::max(worst.mean, r.mean);
  }
  return worst;
}

struct SymplecticityReport {
  std::vector<double> series;  ///< omega(delta1(t), delta2(t))
  std::vector<double> defect;  ///< |series(t) - series(0)| / |series(0)|
  double drift = 0.0;          ///< max of defect
  Trajectory base;
};

/// Tracks omega_{x(t)}(delta1(t), delta2(t)) with tangent vectors obtained by
/// differencing trajectories started at x0 + eps delta_i.
inline SymplecticityReport symplecticity_monitor(const TwoFormField& omega, const TimeField& field, const Vector& x0,
                                                 double t0, double t1, int n_steps, Method method,
                                                 const Vector& delta1, const Vector& delta2, double eps = 1e-6) {
  SymplecticityReport rep;
  rep.base = integrate(field, x0, t0, t1, n_steps, method);
  const Trajectory a = integrate(field, x0 + eps * delta1, t0, t1, n_steps, method);
  const Trajectory b = integrate(field, x0 + eps * delta2, t0, t1, n_steps, method);
  rep.series.reserve(rep.base.size());
  for (std::size_t n = 0; n < rep.base.size(); ++n) {
    const Vector d1 = (a.states[n] - rep.base.states[n]) / eps;
    const Vector d2 = (b.states[n] - rep.base.states[n]) / eps;
    rep.series.push_back(d1.dot(omega(rep.base.states[n]) * d2));
  }
  const double s0 = rep.series.front();
  const double scale = std::abs(s0) > 0.0 ? std::abs(s0) : 1.0;
  for (double s : rep.series) {
    const double d = std::abs(s - s0) / scale;
    rep.defect.push_back(d);
    rep.drift = std::max(rep.drift, d);
  }
  return rep;
}

}  // namespace gupred::dyn
