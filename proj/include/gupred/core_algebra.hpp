/**
 * @file core_algebra.hpp
 * @brief Deformed Poisson/symplectic matrices built from a deformation profile,
 *        plus the algebraic consistency certificates (closure, Jacobi).
 *
 * Fundamental brackets in the ordering x = (q_1..q_d, p_1..p_d):
 *
 *   {p_i, p_j} = 0,   {q_i, q_j} = L_ij(q, p),   {q_i, p_j} = f(q, p) delta_ij
 *
 * omega_upper is the bracket matrix {x^a, x^b}; omega_lower is its inverse,
 * [[0, -Id/f], [Id/f, L/f^2]]. Hamiltonian fields solve omega_lower X = dH,
 * which in the canonical limit gives qdot = dH/dp, pdot = -dH/dq.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gupred/numcalc.hpp"
#include "gupred/sampling.hpp"
#include "gupred/types.hpp"

namespace gupred {

inline constexpr double kSingularF = 1e-12;
inline constexpr double kConditionWarning = 1e12;

enum class ProfileKind { canonical, rotational2d, rotational3d, bianchi, custom };

inline const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::canonical: return "canonical";
    case ProfileKind::rotational2d: return "rotational2d";
    case ProfileKind::rotational3d: return "rotational3d";
    case ProfileKind::bianchi: return "bianchi";
    case ProfileKind::custom: return "custom";
  }
  return "?";
}

inline bool is_rotational(ProfileKind k) { return k == ProfileKind::rotational2d || k == ProfileKind::rotational3d; }

/// One strict-upper-triangle entry L_ij (i < j, configuration indices from 0).
struct BracketEntry {
  int i = 0;
  int j = 1;
  ScalarField value;
};

/// Levi-Civita symbol on {0,1,2}.
inline double levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) {
    return 0.0;
  }
  return ((i + 1) % 3 == j) ? 1.0 : -1.0;
}

/**
 * Deformation functions f, a, L of a GUP-deformed bracket algebra.
 *
 * Immutable after construction. For the rotational kinds L is never stored:
 * it is derived as a J (2d) or a eps_ijk J_k (3d). For the Bianchi kind the
 * single entry L_12 = l is derived from f by the closure condition. Extra
 * entries can be injected on top (negative-control fixtures); doing so marks
 * the profile unverified.
 */
class DeformationProfile {
 public:
  static DeformationProfile canonical(int dim) {
    DeformationProfile p(ProfileKind::canonical, dim, ScalarField::constant(2 * dim, 1.0));
    p.momentum_only_ = true;
    return p;
  }

  /// a is derived from the closure ODE f df/dp_i = -a p_i when absent.
  static DeformationProfile rotational(int dim, ScalarField f, std::optional<ScalarField> a = std::nullopt) {
    if (dim != 2 && dim != 3) {
      throw DomainError("rotational profiles exist in two or three dimensions only");
    }
    DeformationProfile p(dim == 2 ? ProfileKind::rotational2d : ProfileKind::rotational3d, dim, std::move(f));
    p.a_ = std::move(a);
    p.momentum_only_ = true;
    return p;
  }

  /// Misner-variable phase space (q0, q1, q2, p0, p1, p2).
  static DeformationProfile bianchi(ScalarField f) {
    DeformationProfile p(ProfileKind::bianchi, 3, std::move(f));
    p.momentum_only_ = true;
    return p;
  }

  static DeformationProfile custom(int dim, ScalarField f, std::vector<BracketEntry> entries) {
    DeformationProfile p(ProfileKind::custom, dim, std::move(f));
    for (auto& e : entries) {
      p.add_entry(std::move(e));
    }
    p.verified_ = false;
    return p;
  }

  [[nodiscard]] DeformationProfile with_injected(int i, int j, ScalarField value) const {
    if (is_rotational(kind_)) {
      throw DomainError("rotational profiles derive L from the momentum map; it cannot be injected");
    }
    DeformationProfile p = *this;
    p.add_entry(BracketEntry{i, j, std::move(value)});
    p.verified_ = false;
    return p;
  }

  [[nodiscard]] DeformationProfile with_momentum_only(bool flag) const {
    DeformationProfile p = *this;
    p.momentum_only_ = flag;
    return p;
  }

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] ProfileKind kind() const { return kind_; }
  [[nodiscard]] bool verified() const { return verified_; }
  [[nodiscard]] bool momentum_only() const { return momentum_only_; }
  [[nodiscard]] bool has_a() const { return is_rotational(kind_); }
  [[nodiscard]] const std::vector<BracketEntry>& extra_entries() const { return extra_; }
  [[nodiscard]] const ScalarField& f_field() const { return f_; }

  [[nodiscard]] double f(const PhasePoint& x) const { return f_(check(x).coords()); }

  /// Gradient of f over all 2d coordinates.
  [[nodiscard]] Vector grad_f(const PhasePoint& x) const { return f_.gradient(check(x).coords()); }

  [[nodiscard]] double a(const PhasePoint& x) const {
    if (!is_rotational(kind_)) {
      throw DomainError(std::string("profile kind ") + to_string(kind_) + " has no rotational function a");
    }
    if (a_) {
      return (*a_)(x.coords());
    }
    return closure_derived_a(x);
  }

  /// Deformed angular momentum: J (2d, returned as a length-1 vector) or J_i (3d).
  [[nodiscard]] Vector angular_momentum(const PhasePoint& x) const {
    const double fx = nonsingular_f(x);
    if (dim_ == 2) {
      Vector j(1);
      j(0) = (x.q(0) * x.p(1) - x.q(1) * x.p(0)) / fx;
      return j;
    }
    if (dim_ == 3) {
      const Eigen::Vector3d q = x.q();
      const Eigen::Vector3d p = x.p();
      return q.cross(p) / fx;
    }
    throw DomainError("angular momentum is defined in two or three dimensions");
  }

  /// Skew d x d matrix of {q_i, q_j}.
  [[nodiscard]] Matrix L(const PhasePoint& x) const {
    check(x);
    Matrix l = Matrix::Zero(dim_, dim_);
    switch (kind_) {
      case ProfileKind::rotational2d: {
        const double v = a(x) * angular_momentum(x)(0);
        l(0, 1) = v;
        l(1, 0) = -v;
        break;
      }
      case ProfileKind::rotational3d: {
        const Vector j = angular_momentum(x);
        const double ax = a(x);
        for (int r = 0; r < 3; ++r) {
          for (int c = r + 1; c < 3; ++c) {
            double v = 0.0;
            for (int k = 0; k < 3; ++k) {
              v += levi_civita(r, c, k) * j(k);
            }
            l(r, c) = ax * v;
            l(c, r) = -ax * v;
          }
        }
        break;
      }
      case ProfileKind::bianchi: {
        const double v = bianchi_l(x);
        l(1, 2) = v;
        l(2, 1) = -v;
        break;
      }
      case ProfileKind::canonical:
      case ProfileKind::custom: break;
    }
    for (const auto& e : extra_) {
      const double v = e.value(x.coords());
      l(e.i, e.j) += v;
      l(e.j, e.i) -= v;
    }
    return l;
  }

  /// l = df/dp_1 q_2 - df/dp_2 q_1 in the Misner ordering (q0, q1, q2, p0, p1, p2).
  [[nodiscard]] double bianchi_l(const PhasePoint& x) const {
    if (kind_ != ProfileKind::bianchi) {
      throw DomainError("bianchi_l needs a bianchi profile");
    }
    const Vector g = grad_f(x);
    return g(4) * x.q(2) - g(5) * x.q(1);
  }

  [[nodiscard]] double nonsingular_f(const PhasePoint& x) const {
    const double fx = f(x);
    if (!(std::abs(fx) >= kSingularF)) {
      throw SingularDeformation("deformation function f vanishes (|f| = " + std::to_string(std::abs(fx)) + ")");
    }
    return fx;
  }

 private:
  DeformationProfile(ProfileKind kind, int dim, ScalarField f) : kind_(kind), dim_(dim), f_(std::move(f)) {
    if (dim < 1) {
      throw DomainError("profile dimension must be positive");
    }
    if (f_.arity() != 2 * dim) {
      throw DomainError("deformation function f must take 2d = " + std::to_string(2 * dim) + " arguments");
    }
    if (kind == ProfileKind::bianchi && dim != 3) {
      throw DomainError("bianchi profiles live on a six-dimensional phase space");
    }
  }

  void add_entry(BracketEntry e) {
    if (e.i == e.j || e.i < 0 || e.j < 0 || e.i >= dim_ || e.j >= dim_) {
      throw DomainError("bracket entry indices out of range");
    }
    if (e.i > e.j) {
      // store upper triangle only: L_ji = -L_ij
      std::swap(e.i, e.j);
      ScalarField inner = std::move(e.value);
      e.value = ScalarField(inner.arity(), [inner](const Vector& y) { return -inner(y); });
    }
    if (e.value.arity() != 2 * dim_) {
      throw DomainError("bracket entry must be a phase-space field");
    }
    extra_.push_back(std::move(e));
  }

  const PhasePoint& check(const PhasePoint& x) const {
    if (x.dim() != dim_) {
      throw DomainError("phase point of dimension " + std::to_string(x.dim()) + " given to a profile of dimension " +
                        std::to_string(dim_));
    }
    return x;
  }

  /// a = -f (p . grad_p f) / |p|^2, read off the closure ODE. Near p = 0 the
  /// ratio tends to the radial second derivative of f.
  double closure_derived_a(const PhasePoint& x) const {
    const double fx = f(x);
    const double p2 = x.p().squaredNorm();
    if (p2 > 1e-6) {
      const Vector g = grad_f(x);
      return -fx * g.tail(dim_).dot(x.p()) / p2;
    }
    const double h = 1e-3;
    Vector plus = x.coords();
    Vector minus = x.coords();
    plus(dim_) += h;
    minus(dim_) -= h;
    const double second = (f_(plus) - 2.0 * fx + f_(minus)) / (h * h);
    return -fx * second;
  }

  ProfileKind kind_;
  int dim_;
  ScalarField f_;
  std::optional<ScalarField> a_{};
  std::vector<BracketEntry> extra_{};
  bool verified_ = true;
  bool momentum_only_ = false;
};

// ---------------------------------------------------------------------------
// Matrix pair
// ---------------------------------------------------------------------------

/// Bracket matrix {x^a, x^b} = [[L, f Id], [-f Id, 0]].
inline FormMatrix omega_upper(const DeformationProfile& profile, const PhasePoint& x) {
  const int d = profile.dim();
  const double fx = profile.nonsingular_f(x);
  Matrix m = Matrix::Zero(2 * d, 2 * d);
  m.topLeftCorner(d, d) = profile.L(x);
  m.topRightCorner(d, d) = fx * Matrix::Identity(d, d);
  m.bottomLeftCorner(d, d) = -fx * Matrix::Identity(d, d);
  return FormMatrix{std::move(m), Variance::upper};
}

/// Symplectic form components [[0, -Id/f], [Id/f, L/f^2]].
inline FormMatrix omega_lower(const DeformationProfile& profile, const PhasePoint& x) {
  const int d = profile.dim();
  const double fx = profile.nonsingular_f(x);
  Matrix m = Matrix::Zero(2 * d, 2 * d);
  m.topRightCorner(d, d) = -Matrix::Identity(d, d) / fx;
  m.bottomLeftCorner(d, d) = Matrix::Identity(d, d) / fx;
  m.bottomRightCorner(d, d) = profile.L(x) / (fx * fx);
  return FormMatrix{std::move(m), Variance::lower};
}

/// max |omega_lower omega_upper - Id|
inline double pair_identity_defect(const DeformationProfile& profile, const PhasePoint& x) {
  const Matrix prod = omega_lower(profile, x).entries * omega_upper(profile, x).entries;
  return max_abs(prod - Matrix::Identity(prod.rows(), prod.cols()));
}

/// {F, G} = omega^ab d_a F d_b G
inline double poisson_bracket(const DeformationProfile& profile, const ScalarField& F, const ScalarField& G,
                              const PhasePoint& x) {
  const FormMatrix up = omega_upper(profile, x);
  return F.gradient(x.coords()).dot(up.entries * G.gradient(x.coords()));
}

/// Coordinate function x^a as a scalar field.
inline ScalarField coordinate_function(int dim, int a) {
  return ScalarField(
      2 * dim, [a](const Vector& y) { return y(a); },
      [dim, a](const Vector&) {
        Vector g = Vector::Zero(2 * dim);
        g(a) = 1.0;
        return g;
      });
}

/// Solve omega_lower X = grad H. Emits a warning on ill-conditioned forms.
inline Vector hamiltonian_vector_field(const DeformationProfile& profile, const Vector& grad_h, const PhasePoint& x) {
  const FormMatrix w = omega_lower(profile, x);
  Eigen::PartialPivLU<Matrix> lu(w.entries);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-300)) {
    throw LinearSolveFailure("symplectic form is numerically singular");
  }
  if (1.0 / rcond > kConditionWarning) {
    std::clog << "warning: symplectic form condition estimate " << 1.0 / rcond << " exceeds 1e12\n";
  }
  Vector X = lu.solve(grad_h);
  if (!X.allFinite()) {
    throw LinearSolveFailure("Hamiltonian vector field solve produced non-finite components");
  }
  return X;
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

/// r_i = f df/dp_i + a p_i; vanishes for a consistent rotational profile.
inline Vector closure_residual_rotational(const DeformationProfile& profile, const PhasePoint& x) {
  if (!is_rotational(profile.kind())) {
    throw DomainError("closure residual applies to rotational profiles");
  }
  const int d = profile.dim();
  const double fx = profile.f(x);
  const double ax = profile.a(x);
  const Vector g = profile.grad_f(x).tail(d);
  return fx * g + ax * x.p();
}

inline double bianchi_l(const DeformationProfile& profile, const PhasePoint& x) { return profile.bianchi_l(x); }

namespace detail {

/// d_c omega^ab for every c, by central differences of the bracket matrix.
inline std::vector<Matrix> bracket_derivatives(const DeformationProfile& profile, const PhasePoint& x,
                                               const FdOptions& opt) {
  const Vector& y = x.coords();
  std::vector<Matrix> d;
  d.reserve(static_cast<std::size_t>(y.size()));
  for (Eigen::Index c = 0; c < y.size(); ++c) {
    d.push_back(gupred::detail::central_difference(
        [&](const Vector& z) -> Matrix { return omega_upper(profile, PhasePoint(z)).entries; }, y, c, opt));
  }
  return d;
}

inline double jacobi_cycle(const Matrix& up, const std::vector<Matrix>& d, int i, int j, int k) {
  const std::array<std::array<int, 3>, 3> cyc{{{i, j, k}, {j, k, i}, {k, i, j}}};
  double sum = 0.0;
  for (const auto& [a, b, c] : cyc) {
    for (Eigen::Index m = 0; m < up.rows(); ++m) {
      sum += up(a, m) * d[static_cast<std::size_t>(m)](b, c);
    }
  }
  return std::abs(sum);
}

}  // namespace detail

/// |{x_i,{x_j,x_k}} + cyclic| with finite-difference derivatives of the brackets.
inline double jacobi_residual(const DeformationProfile& profile, const PhasePoint& x, std::array<int, 3> triple,
                              const FdOptions& opt = {}) {
  const Matrix up = omega_upper(profile, x).entries;
  const auto d = detail::bracket_derivatives(profile, x, opt);
  return detail::jacobi_cycle(up, d, triple[0], triple[1], triple[2]);
}

/// Largest Jacobi residual over all coordinate triples i < j < k.
inline double max_jacobi_residual(const DeformationProfile& profile, const PhasePoint& x, const FdOptions& opt = {}) {
  const Matrix up = omega_upper(profile, x).entries;
  const auto d = detail::bracket_derivatives(profile, x, opt);
  const int n = static_cast<int>(up.rows());
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        worst = std::max(worst, detail::jacobi_cycle(up, d, i, j, k));
      }
    }
  }
  return worst;
}

/// max |d omega| of the lower form at x.
inline double d_omega_residual(const DeformationProfile& profile, const PhasePoint& x,
                               const FdOptions& opt = FdOptions::exterior()) {
  return exterior_derivative_two_form(
      [&](const Vector& z) -> Matrix { return omega_lower(profile, PhasePoint(z)).entries; }, x.coords(), opt);
}

// ---------------------------------------------------------------------------
// Admissible sampling
// ---------------------------------------------------------------------------

/// Seeded sampling box; rotational kinds exclude a ball around q = 0.
struct AdmissibleDomain {
  Box box;
  double min_q_norm = 0.0;

  static AdmissibleDomain defaults(const DeformationProfile& profile) {
    const int d = profile.dim();
    return AdmissibleDomain{Box::uniform(2 * d, -2.0, 2.0), is_rotational(profile.kind()) ? 0.1 : 0.0};
  }

  PhasePoint sample(Sampler& s) const {
    for (;;) {
      PhasePoint x(s.uniform(box));
      if (x.q().norm() > min_q_norm) {
        return x;
      }
    }
  }
};

}  // namespace gupred
