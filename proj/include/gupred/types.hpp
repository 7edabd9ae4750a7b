/**
 * @file types.hpp
 * @brief Phase points, two-form matrices and the error hierarchy shared by all modules.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gupred {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularDeformation : Error {
  using Error::Error;
};
struct DomainEscape : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ChartDomainError : Error {
  using Error::Error;
};
struct ReductionLeak : Error {
  using Error::Error;
};
struct NegativeRadicand : Error {
  using Error::Error;
};
struct NonFiniteResult : Error {
  using Error::Error;
};
struct LinearSolveFailure : Error {
  using Error::Error;
};
struct NonConvergence : Error {
  using Error::Error;
};
struct NonFiniteState : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// PhasePoint
// ---------------------------------------------------------------------------

/// A point (q_1..q_d, p_1..p_d) stored as one contiguous 2d vector, q-block first.
class PhasePoint {
 public:
  PhasePoint() = default;

  explicit PhasePoint(Vector coords) : x_(std::move(coords)) {
    if (x_.size() % 2 != 0) {
      throw DomainError("phase point needs an even number of coordinates");
    }
  }

  PhasePoint(const Vector& q, const Vector& p) : x_(q.size() + p.size()) {
    if (q.size() != p.size()) {
      throw DomainError("q and p blocks differ in length");
    }
    x_ << q, p;
  }

  [[nodiscard]] int dim() const { return static_cast<int>(x_.size() / 2); }
  [[nodiscard]] double q(int i) const { return x_(i); }
  [[nodiscard]] double p(int i) const { return x_(dim() + i); }
  [[nodiscard]] auto q() const { return x_.head(dim()); }
  [[nodiscard]] auto p() const { return x_.tail(dim()); }
  [[nodiscard]] const Vector& coords() const { return x_; }
  [[nodiscard]] bool finite() const { return x_.allFinite(); }

 private:
  Vector x_;
};

// ---------------------------------------------------------------------------
// FormMatrix
// ---------------------------------------------------------------------------

/// lower: components omega_ab of a two-form; upper: the bivector omega^ab.
enum class Variance { lower, upper };

/// Skew matrix of a two-form (or its inverse bivector) in the (q-block, p-block)
/// ordering. The convention is omega = 1/2 omega_ab dx^a ^ dx^b.
struct FormMatrix {
  Matrix entries;
  Variance variance = Variance::lower;

  [[nodiscard]] Eigen::Index size() const { return entries.rows(); }
  [[nodiscard]] double operator()(Eigen::Index a, Eigen::Index b) const { return entries(a, b); }

  /// max |M + M^T|
  [[nodiscard]] double skew_defect() const {
    if (entries.size() == 0) {
      return 0.0;
    }
    return (entries + entries.transpose()).cwiseAbs().maxCoeff();
  }

  /// omega(u, v) = u^a omega_ab v^b
  [[nodiscard]] double pair(const Vector& u, const Vector& v) const { return u.dot(entries * v); }
};

/// Axis-aligned box used as an admissible domain.
struct Box {
  Vector lo;
  Vector hi;

  [[nodiscard]] bool contains(const Vector& x) const {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x(i) < lo(i) || x(i) > hi(i)) {
        return false;
      }
    }
    return true;
  }

  static Box uniform(Eigen::Index n, double lo, double hi) {
    return Box{Vector::Constant(n, lo), Vector::Constant(n, hi)};
  }
};

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace gupred
