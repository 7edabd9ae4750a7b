/**
 * @file sampling.hpp
 * @brief Seeded sampling helpers: box points, rotations.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "gupred/types.hpp"

namespace gupred {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Vector uniform(const Box& box) {
    Vector x(box.lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x(i) = uniform(box.lo(i), box.hi(i));
    }
    return x;
  }

  Vector uniform(Eigen::Index n, double lo, double hi) { return uniform(Box::uniform(n, lo, hi)); }

  /// Uniform direction on the unit sphere S^{n-1}.
  Vector direction(Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector v(n);
    do {
      for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = g(rng_);
      }
    } while (v.norm() < 1e-12);
    return v.normalized();
  }

  /// Random rotation: axis uniform on the sphere, angle uniform in (0, 2 pi).
  /// In two dimensions only the angle is drawn.
  Matrix rotation(int dim) {
    const double angle = uniform(0.0, 2.0 * M_PI);
    if (dim == 2) {
      Matrix r(2, 2);
      r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
      return r;
    }
    if (dim == 3) {
      const Eigen::Vector3d axis = direction(3);
      return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    }
    throw DomainError("rotations are only sampled in two or three dimensions");
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gupred
