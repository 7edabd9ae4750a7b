#include <gtest/gtest.h>

#include <cmath>

#include "gupred/ham_reduction.hpp"
#include "gupred/presets.hpp"
#include "gupred/sampling.hpp"
#include "oracle_values.hpp"

using namespace gupred;
using namespace gupred::cosmo;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

const ScalarField kOne = ScalarField::constant(2, 1.0);

}  // namespace

TEST(BianchiH, Examples) {
  EXPECT_EQ(bianchi_H(PhasePoint(vec({0, 0, 0, 1, 0, 0})), kOne), 0.0);
  EXPECT_EQ(bianchi_H(PhasePoint(vec({0, 0, 0, 2, 1, 1})), kOne), -1.0);
  EXPECT_NEAR(bianchi_H(PhasePoint(vec({0.1, 0.2, -0.3, 1.5, 0.4, -0.6})), presets::bianchi_potential()),
              oracle::kBianchiHAtX, 1e-14);
}

TEST(BianchiH, GradientMatchesDifferences) {
  Sampler s(11);
  const ScalarField V = presets::bianchi_potential();
  const ScalarField H = bianchi_hamiltonian(V);
  for (int i = 0; i < 20; ++i) {
    const Vector x = s.uniform(6, -1.0, 1.0);
    EXPECT_LT(max_abs(bianchi_dH(PhasePoint(x), V) - fd_gradient(H, x, FdOptions{1e-4, 4, std::nullopt})), 1e-8);
  }
}

TEST(BianchiXh, CanonicalExample) {
  const Vector X = bianchi_Xh(presets::bianchi_canonical(), PhasePoint(vec({0, 0, 0, 1, 0, 0})), kOne);
  EXPECT_LT(max_abs(X - vec({-2, 0, 0, -4, 0, 0})), 1e-15);
}

TEST(BianchiXh, OracleValues) {
  const Vector X = bianchi_Xh(presets::bianchi_maggiore(), PhasePoint(vec({0.1, 0.2, -0.3, 1.5, 0.4, -0.6})),
                              presets::bianchi_potential());
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(X(i), oracle::kBianchiXH[i], 1e-12) << i;
  }
}

TEST(BianchiXh, AgreesWithGenericSolve) {
  Sampler s(12);
  const auto prof = presets::bianchi_maggiore();
  const ScalarField V = presets::bianchi_potential();
  for (int i = 0; i < 100; ++i) {
    const PhasePoint x(s.uniform(6, -1.0, 1.0));
    const Vector generic = hamiltonian_vector_field(prof, bianchi_dH(x, V), x);
    EXPECT_LT(max_abs(bianchi_Xh(prof, x, V) - generic), 1e-9);
  }
}

TEST(BianchiXh, TangentToConstraint) {
  Sampler s(13);
  const auto prof = presets::bianchi_maggiore();
  const ScalarField V = presets::bianchi_potential();
  for (int i = 0; i < 100; ++i) {
    const PhasePoint x = embed(s.uniform(-0.5, 0.5), s.uniform(4, -1.0, 1.0), V);
    EXPECT_LT(std::abs(bianchi_dH(x, V).dot(bianchi_Xh(prof, x, V))), 1e-9);
  }
}

TEST(Lift, Examples) {
  EXPECT_EQ(lift_to_branch(0, 0, 0, 0, 0, kOne), 1.0);
  EXPECT_NEAR(lift_to_branch(0, 0, 0, 3, 4, ScalarField::constant(2, 0.0)), 5.0, 1e-15);
  EXPECT_THROW(lift_to_branch(0, 0, 0, 0, 0, ScalarField::constant(2, -1.0)), NegativeRadicand);
}

TEST(Lift, LandsOnConstraint) {
  Sampler s(14);
  const ScalarField V = presets::bianchi_potential();
  for (int i = 0; i < 100; ++i) {
    const PhasePoint x = embed(s.uniform(-0.5, 0.5), s.uniform(4, -1.0, 1.0), V);
    EXPECT_LT(std::abs(bianchi_H(x, V)), 1e-12);
    EXPECT_GT(x.p(0), 0.0);
  }
}

TEST(ReducedXt, CanonicalExample) {
  const Vector X = reduced_Xt(0.0, vec({0, 0, 1, 0}), presets::bianchi_canonical(), kOne);
  EXPECT_LT(max_abs(X - vec({2, 0, 0, 0})), 1e-15);
}

TEST(ReducedXt, OracleValues) {
  const Vector X = reduced_Xt(-0.2, vec({0.3, 0.1, -0.5, 0.25}), presets::bianchi_maggiore(),
                              presets::bianchi_potential());
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(X(i), oracle::kReducedXt[i], 1e-12) << i;
  }
}

TEST(ReducedXt, ScalesWithPotential) {
  // p-independent part scales with c for V -> c V
  const auto prof = presets::bianchi_canonical();
  const Vector s = vec({0.3, -0.2, 0, 0});
  const ScalarField V = presets::bianchi_potential();
  const ScalarField V3(2, [V](const Vector& y) { return 3.0 * V(y); });
  const Vector a = reduced_Xt(0.1, s, prof, V);
  const Vector b = reduced_Xt(0.1, s, prof, V3);
  EXPECT_LT(max_abs(b - 3.0 * a), 1e-9);
}

TEST(ReducedXt, MatchesProjectedSolve) {
  Sampler s(15);
  const auto prof = presets::bianchi_maggiore();
  const ScalarField V = presets::bianchi_potential();
  for (int i = 0; i < 100; ++i) {
    const double t = s.uniform(-0.5, 0.5);
    const Vector y = s.uniform(4, -1.0, 1.0);
    EXPECT_LT(max_abs(reduced_Xt(t, y, prof, V) - projected_Xt(t, y, prof, V)), 1e-9);
  }
}

TEST(OmegaN, CanonicalExample) {
  const FormMatrix w = reduced_omega_N(presets::bianchi_canonical(), vec({0, 0, 0, 0}), kOne);
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 2) = -1;
  expect(1, 3) = -1;
  expect(2, 0) = 1;
  expect(3, 1) = 1;
  EXPECT_EQ(w.entries, expect);
}

TEST(OmegaN, MomentumEntry) {
  const FormMatrix w = reduced_omega_N(presets::bianchi_maggiore(), vec({2, 3, 1, 0}), kOne);
  EXPECT_NEAR(w(2, 3), oracle::kOmegaNP1P2, 1e-15);
  EXPECT_NEAR(w(3, 2), -oracle::kOmegaNP1P2, 1e-15);
}

TEST(OmegaN, PullbackAgrees) {
  Sampler s(16);
  const auto prof = presets::bianchi_maggiore();
  const ScalarField V = presets::bianchi_potential();
  for (int i = 0; i < 100; ++i) {
    const Vector y = s.uniform(4, -1.0, 1.0);
    EXPECT_LT(max_abs(reduced_omega_N(prof, y, V).entries - pulled_back_omega_N(prof, y, V).entries), 1e-8);
  }
}

TEST(OmegaN, Closed) {
  Sampler s(17);
  const auto prof = presets::bianchi_maggiore();
  const TwoFormField w = [&](const Vector& y) { return reduced_omega_N(prof, y, kOne).entries; };
  for (int i = 0; i < 50; ++i) {
    EXPECT_LT(std::abs(exterior_derivative_two_form(w, s.uniform(4, -1.0, 1.0), FdOptions::exterior())), 1e-6);
  }
}

TEST(ReducedH, Example) {
  EXPECT_EQ(reduced_H(0.0, vec({0, 0, 0.3, 0.4}), kOne), 1.25);
}

TEST(ReducedH, RecoversXt) {
  Sampler s(18);
  const auto prof = presets::bianchi_maggiore();
  const ScalarField V = presets::bianchi_potential();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vector y = s.uniform(4, -1.0, 1.0);
    // omega|_N is evaluated on the t = 0 slice; the field must match there
    worst = std::max(worst, max_abs(reduced_hamiltonian_field(0.0, y, prof, V) - reduced_Xt(0.0, y, prof, V)));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(LieDerivative, ValidProfileIsSymplectic) {
  Sampler s(19);
  const auto prof = presets::bianchi_maggiore();
  const ScalarField V = presets::bianchi_potential();
  for (int i = 0; i < 30; ++i) {
    EXPECT_LT(lie_derivative_residual(s.uniform(-0.5, 0.5), prof, V, s.uniform(4, -1.0, 1.0)), 1e-7);
  }
}

TEST(LieDerivative, FlatViolatingFixtureIsDetected) {
  Sampler s(20);
  const auto prof = presets::flat_violating_bianchi();
  const ScalarField V = presets::bianchi_potential();
  double worst = 0.0;
  for (int i = 0; i < 30; ++i) {
    worst = std::max(worst, lie_derivative_residual(s.uniform(-0.5, 0.5), prof, V, s.uniform(4, -1.0, 1.0)));
  }
  EXPECT_GT(worst, 1e-3);
}

TEST(FlatCoordinates, Verdicts) {
  EXPECT_TRUE(flat_coordinate_check(presets::bianchi_canonical()).pass);
  const auto valid = flat_coordinate_check(presets::bianchi_maggiore());
  EXPECT_TRUE(valid.pass);
  EXPECT_EQ(valid.max, 0.0);
  const auto bad = flat_coordinate_check(presets::flat_violating_bianchi());
  EXPECT_FALSE(bad.pass);
  EXPECT_EQ(bad.worst, "{q0,q1}");
  EXPECT_THROW(flat_coordinate_check(presets::maggiore2d()), DomainError);
}
