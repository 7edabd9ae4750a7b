#include <gtest/gtest.h>

#include <cmath>

#include "gupred/numcalc.hpp"
#include "gupred/sampling.hpp"
#include "oracle_values.hpp"

using namespace gupred;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) {
    out(i++) = x;
  }
  return out;
}

ScalarField exp4() {
  return ScalarField(1, [](const Vector& x) { return std::exp(4.0 * x(0)); });
}

}  // namespace

TEST(FdGradient, Square) {
  const ScalarField f(1, [](const Vector& x) { return x(0) * x(0); });
  EXPECT_NEAR(fd_gradient(f, vec({3.0}))(0), 6.0, 1e-9);
}

TEST(FdGradient, ConstantIsZero) {
  const Vector g = fd_gradient(ScalarField::constant(3, 2.5), vec({0.1, -4.0, 7.0}));
  EXPECT_LT(max_abs(g), 1e-12);
}

TEST(FdGradient, Exponential) { EXPECT_NEAR(fd_gradient(exp4(), vec({0.0}))(0), 4.0, 1e-8); }

TEST(FdGradient, SecondOrderConvergence) {
  const double e1 = std::abs(fd_gradient(exp4(), vec({0.0}), 1e-2)(0) - 4.0);
  const double e2 = std::abs(fd_gradient(exp4(), vec({0.0}), 5e-3)(0) - 4.0);
  const double ratio = e1 / e2;
  EXPECT_GE(ratio, 3.5);
  EXPECT_LE(ratio, 4.5);
}

TEST(FdGradient, StencilOutsideBoxThrows) {
  FdOptions opt;
  opt.box = Box::uniform(1, 0.0, 1.0);
  EXPECT_THROW(fd_gradient(exp4(), vec({1.0}), opt), DomainEscape);
  EXPECT_NO_THROW(fd_gradient(exp4(), vec({0.5}), opt));
}

TEST(ScalarField, ArityChecked) { EXPECT_THROW(exp4()(vec({1.0, 2.0})), DomainError); }

TEST(ScalarField, ExactGradientPreferred) {
  const ScalarField f(
      1, [](const Vector& x) { return x(0); }, [](const Vector&) { return vec({42.0}); });
  EXPECT_EQ(f.gradient(vec({0.0}))(0), 42.0);
}

TEST(FdJacobian, Identity) {
  const Matrix j = fd_jacobian([](const Vector& u) { return u; }, vec({0.3, -1.0, 2.0}));
  EXPECT_LT(max_abs(j - Matrix::Identity(3, 3)), 1e-10);
}

TEST(FdJacobian, PolarChart) {
  const VectorMap polar = [](const Vector& u) { return vec({u(0) * std::cos(u(1)), u(0) * std::sin(u(1))}); };
  EXPECT_LT(max_abs(fd_jacobian(polar, vec({1.0, 0.0})) - Matrix::Identity(2, 2)), 1e-9);
}

TEST(FdJacobian, LinearMapExact) {
  Matrix a(2, 3);
  a << 1, -2, 0.5, 3, 0.25, -7;
  const Matrix j = fd_jacobian([a](const Vector& u) { return Vector(a * u); }, vec({0.1, 0.2, 0.3}));
  EXPECT_LT(max_abs(j - a), 1e-10);
}

TEST(Pullback, IdentityChartLeavesFormUnchanged) {
  Matrix w(2, 2);
  w << 0, -1, 1, 0;
  Chart id{"id", {"x", "y"}, [](const Vector& u) { return u; }};
  const FormMatrix p = pullback_two_form([w](const Vector&) { return w; }, id, vec({0.4, 0.5}));
  EXPECT_LT(max_abs(p.entries - w), 1e-10);
}

TEST(Pullback, Functoriality) {
  const TwoFormField w = [](const Vector& x) {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 1) = 1.0 + x(2) * x(2);
    m(1, 2) = std::sin(x(0));
    m(0, 2) = x(1);
    return Matrix(m - m.transpose());
  };
  Chart inner{"inner", {"a", "b"}, [](const Vector& u) { return vec({u(0) + u(1), u(0) * u(1)}); }};
  Chart outer{"outer", {"s", "t"}, [](const Vector& v) { return vec({v(0), std::exp(v(1)), v(0) - v(1)}); }};
  const Vector u = vec({0.3, -0.7});
  const Matrix direct = pullback_two_form(w, compose(outer, inner), u).entries;
  const TwoFormField mid = [&](const Vector& v) { return pullback_two_form(w, outer, v).entries; };
  const Matrix sequential = pullback_two_form(mid, inner, u).entries;
  EXPECT_LT(max_abs(direct - sequential), 1e-8);
}

TEST(ExteriorDerivative, ExactFormIsClosed) {
  const ScalarField f(2, [](const Vector& x) { return x(0) * x(1); });
  const OneFormField df = [f](const Vector& x) { return fd_gradient(f, x); };
  EXPECT_LT(max_abs(exterior_derivative_one_form(df, vec({0.7, -1.3})).entries), 1e-7);
}

TEST(ExteriorDerivative, RotationForm) {
  const OneFormField alpha = [](const Vector& x) { return vec({-x(1), x(0)}); };
  const Matrix d = exterior_derivative_one_form(alpha, vec({0.2, 0.9})).entries;
  EXPECT_NEAR(d(0, 1), 2.0, 1e-9);
  EXPECT_NEAR(d(1, 0), -2.0, 1e-9);
}

TEST(ExteriorDerivative, DSquaredVanishesOnSamples) {
  const ScalarField f(3, [](const Vector& x) { return std::sin(x(0)) * x(1) + std::exp(0.3 * x(2)) * x(0); });
  const OneFormField df = [f](const Vector& x) { return fd_gradient(f, x); };
  Sampler s(3);
  for (int i = 0; i < 50; ++i) {
    EXPECT_LT(max_abs(exterior_derivative_one_form(df, s.uniform(3, -2.0, 2.0)).entries), 1e-6);
  }
}

TEST(ExteriorDerivative, ConstantTwoFormIsClosed) {
  Matrix w(4, 4);
  w << 0, 0, -1, 0, 0, 0, 0, -1, 1, 0, 0, 0, 0, 1, 0, 0;
  EXPECT_EQ(exterior_derivative_two_form([w](const Vector&) { return w; }, vec({1, 2, 3, 4})), 0.0);
}

TEST(ExteriorDerivative, NonClosedTwoFormDetected) {
  // w = x3 dx1 ^ dx2 has dw = dx3 ^ dx1 ^ dx2
  const TwoFormField w = [](const Vector& x) {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 1) = x(2);
    m(1, 0) = -x(2);
    return m;
  };
  EXPECT_NEAR(exterior_derivative_two_form(w, vec({0.1, 0.2, 0.3})), 1.0, 1e-8);
}

TEST(InteriorProduct, FirstSlotConvention) {
  FormMatrix w{Matrix(2, 2), Variance::lower};
  w.entries << 0, -1, 1, 0;
  const Vector a = interior_product(vec({1.0, 0.0}), w);
  EXPECT_EQ(a(0), 0.0);
  EXPECT_EQ(a(1), -1.0);
  EXPECT_EQ(max_abs(interior_product(Vector::Zero(2), w)), 0.0);
}

TEST(InteriorProduct, DimensionMismatchThrows) {
  FormMatrix w{Matrix::Zero(2, 2), Variance::lower};
  EXPECT_THROW(interior_product(Vector::Zero(3), w), DomainError);
}
