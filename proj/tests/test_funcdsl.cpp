#include <gtest/gtest.h>

#include <cmath>

#include "gupred/funcdsl.hpp"
#include "gupred/sampling.hpp"
#include "oracle_values.hpp"

using namespace gupred;
using namespace gupred::dsl;

TEST(Parse, PsqField) {
  const ScalarField f = phase_field(parse("1 + 0.1*psq"), VariableLayout{2, 1});
  Vector x(4);
  x << 0, 0, 1, 2;
  EXPECT_DOUBLE_EQ(f(x), 1.5);
}

TEST(Parse, CoordinateVariable) {
  const ScalarField f = phase_field(parse("q1"), VariableLayout{2, 1});
  Vector x(4);
  x << 3, 4, 0, 0;
  EXPECT_EQ(f(x), 3.0);
}

TEST(Parse, MalformedReportsOffset) {
  try {
    parse("1 + * 2");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset, 4u);
  }
}

TEST(Parse, UnknownFunctionAndIdentifier) {
  EXPECT_THROW(parse("log(2)"), UnknownIdentifier);
  EXPECT_THROW(parse("x1 + 1"), UnknownIdentifier);
  EXPECT_THROW(parse("exp(1, 2)"), ArityError);
}

TEST(Parse, LayoutResolution) {
  EXPECT_THROW(check_resolvable(parse("q3"), VariableLayout{2, 1}), UnknownIdentifier);
  EXPECT_THROW(check_resolvable(parse("q0"), VariableLayout{2, 1}), UnknownIdentifier);
  EXPECT_NO_THROW(check_resolvable(parse("q0 + p2"), VariableLayout{3, 0}));
  EXPECT_THROW(check_resolvable(parse("t"), VariableLayout{2, 1}), UnknownIdentifier);
  EXPECT_NO_THROW(check_resolvable(parse("t"), VariableLayout{2, 1}, true));
}

TEST(Eval, Exponentials) {
  EXPECT_EQ(eval(parse("exp(4*q0)"), {{"q0", 0.0}}), 1.0);
  EXPECT_NEAR(eval(parse("exp(4*q0)"), {{"q0", 0.25}}), oracle::kExpAtQuarter, 1e-15);
}

TEST(Eval, NonFiniteAndUnbound) {
  EXPECT_THROW(eval(parse("1/(q1-q1)"), {{"q1", 2.0}}), NonFiniteResult);
  EXPECT_THROW(eval(parse("sqrt(q1)"), {{"q1", -1.0}}), NonFiniteResult);
  EXPECT_THROW(eval(parse("q1 + q2"), {{"q1", 2.0}}), UnboundVariable);
}

TEST(Eval, Precedence) {
  EXPECT_EQ(eval(parse("2+3*4"), {}), 14.0);
  EXPECT_EQ(eval(parse("2^3^2"), {}), 512.0);
  EXPECT_EQ(eval(parse("-2^2"), {}), -4.0);
  EXPECT_EQ(eval(parse("8/4/2"), {}), 1.0);
  EXPECT_EQ(eval(parse("2-3-4"), {}), -5.0);
  EXPECT_EQ(eval(parse(" ( 1 +2 ) *3 "), {}), 9.0);
}

TEST(Eval, SgnAtZero) {
  EXPECT_EQ(eval(parse("sgn(0)"), {}), 0.0);
  EXPECT_EQ(eval(parse("sgn(-3)"), {}), -1.0);
}

TEST(RoundTrip, PrintParseIsStable) {
  for (const char* src : {"1 + 0.1*psq", "-(q1^2)^0.5 + sin(p2)/cos(q1)", "2^3^2", "exp(-4*q0)*(1 + q1*q2)",
                          "0.1234567890123456789*p1 - -3"}) {
    const Expr a = parse(src);
    const Expr b = parse(a.print());
    EXPECT_TRUE(a == b) << src;
    EXPECT_EQ(a.print(), b.print());
  }
}

TEST(RotationalGuard, Verdicts) {
  EXPECT_TRUE(rotational_guard(parse("1+0.1*psq"), 2));
  EXPECT_FALSE(rotational_guard(parse("1+0.1*p1"), 2));
  EXPECT_TRUE(rotational_guard(parse("sqrt(psq)^2 - psq"), 2));
  EXPECT_TRUE(rotational_guard(parse("1 + 0.3*(p1^2 + p2^2 + p3^2)"), 3));
  EXPECT_FALSE(rotational_guard(parse("1 + p1*p2"), 3));
}

TEST(RotationalGuard, SoundOnPresetFamilies) {
  Sampler s(99);
  int rejected = 0;
  for (int i = 0; i < 200; ++i) {
    const double b = s.uniform(-1.0, 1.0);
    const double c = s.uniform(0.0, 0.5);
    char buf[160];
    std::snprintf(buf, sizeof buf, "1 + %.17g*psq + %.17g*psq^2", c, b * c);
    GuardOptions opt;
    opt.seed = static_cast<std::uint64_t>(i);
    opt.samples = 5;
    if (!rotational_guard(parse(buf), 2 + i % 2, opt)) {
      ++rejected;
    }
  }
  EXPECT_EQ(rejected, 0);
}

TEST(NamedField, PotentialOverAnisotropies) {
  const ScalarField v = named_field(parse("1 + 0.5*(q1^2 + q2^2)"), {"q1", "q2"});
  Vector y(2);
  y << 1.0, 2.0;
  EXPECT_DOUBLE_EQ(v(y), 3.5);
  EXPECT_THROW(named_field(parse("p1"), {"q1", "q2"}), UnknownIdentifier);
}
