#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "frontload/numerics/lagrange.hpp"
#include "frontload/numerics/precision.hpp"
#include "frontload/numerics/quadrature.hpp"

using namespace frontload;

namespace {

// Independent oracle: Lagrange basis evaluated in long double.
long double lagrange_basis(const std::vector<long double>& x, std::size_t m, long double t) {
  long double v = 1;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (k != m) v *= (t - x[k]) / (x[m] - x[k]);
  return v;
}

}  // namespace

TEST(Precision, MinimumDigitsAccepted) {
  auto ctx = make_context(15);
  EXPECT_EQ(ctx.digits, 15);
  EXPECT_GT(ctx.working_digits(), 15);
}

TEST(Precision, RejectsTooFewDigits) {
  EXPECT_THROW(make_context(0), DomainError);
  EXPECT_THROW(make_context(14), DomainError);
}

TEST(Precision, ScopedPrecisionRestores) {
  unsigned before = HighReal::default_precision();
  {
    ScopedPrecision scope(make_context(300));
    EXPECT_EQ(HighReal::default_precision(), 310u);
  }
  EXPECT_EQ(HighReal::default_precision(), before);
}

TEST(Precision, DecimalRoundTrip) {
  auto ctx = make_context(50);
  ScopedPrecision scope(ctx);
  HighReal z = parse_real<HighReal>("3.30e+461");
  EXPECT_EQ(to_decimal(z, 3), "3.30e+461");
  HighReal third = HighReal(1) / 3;
  HighReal back = parse_real<HighReal>(to_decimal(third, ctx.working_digits()));
  EXPECT_LT(to_double(abs(back - third) / third), 1e-45);
  EXPECT_THROW(parse_real<double>("1.5x"), DomainError);
}

TEST(RequiredDigits, SingleNode) {
  EXPECT_EQ(required_digits(0, 1.0, -3.0), 55);
  EXPECT_EQ(required_digits(0, 0.0, 0.0), 55);
}

TEST(RequiredDigits, ThreeNodes) { EXPECT_EQ(required_digits(2, 2.0, -1.0), 55); }

TEST(RequiredDigits, FigureThreeScale) {
  // max |l_m(-6)| = 10^205.469 (mpmath, 80 digits)
  EXPECT_EQ(required_digits(150, 1.5, -6.0), 287);
}

TEST(RequiredDigits, MatchesNodeSetOverload) {
  auto ns = NodeSet<double>::equispaced(150, 0.01, -6.0);
  EXPECT_EQ(required_digits(ns), 287);
}

TEST(NodeSet, RejectsDuplicatesAndEmpty) {
  EXPECT_THROW(NodeSet<double>({0.0, 1.0, 0.0}, 0.5), DomainError);
  EXPECT_THROW(NodeSet<double>({}, 0.5), DomainError);
}

TEST(LagrangeWeights, IdentityExtrapolation) {
  auto ctx = make_context(15);
  auto w = lagrange_weights(NodeSet<double>({0.0}, 0.0), ctx);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_DOUBLE_EQ(w.weights[0].real(), 1.0);
}

TEST(LagrangeWeights, TwoNodes) {
  auto ctx = make_context(15);
  auto w = lagrange_weights(NodeSet<double>({0.0, 1.0}, -1.0), ctx);
  EXPECT_DOUBLE_EQ(w.weights[0].real(), 2.0);
  EXPECT_DOUBLE_EQ(w.weights[1].real(), -1.0);
}

TEST(LagrangeWeights, ThreeNodes) {
  auto ctx = make_context(15);
  auto w = lagrange_weights(NodeSet<double>({0.0, 1.0, 2.0}, -1.0), ctx);
  EXPECT_DOUBLE_EQ(w.weights[0].real(), 3.0);
  EXPECT_DOUBLE_EQ(w.weights[1].real(), -3.0);
  EXPECT_DOUBLE_EQ(w.weights[2].real(), 1.0);
}

TEST(LagrangeWeights, InsufficientPrecisionDetected) {
  auto ctx = make_context(15);
  auto ns = NodeSet<double>::equispaced(40, 1.5 / 40, -4.5);
  EXPECT_THROW(lagrange_weights(ns, ctx), PrecisionError);
}

TEST(VandermondeSolve, HandExamples) {
  auto ctx = make_context(15);
  auto w1 = vandermonde_solve(NodeSet<double>({0.0}, 0.0), ctx);
  EXPECT_NEAR(w1.weights[0].real(), 1.0, 1e-14);
  auto w2 = vandermonde_solve(NodeSet<double>({0.0, 1.0}, -1.0), ctx);
  EXPECT_NEAR(w2.weights[0].real(), 2.0, 1e-14);
  EXPECT_NEAR(w2.weights[1].real(), -1.0, 1e-14);
  auto w3 = vandermonde_solve(NodeSet<double>({0.0, 1.0, 2.0}, -1.0), ctx);
  EXPECT_NEAR(w3.weights[0].real(), 3.0, 1e-13);
  EXPECT_NEAR(w3.weights[1].real(), -3.0, 1e-13);
  EXPECT_NEAR(w3.weights[2].real(), 1.0, 1e-13);
}

TEST(MomentResiduals, HandChecks) {
  auto ctx = make_context(15);
  WeightVector<double> a{{{1.0, 0.0}}};
  auto r = moment_residuals(a, NodeSet<double>({0.0}, 0.0), 0, ctx);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0], 0.0);
  WeightVector<double> b{{{2.0, 0.0}, {-1.0, 0.0}}};
  for (double v : moment_residuals(b, NodeSet<double>({0.0, 1.0}, -1.0), 1, ctx)) EXPECT_LT(v, 1e-15);
  WeightVector<double> c{{{3.0, 0.0}, {-3.0, 0.0}, {1.0, 0.0}}};
  auto rc = moment_residuals(c, NodeSet<double>({0.0, 1.0, 2.0}, -1.0), 2, ctx);
  ASSERT_EQ(rc.size(), 3u);
  for (double v : rc) EXPECT_LT(v, 1e-15);
  EXPECT_THROW(moment_residuals(c, NodeSet<double>({0.0, 1.0, 2.0}, -1.0), 3, ctx), DomainError);
}

TEST(LagrangeWeights, MatchesLongDoubleOracle) {
  auto ctx = make_context(40);
  ScopedPrecision scope(ctx);
  const int K = 12;
  std::vector<long double> x;
  std::vector<HighReal> xs;
  for (int m = 0; m <= K; ++m) {
    x.push_back(0.1L * m);
    xs.push_back(HighReal(m) / 10);
  }
  auto w = lagrange_weights(NodeSet<HighReal>(xs, HighReal(-0.3)), ctx);
  for (int m = 0; m <= K; ++m) {
    long double expect = lagrange_basis(x, static_cast<std::size_t>(m), -0.3L);
    double got = to_double(w.weights[static_cast<std::size_t>(m)].real());
    EXPECT_NEAR(got / static_cast<double>(expect), 1.0, 1e-12) << "m=" << m;
  }
}

TEST(LagrangeWeights, FigureThreeResiduals) {
  const int K = 150;
  auto ctx = auto_context(K, 1.5, -6.0);
  EXPECT_EQ(ctx.digits, 287);
  ScopedPrecision scope(ctx);
  auto ns = NodeSet<HighReal>::equispaced(K, HighReal(1.5) / K, HighReal(-6));
  auto w = lagrange_weights(ns, ctx);
  auto r = moment_residuals(w, ns, K, ctx);
  ASSERT_EQ(r.size(), 151u);
  for (const auto& v : r) EXPECT_LT(log10_abs(v), -30.0);
}

// Property: random node sets with K <= 30 give the same weights by both routes.
TEST(LagrangeProperty, AgreesWithVandermonde) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> kdist(0, 30);
  std::uniform_real_distribution<double> span(0.2, 3.0);
  std::uniform_real_distribution<double> tdist(-4.0, 0.0);
  for (int trial = 0; trial < 25; ++trial) {
    int K = kdist(rng);
    double dx = K == 0 ? 1.0 : span(rng) / K;
    double target = tdist(rng);
    int digits = required_digits(K, dx * K, target) + 20;
    auto ctx = make_context(digits);
    ScopedPrecision scope(ctx);
    auto ns = NodeSet<HighReal>::equispaced(K, HighReal(dx), HighReal(target));
    auto a = lagrange_weights(ns, ctx);
    auto b = vandermonde_solve(ns, ctx);
    HighReal tol = pow(HighReal(10), -HighReal(digits) / 2);
    for (std::size_t m = 0; m < a.size(); ++m) {
      HighReal scale = abs(a.weights[m]);
      HighReal diff = abs(a.weights[m] - b.weights[m]);
      EXPECT_LE(diff, tol * scale) << "K=" << K << " m=" << m;
    }
  }
}

// Property: residuals stay below 10^(-digits/3) for synthesized weights.
TEST(LagrangeProperty, ResidualBound) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> kdist(1, 60);
  for (int trial = 0; trial < 10; ++trial) {
    int K = kdist(rng);
    double target = -1.0 - (trial % 5);
    auto ctx = auto_context(K, 1.5, target);
    ScopedPrecision scope(ctx);
    auto ns = NodeSet<HighReal>::equispaced(K, HighReal(1.5) / K, HighReal(target));
    auto w = lagrange_weights(ns, ctx);
    auto r = moment_residuals(w, ns, K, ctx);
    for (const auto& v : r) EXPECT_LT(log10_abs(v), -ctx.digits / 3.0);
  }
}

// Property: a target on a node selects that node.
TEST(LagrangeProperty, TargetOnNodeIsUnitVector) {
  auto ctx = make_context(15);
  for (int K = 1; K <= 10; ++K) {
    for (int j = 0; j <= K; ++j) {
      auto ns = NodeSet<double>::equispaced(K, 0.25, 0.25 * j);
      auto w = lagrange_weights(ns, ctx);
      for (int m = 0; m <= K; ++m) {
        EXPECT_NEAR(w.weights[static_cast<std::size_t>(m)].real(), m == j ? 1.0 : 0.0, 1e-12);
      }
    }
  }
}

TEST(Integrate, Constant) {
  auto ctx = make_context(15);
  auto r = integrate<double>([](double) { return Complex<double>(1.0, 0.0); }, 0.0, 1.0, 1, ctx);
  EXPECT_NEAR(r.value.real(), 1.0, 1e-15);
  EXPECT_EQ(r.order, 16);
  EXPECT_EQ(r.panels, 1);
}

TEST(Integrate, Gaussian) {
  auto ctx = make_context(15);
  auto f = [](double x) { return Complex<double>(std::exp(-x * x), 0.0); };
  auto r = integrate<double>(f, -8.0, 8.0, 8, ctx);
  EXPECT_NEAR(r.value.real(), std::sqrt(M_PI), 1e-13);
  auto r2 = integrate<double>(f, -8.0, 8.0, 16, ctx);
  EXPECT_LT(std::abs(r2.value - r.value), 1e-13);
}

TEST(Integrate, GaussianHighPrecision) {
  auto ctx = make_context(60);
  ScopedPrecision scope(ctx);
  auto f = [](const HighReal& x) { return Complex<HighReal>(exp(-x * x), 0); };
  auto r = integrate<HighReal>(f, HighReal(-12), HighReal(12), 64, ctx, 24);
  HighReal expect = sqrt(pi<HighReal>());
  EXPECT_LT(log10_abs(HighReal(r.value.real() - expect)), -55.0);
}

TEST(Integrate, FullPeriodsVanish) {
  auto ctx = make_context(15);
  auto f = [](double x) { return std::exp(Complex<double>(0.0, 50.0 * x)); };
  auto r = integrate<double>(f, 0.0, 2 * M_PI, 32, ctx);
  EXPECT_LT(std::abs(r.value), 1e-12);
}

TEST(Integrate, RejectsNonFinite) {
  auto ctx = make_context(15);
  auto f = [](double x) { return Complex<double>(1.0 / (x - x), 0.0); };
  EXPECT_THROW(integrate<double>(f, 0.0, 1.0, 1, ctx), DomainError);
}

// Property: one panel integrates degree 2*order-1 polynomials exactly.
TEST(IntegrateProperty, PolynomialExactness) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  auto ctx = make_context(15);
  for (int order : {2, 5, 8, 16}) {
    const int degree = 2 * order - 1;
    std::vector<double> c(static_cast<std::size_t>(degree) + 1);
    for (auto& v : c) v = coef(rng);
    auto f = [&](double x) {
      double s = 0;
      for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
      return Complex<double>(s, 0.0);
    };
    double exact = 0;
    for (std::size_t k = 0; k < c.size(); ++k) exact += c[k] * (std::pow(1.0, k + 1.0) - std::pow(-0.5, k + 1.0)) / (k + 1.0);
    auto r = integrate<double>(f, -0.5, 1.0, 1, ctx, order);
    EXPECT_NEAR(r.value.real(), exact, 1e-13) << "order=" << order;
  }
}

TEST(IntegrateProperty, ThreadIndependentReduction) {
  auto ctx = make_context(15);
  auto f = [](double x) { return Complex<double>(std::sin(3 * x), std::cos(x)); };
  auto a = integrate<double>(f, 0.0, 5.0, 40, ctx);
  auto b = integrate<double>(f, 0.0, 5.0, 40, ctx);
  EXPECT_EQ(a.value, b.value);
}
