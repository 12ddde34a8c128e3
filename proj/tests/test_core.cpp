#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "lojsgd/core.hpp"
#include "lojsgd/landscapes.hpp"

using namespace lojsgd;

namespace {

class ConstantObjective final : public Objective {
 public:
  explicit ConstantObjective(std::size_t dim, double c) : dim_(dim), c_(c) {}
  std::size_t dim() const override { return dim_; }

 private:
  double eval_value(std::span<const double>) const override { return c_; }
  void eval_gradient(std::span<const double>, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
  }
  std::size_t dim_;
  double c_;
};

class BlowUp final : public Objective {
 public:
  std::size_t dim() const override { return 3; }

 private:
  double eval_value(std::span<const double> theta) const override {
    return theta[2] > 0.5 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  void eval_gradient(std::span<const double>, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
  }
};

}  // namespace

TEST(ParamVector, RejectsNonFinite) {
  EXPECT_THROW(ParamVector({1.0, std::nan("")}), NumericalError);
  EXPECT_THROW(ParamVector({std::numeric_limits<double>::infinity()}), NumericalError);
  EXPECT_NO_THROW(ParamVector({1.0, -2.0}));
}

TEST(Axpy, Examples) {
  EXPECT_EQ(axpy(0.0, {1, 2}, {3, 4}), ParamVector({3, 4}));
  EXPECT_EQ(axpy(1.0, {1, 2}, {0, 0}), ParamVector({1, 2}));
  EXPECT_EQ(axpy(-0.25, {4, 8}, {1, 1}), ParamVector({0, -1}));
}

TEST(Axpy, DimensionMismatchIsHardError) {
  EXPECT_THROW(axpy(1.0, {1, 2}, {1, 2, 3}), DimensionMismatch);
}

TEST(Axpy, SelfCancellationIsExactlyZero) {
  RngStream rng(7, 0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> v(8);
    for (double& x : v) x = rng.uniform(-1e6, 1e6);
    const ParamVector x(v);
    EXPECT_EQ(norm(axpy(-1.0, x, x)), 0.0);
  }
}

TEST(Norm, Examples) {
  EXPECT_EQ(norm(ParamVector({0, 0, 0})), 0.0);
  EXPECT_EQ(norm(ParamVector({3, 4})), 5.0);
  EXPECT_EQ(norm(ParamVector({1, 1, 1, 1})), 2.0);
}

TEST(RngStream, SameSeedAndStreamReproduce) {
  RngStream a(42, 3);
  RngStream b(42, 3);
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, DistinctStreamsLookIndependent) {
  RngStream a(42, 0);
  RngStream b(42, 1);
  const int n = 100000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.uniform() - 0.5;
    const double y = b.uniform() - 0.5;
    sa += x;
    sb += y;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  const double corr = (sab / n - sa * sb / n / n) /
                      std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  EXPECT_LT(std::abs(corr), 4.0 / std::sqrt(n));
}

TEST(Sampling, BallAndShellStayInside) {
  RngStream rng(1, 0);
  const ParamVector c({1, -1, 2});
  std::vector<double> x(3);
  for (int i = 0; i < 2000; ++i) {
    sample_in_ball(rng, c, 0.5, x);
    EXPECT_LE(distance(x, c), 0.5 + 1e-12);
    sample_in_shell(rng, c, 2.0, 3.0, x);
    const double d = distance(x, c);
    EXPECT_GE(d, 2.0 - 1e-12);
    EXPECT_LE(d, 3.0 + 1e-12);
  }
}

TEST(FdGradient, HalfSquaredNorm) {
  const QuadraticWell q(ParamVector({0, 0}), 1.0);
  const ParamVector g = fd_gradient(q, ParamVector({1, 2}), 1e-5);
  EXPECT_NEAR(g[0], 1.0, 1e-8);
  EXPECT_NEAR(g[1], 2.0, 1e-8);
}

TEST(FdGradient, ConstantIsZero) {
  const ConstantObjective c(4, 3.25);
  EXPECT_EQ(norm(fd_gradient(c, ParamVector({1, 2, 3, 4}))), 0.0);
}

TEST(FdGradient, NamesOffendingCoordinate) {
  const BlowUp f;
  try {
    fd_gradient(f, ParamVector({0, 0, 0.5}), 1e-3);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("coordinate 2"), std::string::npos);
  }
}

TEST(FdGradient, RejectsNonPositiveStep) {
  const ConstantObjective c(2, 0.0);
  EXPECT_THROW(fd_gradient(c, ParamVector({0, 0}), 0.0), PreconditionError);
}

TEST(GradientMismatch, SmallComponentsComparedAbsolutely) {
  EXPECT_DOUBLE_EQ(gradient_mismatch(ParamVector({1e-12, 2.0}), ParamVector({0.0, 2.0})), 1e-12);
  EXPECT_NEAR(gradient_mismatch(ParamVector({1.0}), ParamVector({1.1})), 0.1 / 1.1, 1e-15);
}

TEST(GradientRelativeError, NormWise) {
  // A tiny coordinate off by 100% barely moves the norm-wise error.
  EXPECT_NEAR(gradient_relative_error(ParamVector({1e-7, 3.0, 4.0}), ParamVector({0.0, 3.0, 4.0})),
              1e-7 / 5.0, 1e-20);
  EXPECT_DOUBLE_EQ(gradient_relative_error(ParamVector({0.0, 0.0}), ParamVector({1e-12, 0.0})), 1e-12);
  EXPECT_THROW(gradient_relative_error(ParamVector({1.0}), ParamVector({1.0, 2.0})), DimensionMismatch);
}
