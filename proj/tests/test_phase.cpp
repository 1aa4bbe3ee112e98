#include <gtest/gtest.h>

#include <numbers>

#include "qwalk/phase.hpp"

using qwalk::Phase;

TEST(Phase, QuarterPiFactorsAreExact) {
  EXPECT_EQ(Phase::half_pi().factor(), (qwalk::cplx{0.0, 1.0}));
  EXPECT_EQ(Phase::pi().factor(), (qwalk::cplx{-1.0, 0.0}));
  EXPECT_EQ(Phase::zero().factor(), (qwalk::cplx{1.0, 0.0}));
  EXPECT_EQ(Phase::quarter_pi(-2).factor(), (qwalk::cplx{0.0, -1.0}));
  EXPECT_EQ(Phase::half_pi().factor_squared(), (qwalk::cplx{-1.0, 0.0}));
  EXPECT_TRUE(Phase::half_pi().is_half_pi());
  EXPECT_TRUE(Phase::quarter_pi(10).is_half_pi());
  EXPECT_FALSE(Phase::pi().is_half_pi());
}

TEST(Phase, RadiansSnapOnlyOnExactMultiples) {
  EXPECT_TRUE(Phase::radians(std::numbers::pi / 2).is_half_pi());
  EXPECT_EQ(Phase::radians(std::numbers::pi / 2).factor(), (qwalk::cplx{0.0, 1.0}));
  EXPECT_FALSE(Phase::radians(1.5707963).is_half_pi());
  const auto p = Phase::radians(0.3);
  EXPECT_NEAR(std::abs(p.factor() - std::polar(1.0, 0.3)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(p.factor_squared() - std::polar(1.0, 0.6)), 0.0, 1e-15);
}
