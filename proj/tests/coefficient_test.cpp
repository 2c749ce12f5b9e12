#include "crfve/coefficient.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "crfve/errors.hpp"

namespace crfve {
namespace {

TEST(OscillatoryCoefficient, PointValues) {
  const std::vector<int> red = {3};
  const CoefficientField a = make_oscillatory_coefficient(10, 1000.0, red);
  // sin(10 pi / 20) = 1 at (0.05, 0.05).
  EXPECT_NEAR(a.eval(0, {0.05, 0.05}), 3.0, 1e-12);
  EXPECT_NEAR(a.eval(0, {0.1, 0.3}), 2.0, 1e-12);
  EXPECT_NEAR(a.eval(3, {0.1, 0.3}), 2000.0, 1e-9);
  EXPECT_DOUBLE_EQ(a.multiplier(3), 1000.0);
  EXPECT_DOUBLE_EQ(a.multiplier(2), 1.0);
  EXPECT_EQ(a.frequency(), 10);
}

TEST(OscillatoryCoefficient, BoundedBetweenOneAndThreeTimesMultiplier) {
  const std::vector<int> red = {0};
  const CoefficientField a = make_oscillatory_coefficient(100, 5.0, red);
  for (int i = 0; i <= 50; ++i) {
    const Point p{i / 50.0, std::fmod(i * 0.37, 1.0)};
    EXPECT_GE(a.eval(1, p), 1.0);
    EXPECT_LE(a.eval(1, p), 3.0);
    EXPECT_GE(a.eval(0, p), 5.0);
    EXPECT_LE(a.eval(0, p), 15.0);
  }
}

TEST(OscillatoryCoefficient, TensorIsIsotropic) {
  const std::vector<int> red;
  const CoefficientField a = make_oscillatory_coefficient(10, 1.0, red);
  const Tensor2 t = a.tensor(0, {0.3, 0.7});
  EXPECT_DOUBLE_EQ(t(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(t(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(t(0, 0), t(1, 1));
}

TEST(OscillatoryCoefficient, RejectsBadParameters) {
  const std::vector<int> red = {0};
  EXPECT_THROW(make_oscillatory_coefficient(10, 0.0, red), InvalidParameter);
  EXPECT_THROW(make_oscillatory_coefficient(10, -1.0, red), InvalidParameter);
  EXPECT_THROW(make_oscillatory_coefficient(0, 1.0, red), InvalidParameter);
}

TEST(ConstantCoefficient, MultipliersApplyPerSubdomain) {
  const CoefficientField a = CoefficientField::constant(2.0, {{1, 10.0}});
  EXPECT_DOUBLE_EQ(a.eval(0, {0.2, 0.2}), 2.0);
  EXPECT_DOUBLE_EQ(a.eval(1, {0.2, 0.2}), 20.0);
  EXPECT_THROW(CoefficientField::constant(1.0, {{0, 0.0}}), InvalidParameter);
}

TEST(Presets, MasksAreInRangeAndDistinct) {
  for (const std::string name : {"problem1", "problem2", "problem3"}) {
    const int m = preset_subdomains_per_side(name);
    const std::vector<int> mask = preset_mask(name);
    EXPECT_FALSE(mask.empty()) << name;
    EXPECT_LT(static_cast<int>(mask.size()), m * m) << name;
    EXPECT_EQ(std::set<int>(mask.begin(), mask.end()).size(), mask.size()) << name;
    for (int k : mask) {
      EXPECT_GE(k, 0);
      EXPECT_LT(k, m * m);
    }
  }
  EXPECT_EQ(preset_subdomains_per_side("problem1"), 4);
  EXPECT_EQ(preset_subdomains_per_side("problem3"), 32);
  EXPECT_THROW(preset_mask("problem9"), InvalidParameter);
}

}  // namespace
}  // namespace crfve
