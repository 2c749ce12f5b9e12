#include "settings.hpp"

#include <cstdio>
#include <fstream>

#include <gtest/gtest.h>

#include "crfve/errors.hpp"

namespace crfve::cli {
namespace {

TEST(ConfigFromJson, ReadsEveryKey) {
  const auto doc = nlohmann::json::parse(R"({
    "n": 16, "m": 2, "freq": 10, "alpha1": 1e3, "red_mask": [0, 3],
    "variant": "nsym", "tol": 1e-8, "maxit": 50, "stopping": "energy",
    "f": 2.5, "seed": 7, "diagonal": "se-nw"})");
  const ExperimentConfig c = config_from_json(doc);
  EXPECT_EQ(c.n, 16);
  EXPECT_EQ(c.m, 2);
  EXPECT_EQ(c.freq, 10);
  EXPECT_EQ(c.alpha1, 1e3);
  EXPECT_EQ(c.red_mask, (std::vector<int>{0, 3}));
  EXPECT_EQ(c.variant, Variant::kNonsymmetric);
  EXPECT_EQ(c.tol, 1e-8);
  EXPECT_EQ(c.maxit, 50);
  EXPECT_EQ(c.stopping, StoppingRule::kEnergy);
  EXPECT_EQ(c.f, 2.5);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.diagonal, Diagonal::kSouthEastToNorthWest);
}

TEST(ConfigFromJson, RejectsUnknownKeysAndBadTypes) {
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"nn": 4})")), InvalidParameter);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"n": "four"})")), InvalidParameter);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"([1, 2])")), InvalidParameter);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"variant": "x"})")), InvalidParameter);
}

TEST(Overrides, TakePrecedenceOverFile) {
  const std::string path = ::testing::TempDir() + "crfve_config.json";
  {
    std::ofstream out(path);
    out << R"({"n": 16, "m": 4, "alpha1": 10})";
  }
  Overrides o;
  o.m = 2;
  o.variant = "nsym";
  const ExperimentConfig c = load_config(path, o);
  EXPECT_EQ(c.n, 16);
  EXPECT_EQ(c.m, 2);
  EXPECT_EQ(c.alpha1, 10.0);
  EXPECT_EQ(c.variant, Variant::kNonsymmetric);
  std::remove(path.c_str());
}

TEST(LoadConfig, ValidatesAndReportsMissingFile) {
  Overrides o;
  o.n = 10;
  o.m = 4;
  EXPECT_THROW(load_config("", o), InvalidParameter);
  EXPECT_THROW(load_config("/nonexistent/crfve.json", {}), InvalidParameter);
}

TEST(ToJson, ConfigRoundTrips) {
  ExperimentConfig c;
  c.n = 8;
  c.m = 2;
  c.red_mask = {1};
  c.variant = Variant::kNonsymmetric;
  const ExperimentConfig back = config_from_json(to_json(c));
  EXPECT_EQ(back.n, 8);
  EXPECT_EQ(back.red_mask, c.red_mask);
  EXPECT_EQ(back.variant, c.variant);
}

TEST(ToJson, VerifyReportFields) {
  VerifyReport r;
  r.checks.push_back({"symmetry", false, 1e-3, 1e-12, "detail"});
  const auto doc = to_json(r);
  EXPECT_FALSE(doc["passed"].get<bool>());
  EXPECT_EQ(doc["checks"][0]["name"], "symmetry");
  EXPECT_EQ(doc["checks"][0]["measured"].get<double>(), 1e-3);
}

}  // namespace
}  // namespace crfve::cli
