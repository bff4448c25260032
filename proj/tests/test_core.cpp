#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "motobs/core/params.hpp"
#include "motobs/error.hpp"
#include "motobs/tire/tire.hpp"
#include "test_support.hpp"

using namespace motobs;

namespace {

std::string nominal_text() {
  std::ifstream in(test::data_path("params/gsxr1000.yaml"));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string replace_line(std::string text, const std::string& key, const std::string& line) {
  const auto pos = text.find("\n" + key + ":");
  EXPECT_NE(pos, std::string::npos) << key;
  const auto end = text.find('\n', pos + 1);
  return text.replace(pos + 1, end - pos - 1, line);
}

}  // namespace

TEST(Parameters, LoadsPublishedValues) {
  const ParameterSet& p = test::nominal();
  EXPECT_DOUBLE_EQ(p.l_f, 0.727);
  EXPECT_DOUBLE_EQ(p.R_r, 0.297);
  EXPECT_DOUBLE_EQ(p.K_delta, 12.6738);
  EXPECT_NEAR(p.eps, 24.0 * std::numbers::pi / 180.0, 1e-15);
  EXPECT_DOUBLE_EQ(p.g, 9.81);
  EXPECT_DOUBLE_EQ(p.J_Gr(0, 2), -3.659);
  EXPECT_DOUBLE_EQ(p.J_Gr(2, 0), -3.659);
  EXPECT_FALSE(p.l_m_overridden);
}

TEST(Parameters, TotalMass) {
  EXPECT_NEAR(total_mass(test::nominal()), 303.0, 1e-12);
  ParameterSet p = test::nominal();
  p.m_Gr = p.m_Gf = p.m_Rf = p.m_Rr = 1.0;
  EXPECT_DOUBLE_EQ(total_mass(p), 4.0);
}

TEST(Parameters, RiderMassScaling) {
  const ParameterSet scaled = with_rider_mass_scale(test::nominal(), 1.3);
  EXPECT_NEAR(total_mass(scaled), 303.0 + 0.3 * 257.06, 1e-9);
  EXPECT_NEAR(total_mass(scaled), 380.118, 1e-9);
  EXPECT_EQ(scaled.J_Gr, test::nominal().J_Gr);
  EXPECT_DOUBLE_EQ(scaled.h, test::nominal().h);
  // l_m follows the heavier rear body backwards.
  EXPECT_LT(scaled.l_m, test::nominal().l_m);
}

TEST(Parameters, DerivedComOffsetMatchesHandSum) {
  const ParameterSet& p = test::nominal();
  const double ce = std::cos(p.eps), se = std::sin(p.eps);
  // Upright COM positions along x, measured from V.
  const double x_Gr = 0.0;
  const double x_Gf = (p.a + p.e) * ce - p.f * se;
  const double x_Rf = (p.a + p.c) * ce + p.s * se;
  const double x_Rr = -p.l_r;
  const double expected =
      (p.m_Gr * x_Gr + p.m_Gf * x_Gf + p.m_Rf * x_Rf + p.m_Rr * x_Rr) / 303.0;
  EXPECT_NEAR(p.l_m, expected, 1e-14);
  EXPECT_LT(std::abs(p.l_m), p.l_f);
}

TEST(Parameters, ExplicitComOffsetOverrides) {
  const ParameterSet p = parse_parameters(nominal_text() + "\nl_m: 0.05\n");
  EXPECT_TRUE(p.l_m_overridden);
  EXPECT_DOUBLE_EQ(p.l_m, 0.05);
}

TEST(Parameters, RoundTripIsExact) {
  const ParameterSet& p = test::nominal();
  const ParameterSet q = parse_parameters(serialize_parameters(p));
  EXPECT_TRUE(q == p);

  ParameterSet odd = p;
  odd.l_m = 0.0123456789012345;
  odd.l_m_overridden = true;
  odd.options.lateral_relaxation = LateralRelaxationSpeed::kLateral;
  odd.options.front_arm_caster = true;
  odd.eps = 0.1 + 1e-17;
  EXPECT_TRUE(parse_parameters(serialize_parameters(odd)) == odd);
}

TEST(Parameters, NegativeMassIsNamed) {
  const std::string text = replace_line(nominal_text(), "m_Gf", "m_Gf: -1");
  try {
    parse_parameters(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("m_Gf"), std::string::npos) << e.what();
    EXPECT_EQ(e.exit_code(), 1);
  }
}

TEST(Parameters, EveryViolationIsListed) {
  std::string text = replace_line(nominal_text(), "m_Gf", "m_Gf: -1");
  text = replace_line(text, "R_f", "R_f: 0");
  text = replace_line(text, "J_Gf", "J_Gf: [1, 0, 0.5,  0, 1, 0,  0, 0, 1]");
  try {
    parse_parameters(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("m_Gf"), std::string::npos) << msg;
    EXPECT_NE(msg.find("R_f"), std::string::npos) << msg;
    EXPECT_NE(msg.find("J_Gf"), std::string::npos) << msg;
  }
}

TEST(Parameters, MissingKeyIsNamed) {
  std::string text = nominal_text();
  const auto pos = text.find("\nK_delta:");
  text.erase(pos + 1, text.find('\n', pos + 1) - pos);
  try {
    parse_parameters(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("K_delta"), std::string::npos) << e.what();
  }
}

TEST(Parameters, MissingFileIsConfigError) {
  EXPECT_THROW(load_parameters("/nonexistent/params.yaml"), ConfigError);
  EXPECT_THROW(parse_parameters("[1, 2, 3]"), ConfigError);
  EXPECT_THROW(parse_parameters("l_f: [unterminated"), ConfigError);
}

TEST(Parameters, ComOffsetBeyondFrontContactRejected) {
  ParameterSet p = test::nominal();
  p.l_m = p.l_f;
  p.l_m_overridden = true;
  EXPECT_FALSE(validate(p).empty());
  EXPECT_THROW(static_loads(p), ConfigError);
}

TEST(Parameters, TireShapeLimits) {
  ParameterSet p = test::nominal();
  p.tire_rear.side_slip.C = 3.5;
  p.tire_front.camber.E = 1.5;
  const auto issues = validate(p);
  EXPECT_GE(issues.size(), 2u);
}

TEST(Errors, ExitCodes) {
  EXPECT_EQ(ConfigError("x").exit_code(), 1);
  EXPECT_EQ(TrimError("x").exit_code(), 2);
  EXPECT_EQ(DesignError("x").exit_code(), 3);
  EXPECT_EQ(NumericError("x").exit_code(), 4);
  EXPECT_EQ(DegenerateConfiguration("x").exit_code(), 4);
}
