// Copyright 2026 The spdc-design Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "spdc/config.hpp"

namespace spdc {
namespace {

// Expects a ConfigError whose message names `line` of `origin`.
void expect_config_error(const std::string& text, int line, const std::string& needle = "") {
  try {
    parse_config_text(text, "t.conf");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("t.conf:" + std::to_string(line) + ":"), std::string::npos) << what;
    if (!needle.empty()) EXPECT_NE(what.find(needle), std::string::npos) << what;
  }
}

TEST(Config, EmptyTextGivesDefaultStack) {
  const auto cfg = parse_config_text("");
  EXPECT_DOUBLE_EQ(cfg.pump_nm, 405.0);
  EXPECT_DOUBLE_EQ(cfg.signal_nm, 760.0);
  ASSERT_EQ(cfg.stack.elements.size(), 4u);
  EXPECT_EQ(cfg.stack.elements[0].name, "bbo1");
  EXPECT_EQ(cfg.stack.elements[1].role, Role::waveplate);
  EXPECT_EQ(cfg.stack.elements[3].material, MaterialId::YVO4);
  EXPECT_DOUBLE_EQ(cfg.stack.elements[0].length_mm, 6.0);
  EXPECT_DOUBLE_EQ(cfg.stack.elements[3].length_mm, 3.6);
  EXPECT_NEAR(cfg.stack.elements[0].cut_angle_rad / kDeg, 28.6156201516, 1e-8);
  EXPECT_DOUBLE_EQ(cfg.stack.hwp.quartz_mm, kDefaultHwpQuartzMm);
  EXPECT_EQ(cfg.acceptance.kind, AcceptanceSpec::Kind::aperture);
  EXPECT_TRUE(cfg.aperture_auto);
  EXPECT_FALSE(cfg.compensator_auto);
  EXPECT_EQ(cfg.target, BellTarget::phi_minus);
}

TEST(Config, CanonicalFileParses) {
  const auto cfg = parse_config(SPDC_CONFIG_DIR "/parallel_6mm.conf");
  EXPECT_EQ(cfg.origin, SPDC_CONFIG_DIR "/parallel_6mm.conf");
  EXPECT_DOUBLE_EQ(cfg.stack.elements[3].length_mm, 3.6);
  ASSERT_TRUE(cfg.rates.coincidence_rate);
  EXPECT_DOUBLE_EQ(*cfg.rates.coincidence_rate, 65000.0);
  EXPECT_EQ(cfg.beam.options.z_slices, 101);
}

TEST(Config, AutoCompensatorIsSolvedDuringParsing) {
  const auto cfg = parse_config(SPDC_CONFIG_DIR "/parallel_5mm_auto.conf");
  ASSERT_TRUE(cfg.compensator_auto);
  ASSERT_TRUE(cfg.compensator_solution);
  EXPECT_NEAR(cfg.stack.compensator_length(), 3.12, 0.1);
  EXPECT_DOUBLE_EQ(cfg.stack.compensator_length(), cfg.compensator_solution->length_mm);
}

TEST(Config, SignalMustExceedPump) {
  expect_config_error("[source]\npump_nm = 405\nsignal_nm = 400\n", 3, "must exceed");
}

TEST(Config, UnknownKeyIsRejectedWithLine) {
  expect_config_error("[source]\npump_nm = 405\n\n[stack.bbo1]\ncolour = blue\n", 5, "stack.bbo1.colour");
}

TEST(Config, UnknownMaterialIsRejected) {
  expect_config_error("[stack.yvo]\nmaterial = unobtainium\n", 2, "unobtainium");
}

TEST(Config, BadNumberIsRejected) {
  expect_config_error("[grid]\n\nsamples = many\n", 3);
}

TEST(Config, InvalidEnumValuesAreRejected) {
  expect_config_error("[source]\ntarget = psi_plus\n", 2);
  expect_config_error("[acceptance]\nkind = pinhole\n", 2);
  expect_config_error("[beam]\noverlap = triple\n", 2);
  expect_config_error("[beam]\nz_slices = 4\n", 2, "odd");
}

TEST(Config, MissingFileIsConfigError) {
  EXPECT_THROW(parse_config("/nonexistent/source.conf"), ConfigError);
}

TEST(Config, CustomElementsNeedRoleAndLength) {
  const auto cfg = parse_config_text(
      "[stack]\nelements = a, plate, b, comp\n"
      "[stack.plate]\nrole = waveplate\n"
      "[stack.a]\nrole = downconverter\nlength_mm = 2\n"
      "[stack.b]\nrole = downconverter\nlength_mm = 2\n"
      "[stack.comp]\nrole = compensator\nlength_mm = 1\n");
  ASSERT_EQ(cfg.stack.elements.size(), 4u);
  EXPECT_EQ(cfg.stack.elements[0].material, MaterialId::BBO);
  EXPECT_EQ(cfg.stack.elements[1].role, Role::waveplate);
  EXPECT_EQ(cfg.stack.elements[3].material, MaterialId::YVO4);
  EXPECT_EQ(cfg.stack.elements[3].orientation, AxisOrientation::rotated_90);
  EXPECT_DOUBLE_EQ(cfg.stack.compensator_length(), 1.0);

  expect_config_error("[stack]\nelements = a, bbo2, yvo\n", 2, "needs stack.a.role");
  expect_config_error("[stack]\nelements = a, bbo2, yvo\n[stack.a]\nrole = downconverter\n", 4, "length_mm");
}

TEST(Config, OnlyCompensatorMayBeAuto) {
  expect_config_error("[stack.bbo1]\nlength_mm = auto\n", 2, "only the compensator");
}

TEST(Config, WaveplateOutsideToleranceIsRejected) {
  expect_config_error("[stack.hwp]\nquartz_mm = 1.181\nmgf2_mm = 0.5\n", 3, "half wave");
  expect_config_error("[stack.hwp]\ntolerance_waves = 0.01\n", 2, "half wave");
}

TEST(Config, QuartzAloneSizesMgf2AtDesignWavelength) {
  const auto cfg = parse_config_text("[stack.hwp]\nquartz_mm = 1.181\ndesign_nm = 790\n");
  EXPECT_NEAR(cfg.stack.hwp.retardance_waves(Wavelength(790.0)), 0.5, 1e-12);
  EXPECT_NE(cfg.stack.hwp.mgf2_mm, kDefaultHwpMgf2Mm);
}

}  // namespace
}  // namespace spdc
