#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nvsr/models.hpp"
#include "nvsr/presets.hpp"
#include "nvsr/types.hpp"
#include "nvsr/units.hpp"

using namespace nvsr;

TEST_CASE("quantity parsing") {
  CHECK(parse_quantity("0.74 GHz") == doctest::Approx(7.4e8));
  CHECK(parse_quantity("2pi*1 GHz") == doctest::Approx(kTwoPi * 1e9));
  CHECK(parse_quantity("2pi*2.87 GHz") == doctest::Approx(kTwoPi * 2.87e9));
  CHECK(parse_quantity("172 ns") == doctest::Approx(1.72e-7));
  CHECK(parse_quantity("75 MHz") == doctest::Approx(7.5e7));
  CHECK(parse_quantity("1.0781e9 rad/s") == doctest::Approx(1.0781e9));
  CHECK(parse_quantity("5e6 1/s") == doctest::Approx(5e6));
  CHECK(parse_quantity("42") == doctest::Approx(42.0));
  CHECK_THROWS_AS(parse_quantity("12 parsec"), ConfigError);
  CHECK_THROWS_AS(parse_quantity(""), ConfigError);
}

TEST_CASE("level bookkeeping per scheme") {
  CHECK(level_count(LevelScheme::FiveLevel) == 5);
  CHECK(level_count(LevelScheme::ThreeLevel) == 3);
  CHECK(level_count(LevelScheme::TwoLevel) == 2);
  CHECK(level_index(LevelScheme::FiveLevel, Level::M) == 4);
  CHECK(level_index(LevelScheme::ThreeLevel, Level::M) == 2);
  CHECK_THROWS_AS(level_index(LevelScheme::TwoLevel, Level::M), DimensionError);
  CHECK_THROWS_AS(level_index(LevelScheme::ThreeLevel, Level::G2), DimensionError);
}

TEST_CASE("validate rejects scheme-inconsistent rates") {
  ModelSpec spec;
  spec.scheme = LevelScheme::TwoLevel;
  spec.g = 1e9;
  spec.kappa = 1e9;
  spec.gamma_e1g1 = 1e7;
  spec.gamma_e1m = 1e6;  // singlet channel on a two-level model
  CHECK_THROWS_WITH_AS(validate(spec), doctest::Contains("gamma_e1m"),
                       ValidationError);

  spec.gamma_e1m = 0.0;
  spec.kappa = -1.0;
  CHECK_THROWS_WITH_AS(validate(spec), doctest::Contains("kappa"), ValidationError);

  spec.kappa = 1e9;
  spec.gamma_g1e1 = -2.0;
  CHECK_THROWS_WITH_AS(validate(spec), doctest::Contains("gamma_g1e1"),
                       ValidationError);
}

TEST_CASE("valid five-level spec round-trips unchanged") {
  ModelSpec spec = load_preset("paper-default-5lvl");
  ModelSpec validated = validate(spec);
  CHECK(validated.gamma_e1g1 == spec.gamma_e1g1);
  CHECK(validated.omega_e2g2 == spec.omega_e2g2);
  CHECK(validated.n_max == spec.n_max);
}

TEST_CASE("rates_from_preset divides branching by lifetime") {
  ModelSpec base;
  base.scheme = LevelScheme::FiveLevel;
  base.g = 1e9;
  base.kappa = kTwoPi * 1e9;

  RatePreset preset;
  preset.sources.push_back(
      {Level::M, 172e-9, {{Level::G1, 0.65}, {Level::G2, 0.35}}});
  const ModelSpec spec = rates_from_preset(preset, base);
  CHECK(spec.gamma_mg1 + spec.gamma_mg2 == doctest::Approx(1.0 / 172e-9));
  CHECK(spec.gamma_mg1 == doctest::Approx(0.65 / 172e-9));

  // single channel, ratio 1, lifetime tau -> rate 1/tau
  RatePreset single;
  single.sources.push_back({Level::E1, 13e-9, {{Level::G1, 1.0}}});
  CHECK(rates_from_preset(single, base).gamma_e1g1 == doctest::Approx(1.0 / 13e-9));

  // ratios not summing to one name the offending level
  RatePreset bad;
  bad.sources.push_back({Level::E1, 13e-9, {{Level::G1, 0.7}, {Level::M, 0.2}}});
  CHECK_THROWS_WITH_AS(rates_from_preset(bad, base), doctest::Contains("e1"),
                       ValidationError);
}

TEST_CASE("rates_from_preset applies zero-field-splitting detunings") {
  ModelSpec base;
  base.scheme = LevelScheme::FiveLevel;
  base.g = 1e9;
  base.kappa = kTwoPi * 1e9;
  base.resonant_branch = ResonantBranch::ms0;
  RatePreset preset;
  const ModelSpec spec = rates_from_preset(preset, base);
  CHECK(spec.omega_e1g1 == 0.0);
  CHECK(spec.omega_e2g2 ==
        doctest::Approx(kZeroFieldSplittingEs - kZeroFieldSplittingGs));

  base.resonant_branch = ResonantBranch::ms1;
  const ModelSpec spec1 = rates_from_preset(preset, base);
  CHECK(spec1.omega_e2g2 == 0.0);
  CHECK(spec1.omega_e1g1 ==
        doctest::Approx(kZeroFieldSplittingGs - kZeroFieldSplittingEs));
}

TEST_CASE("paper-default preset pins the cavity-mediated decay rate") {
  const ModelSpec spec = load_preset("paper-default-5lvl");
  // Gamma_c = 4 g^2 / kappa = 0.74e9 1/s with kappa = 2pi x 1 GHz.
  CHECK(spec.kappa == doctest::Approx(kTwoPi * 1e9));
  CHECK(spec.cavity_decay_rate() == doctest::Approx(0.74e9).epsilon(1e-9));
  // metastable lifetime 172 ns
  CHECK(1.0 / (spec.gamma_mg1 + spec.gamma_mg2) == doctest::Approx(172e-9));
  CHECK(validate(spec).scheme == LevelScheme::FiveLevel);
}

TEST_CASE("shipped presets validate for all schemes") {
  for (const auto& name : shipped_preset_names()) {
    const ModelSpec spec = load_preset(name);
    CHECK_NOTHROW(validate(spec));
  }
  CHECK(load_preset("paper-default-2lvl").scheme == LevelScheme::TwoLevel);
  CHECK(load_preset("paper-default-3lvl").scheme == LevelScheme::ThreeLevel);
  CHECK_THROWS_AS(load_preset("no-such-preset"), ConfigError);
}

TEST_CASE("field access for sweeps") {
  ModelSpec spec = load_preset("paper-default-5lvl");
  spec.set("gamma_ge", 7.5e7);
  CHECK(spec.gamma_g1e1 == 7.5e7);
  CHECK(spec.gamma_g2e2 == 7.5e7);
  spec.set("chi_e1g1", 1e6);
  CHECK(spec.get("chi_e1g1") == 1e6);
  CHECK_THROWS_AS(spec.set("no_such_field", 1.0), ConfigError);
}
