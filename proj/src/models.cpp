#include "nvsr/models.hpp"

#include <cmath>

namespace nvsr {

int level_count(LevelScheme scheme) {
  switch (scheme) {
    case LevelScheme::FiveLevel: return 5;
    case LevelScheme::ThreeLevel: return 3;
    case LevelScheme::TwoLevel: return 2;
  }
  throw ValidationError("unknown scheme");
}

bool level_present(LevelScheme scheme, Level level) {
  switch (scheme) {
    case LevelScheme::FiveLevel:
      return true;
    case LevelScheme::ThreeLevel:
      return level == Level::G1 || level == Level::E1 || level == Level::M;
    case LevelScheme::TwoLevel:
      return level == Level::G1 || level == Level::E1;
  }
  return false;
}

int level_index(LevelScheme scheme, Level level) {
  if (!level_present(scheme, level))
    throw DimensionError("level " + level_name(level) + " absent from scheme " +
                         scheme_name(scheme));
  switch (scheme) {
    case LevelScheme::FiveLevel:
      switch (level) {
        case Level::G1: return 0;
        case Level::G2: return 1;
        case Level::E1: return 2;
        case Level::E2: return 3;
        case Level::M: return 4;
      }
      break;
    case LevelScheme::ThreeLevel:
      switch (level) {
        case Level::G1: return 0;
        case Level::E1: return 1;
        case Level::M: return 2;
        default: break;
      }
      break;
    case LevelScheme::TwoLevel:
      switch (level) {
        case Level::G1: return 0;
        case Level::E1: return 1;
        default: break;
      }
      break;
  }
  throw DimensionError("level index lookup failed");
}

std::string level_name(Level level) {
  switch (level) {
    case Level::G1: return "g1";
    case Level::G2: return "g2";
    case Level::E1: return "e1";
    case Level::E2: return "e2";
    case Level::M: return "m";
  }
  return "?";
}

std::string scheme_name(LevelScheme scheme) {
  switch (scheme) {
    case LevelScheme::FiveLevel: return "five-level";
    case LevelScheme::ThreeLevel: return "three-level";
    case LevelScheme::TwoLevel: return "two-level";
  }
  return "?";
}

LevelScheme scheme_from_name(const std::string& name) {
  if (name == "five-level" || name == "5lvl") return LevelScheme::FiveLevel;
  if (name == "three-level" || name == "3lvl") return LevelScheme::ThreeLevel;
  if (name == "two-level" || name == "2lvl") return LevelScheme::TwoLevel;
  throw ConfigError("unknown level scheme '" + name + "'");
}

namespace {

struct FieldRef {
  const char* name;
  double ModelSpec::*member;
};

constexpr FieldRef kFields[] = {
    {"omega_c", &ModelSpec::omega_c},
    {"omega_e1g1", &ModelSpec::omega_e1g1},
    {"omega_e2g2", &ModelSpec::omega_e2g2},
    {"g", &ModelSpec::g},
    {"kappa", &ModelSpec::kappa},
    {"gamma_e1g1", &ModelSpec::gamma_e1g1},
    {"gamma_e2g2", &ModelSpec::gamma_e2g2},
    {"gamma_g1e1", &ModelSpec::gamma_g1e1},
    {"gamma_g2e2", &ModelSpec::gamma_g2e2},
    {"chi_e1g1", &ModelSpec::chi_e1g1},
    {"chi_e2g2", &ModelSpec::chi_e2g2},
    {"gamma_e1m", &ModelSpec::gamma_e1m},
    {"gamma_e2m", &ModelSpec::gamma_e2m},
    {"gamma_mg1", &ModelSpec::gamma_mg1},
    {"gamma_mg2", &ModelSpec::gamma_mg2},
};

}  // namespace

double ModelSpec::get(const std::string& field) const {
  for (const auto& f : kFields)
    if (field == f.name) return this->*(f.member);
  if (field == "gamma_ge") return gamma_g1e1;  // common sweep alias
  throw ConfigError("unknown ModelSpec field '" + field + "'");
}

void ModelSpec::set(const std::string& field, double value) {
  // gamma_ge sets both pump rates, mirroring the usual sweep convention.
  if (field == "gamma_ge") {
    gamma_g1e1 = value;
    if (scheme == LevelScheme::FiveLevel) gamma_g2e2 = value;
    return;
  }
  for (const auto& f : kFields) {
    if (field == f.name) {
      this->*(f.member) = value;
      return;
    }
  }
  throw ConfigError("unknown ModelSpec field '" + field + "'");
}

std::vector<std::string> ModelSpec::field_names() {
  std::vector<std::string> names;
  for (const auto& f : kFields) names.emplace_back(f.name);
  return names;
}

ModelSpec validate(ModelSpec spec) {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
  };

  require(spec.n_emitters >= 1, "n_emitters must be >= 1");
  require(spec.n_max >= 1, "n_max must be >= 1");
  // g = 0 is the meaningful decoupled limit exercised by tests.
  require(spec.g >= 0.0, "g must be >= 0");
  require(spec.kappa > 0.0, "kappa must be > 0");

  const FieldRef rate_fields[] = {
      {"gamma_e1g1", &ModelSpec::gamma_e1g1}, {"gamma_e2g2", &ModelSpec::gamma_e2g2},
      {"gamma_g1e1", &ModelSpec::gamma_g1e1}, {"gamma_g2e2", &ModelSpec::gamma_g2e2},
      {"chi_e1g1", &ModelSpec::chi_e1g1},     {"chi_e2g2", &ModelSpec::chi_e2g2},
      {"gamma_e1m", &ModelSpec::gamma_e1m},   {"gamma_e2m", &ModelSpec::gamma_e2m},
      {"gamma_mg1", &ModelSpec::gamma_mg1},   {"gamma_mg2", &ModelSpec::gamma_mg2},
  };
  for (const auto& f : rate_fields)
    require(spec.*(f.member) >= 0.0, std::string(f.name) + " must be >= 0");

  // Channels of absent levels must be zero rather than silently dropped.
  auto forbid = [&](double ModelSpec::*member, const char* name) {
    if (spec.*member != 0.0)
      throw ValidationError(std::string(name) + " must be 0 for scheme " +
                            scheme_name(spec.scheme));
  };
  if (spec.scheme != LevelScheme::FiveLevel) {
    forbid(&ModelSpec::gamma_e2g2, "gamma_e2g2");
    forbid(&ModelSpec::gamma_g2e2, "gamma_g2e2");
    forbid(&ModelSpec::chi_e2g2, "chi_e2g2");
    forbid(&ModelSpec::gamma_e2m, "gamma_e2m");
    forbid(&ModelSpec::gamma_mg2, "gamma_mg2");
  }
  if (spec.scheme == LevelScheme::TwoLevel) {
    forbid(&ModelSpec::gamma_e1m, "gamma_e1m");
    forbid(&ModelSpec::gamma_mg1, "gamma_mg1");
  }

  if (!spec.detuning_overrides.empty() &&
      static_cast<int>(spec.detuning_overrides.size()) != spec.n_emitters)
    throw ValidationError("detuning_overrides must have one entry per emitter");

  return spec;
}

ModelSpec rates_from_preset(const RatePreset& preset, ModelSpec base) {
  for (const auto& source : preset.sources) {
    if (source.lifetime <= 0.0)
      throw ValidationError("lifetime of level " + level_name(source.from) +
                            " must be > 0");
    double ratio_sum = 0.0;
    for (const auto& channel : source.channels) ratio_sum += channel.branching;
    if (std::abs(ratio_sum - 1.0) > 1e-12)
      throw ValidationError("branching ratios of level " +
                            level_name(source.from) + " sum to " +
                            std::to_string(ratio_sum) + ", expected 1");
    for (const auto& channel : source.channels) {
      const double rate = channel.branching / source.lifetime;
      if (source.from == Level::E1 && channel.to == Level::G1)
        base.gamma_e1g1 = rate;
      else if (source.from == Level::E1 && channel.to == Level::M)
        base.gamma_e1m = rate;
      else if (source.from == Level::E2 && channel.to == Level::G2)
        base.gamma_e2g2 = rate;
      else if (source.from == Level::E2 && channel.to == Level::M)
        base.gamma_e2m = rate;
      else if (source.from == Level::M && channel.to == Level::G1)
        base.gamma_mg1 = rate;
      else if (source.from == Level::M && channel.to == Level::G2)
        base.gamma_mg2 = rate;
      else
        throw ValidationError("unsupported decay channel " +
                              level_name(source.from) + " -> " +
                              level_name(channel.to));
    }
  }

  // Optical detunings from the zero-field splittings: the e2<->g2 transition
  // sits D_es - D_gs below e1<->g1.
  const double branch_gap = kZeroFieldSplittingEs - kZeroFieldSplittingGs;
  if (base.resonant_branch == ResonantBranch::ms0) {
    base.omega_e1g1 = 0.0;
    base.omega_e2g2 = branch_gap;
  } else {
    base.omega_e2g2 = 0.0;
    base.omega_e1g1 = -branch_gap;
  }
  return base;
}

}  // namespace nvsr
