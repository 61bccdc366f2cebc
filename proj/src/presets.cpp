#include "nvsr/presets.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "nvsr/units.hpp"

namespace nvsr {

namespace {

using nlohmann::json;

// Shipped reference presets. Quoted source values: kappa = 2pi x 1 GHz
// (GHz-linewidth cavity), cavity-mediated decay Gamma_c = 4g^2/kappa =
// 0.74e9 1/s (read as plain 1/s, not angular), metastable lifetime 172 ns,
// zero-field splittings 2pi x 2.87 / 2pi x 1.42 GHz. The remaining
// lifetimes/branching ratios are implementation-chosen defaults in the
// range of published NV rate measurements, tuned so the two-emitter
// photon-correlation features land at their quoted values; provenance is
// recorded per value under "notes".

const char* kPreset5 = R"JSON({
  "name": "paper-default-5lvl",
  "scheme": "five-level",
  "n_emitters": 2,
  "n_max": 5,
  "resonant_branch": "ms0",
  "cavity": { "kappa": "2pi*1 GHz", "detuning": "0 Hz" },
  "coupling": { "cavity_decay_rate": "0.74 GHz" },
  "lifetimes": {
    "e1": { "lifetime": "13.3 ns", "branching": { "g1": 0.8667, "m": 0.1333 } },
    "e2": { "lifetime": "7.7 ns",  "branching": { "g2": 0.5,    "m": 0.5 } },
    "m":  { "lifetime": "172 ns",  "branching": { "g1": 0.65,   "g2": 0.35 } }
  },
  "dephasing": { "chi_e1g1": "7.5e8 1/s", "chi_e2g2": "7.5e8 1/s" },
  "pump": { "gamma_g1e1": "1e6 Hz", "gamma_g2e2": "1e6 Hz" },
  "notes": {
    "kappa": "quoted: GHz-scale cavity linewidth, stored as 2pi*1 GHz angular",
    "cavity_decay_rate": "quoted: Gamma_c = 4g^2/kappa ~ 0.74 GHz, read as 0.74e9 1/s; g derived",
    "m.lifetime": "quoted: 172 ns metastable lifetime",
    "e1,e2 lifetimes/branching": "implementation defaults within published NV ranges, tuned to the quoted two-emitter g2 features",
    "dephasing": "within the observed zero-phonon-line broadening scale at low temperature; tuned so the two-emitter g2 features land at their quoted values",
    "pump": "weak-pump default, sweep target"
  }
})JSON";

const char* kPreset3 = R"JSON({
  "name": "paper-default-3lvl",
  "scheme": "three-level",
  "n_emitters": 2,
  "n_max": 5,
  "resonant_branch": "ms0",
  "cavity": { "kappa": "2pi*1 GHz", "detuning": "0 Hz" },
  "coupling": { "cavity_decay_rate": "0.74 GHz" },
  "lifetimes": {
    "e1": { "lifetime": "13.3 ns", "branching": { "g1": 0.8667, "m": 0.1333 } },
    "m":  { "lifetime": "172 ns",  "branching": { "g1": 1.0 } }
  },
  "dephasing": { "chi_e1g1": "7.5e8 1/s" },
  "pump": { "gamma_g1e1": "1e6 Hz" },
  "notes": {
    "m.lifetime": "172 ns kept; with g2/e2 dropped the full singlet decay feeds g1"
  }
})JSON";

const char* kPreset2 = R"JSON({
  "name": "paper-default-2lvl",
  "scheme": "two-level",
  "n_emitters": 2,
  "n_max": 5,
  "resonant_branch": "ms0",
  "cavity": { "kappa": "2pi*1 GHz", "detuning": "0 Hz" },
  "coupling": { "cavity_decay_rate": "0.74 GHz" },
  "rates": { "gamma_e1g1": "6.5167e7 1/s" },
  "dephasing": { "chi_e1g1": "7.5e8 1/s" },
  "pump": { "gamma_g1e1": "1e6 Hz" },
  "notes": {
    "gamma_e1g1": "radiative rate of the five-level default (0.8667/13.3ns); singlet shelving has no two-level counterpart"
  }
})JSON";

const std::map<std::string, const char*>& shipped() {
  static const std::map<std::string, const char*> table = {
      {"paper-default-5lvl", kPreset5},
      {"paper-default-3lvl", kPreset3},
      {"paper-default-2lvl", kPreset2},
  };
  return table;
}

double quantity(const json& j, const std::string& context) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_quantity(j.get<std::string>());
  throw ConfigError("preset value " + context + " must be a number or a unit string");
}

Level level_from_name(const std::string& name) {
  if (name == "g1") return Level::G1;
  if (name == "g2") return Level::G2;
  if (name == "e1") return Level::E1;
  if (name == "e2") return Level::E2;
  if (name == "m") return Level::M;
  throw ConfigError("unknown level name '" + name + "' in preset");
}

}  // namespace

ModelSpec parse_preset_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("preset JSON parse error: ") + e.what());
  }

  ModelSpec spec;
  spec.scheme = scheme_from_name(j.at("scheme").get<std::string>());
  if (j.contains("n_emitters")) spec.n_emitters = j["n_emitters"].get<int>();
  if (j.contains("n_max")) spec.n_max = j["n_max"].get<int>();
  if (j.contains("resonant_branch")) {
    const std::string b = j["resonant_branch"].get<std::string>();
    if (b == "ms0") spec.resonant_branch = ResonantBranch::ms0;
    else if (b == "ms1") spec.resonant_branch = ResonantBranch::ms1;
    else throw ConfigError("resonant_branch must be ms0 or ms1");
  }

  const auto& cavity = j.at("cavity");
  spec.kappa = quantity(cavity.at("kappa"), "cavity.kappa");
  if (cavity.contains("detuning"))
    spec.omega_c = quantity(cavity["detuning"], "cavity.detuning");

  const auto& coupling = j.at("coupling");
  if (coupling.contains("g")) {
    spec.g = quantity(coupling["g"], "coupling.g");
  } else if (coupling.contains("cavity_decay_rate")) {
    const double gamma_c =
        quantity(coupling["cavity_decay_rate"], "coupling.cavity_decay_rate");
    spec.g = std::sqrt(gamma_c * spec.kappa) / 2.0;
  } else {
    throw ConfigError("preset coupling needs 'g' or 'cavity_decay_rate'");
  }

  if (j.contains("lifetimes")) {
    RatePreset rates;
    for (const auto& [level_name_str, body] : j["lifetimes"].items()) {
      RatePreset::Source source;
      source.from = level_from_name(level_name_str);
      source.lifetime = quantity(body.at("lifetime"),
                                 "lifetimes." + level_name_str + ".lifetime");
      for (const auto& [to_name, ratio] : body.at("branching").items())
        source.channels.push_back({level_from_name(to_name), ratio.get<double>()});
      rates.sources.push_back(std::move(source));
    }
    spec = rates_from_preset(rates, spec);
  } else {
    // No lifetime block: still apply the zero-field-splitting detunings.
    spec = rates_from_preset(RatePreset{}, spec);
  }

  if (j.contains("rates"))
    for (const auto& [field, value] : j["rates"].items())
      spec.set(field, quantity(value, "rates." + field));
  if (j.contains("dephasing"))
    for (const auto& [field, value] : j["dephasing"].items())
      spec.set(field, quantity(value, "dephasing." + field));
  if (j.contains("pump"))
    for (const auto& [field, value] : j["pump"].items())
      spec.set(field, quantity(value, "pump." + field));

  return validate(spec);
}

ModelSpec load_preset(const std::string& name_or_path) {
  const auto it = shipped().find(name_or_path);
  if (it != shipped().end()) return parse_preset_json(it->second);

  std::ifstream in(name_or_path);
  if (!in)
    throw ConfigError("unknown preset '" + name_or_path +
                      "' (not shipped, not a readable file)");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_preset_json(text.str());
}

std::vector<std::string> shipped_preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : shipped()) names.push_back(name);
  return names;
}

std::string shipped_preset_text(const std::string& name) {
  const auto it = shipped().find(name);
  if (it == shipped().end())
    throw ConfigError("unknown shipped preset '" + name + "'");
  return it->second;
}

}  // namespace nvsr
