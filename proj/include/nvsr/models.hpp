#pragma once

#include <map>
#include <string>
#include <vector>

#include "nvsr/error.hpp"

namespace nvsr {

enum class LevelScheme { FiveLevel, ThreeLevel, TwoLevel };
enum class ResonantBranch { ms0, ms1 };

/// Symbolic level names of the emitter models. G1/E1 carry the m_s = 0
/// optical transition, G2/E2 the m_s = +-1 one, M the grouped singlets.
enum class Level { G1, G2, E1, E2, M };

int level_count(LevelScheme scheme);
/// Basis index of a level within the given scheme; throws DimensionError
/// if the level does not exist in the scheme.
int level_index(LevelScheme scheme, Level level);
bool level_present(LevelScheme scheme, Level level);
std::string level_name(Level level);
std::string scheme_name(LevelScheme scheme);
LevelScheme scheme_from_name(const std::string& name);

/// Full parameter set of the emitter-cavity model. All frequencies are
/// angular (rad/s) and measured in the frame rotating at the bare cavity
/// frequency; all rates are plain 1/s.
struct ModelSpec {
  LevelScheme scheme = LevelScheme::FiveLevel;
  int n_emitters = 1;

  double omega_c = 0.0;     // cavity offset in the rotating frame
  double omega_e1g1 = 0.0;  // m_s=0 optical transition detuning
  double omega_e2g2 = 0.0;  // m_s=+-1 optical transition detuning

  double g = 0.0;      // emitter-cavity coupling (rad/s)
  double kappa = 0.0;  // photon damping (1/s)

  double gamma_e1g1 = 0.0, gamma_e2g2 = 0.0;  // spontaneous emission
  double gamma_g1e1 = 0.0, gamma_g2e2 = 0.0;  // incoherent pumping
  double chi_e1g1 = 0.0, chi_e2g2 = 0.0;      // dephasing

  double gamma_e1m = 0.0, gamma_e2m = 0.0;  // triplet -> singlet crossings
  double gamma_mg1 = 0.0, gamma_mg2 = 0.0;  // singlet -> triplet decays

  int n_max = 5;  // photon truncation
  ResonantBranch resonant_branch = ResonantBranch::ms0;

  /// Optional per-emitter extra detuning of the resonant transition
  /// (exact backend only). Empty means all emitters identical.
  std::vector<double> detuning_overrides;

  int levels() const { return level_count(scheme); }
  double cavity_decay_rate() const { return 4.0 * g * g / kappa; }  // Gamma_c

  /// Named read/write access for sweeps and CLI overrides.
  double get(const std::string& field) const;
  void set(const std::string& field, double value);
  static std::vector<std::string> field_names();
};

/// Enforces every ModelSpec invariant (non-negative rates, g/kappa > 0,
/// N >= 1, scheme-dependent zeroing of absent channels) and returns the
/// frozen spec. Violations raise ValidationError naming the field.
ModelSpec validate(ModelSpec spec);

/// Lifetime/branching-ratio description of the emitter decay channels.
struct RatePreset {
  struct Channel {
    Level to;
    double branching = 0.0;
  };
  struct Source {
    Level from;
    double lifetime = 0.0;  // seconds
    std::vector<Channel> channels;
  };
  std::vector<Source> sources;
};

/// Converts lifetimes and branching ratios into the gamma_* rate fields of
/// `base` (rate = branching / lifetime) and applies the zero-field-splitting
/// default detunings D_gs = 2pi*2.87 GHz, D_es = 2pi*1.42 GHz according to
/// base.resonant_branch. Ratios of a source must sum to 1 within 1e-12.
ModelSpec rates_from_preset(const RatePreset& preset, ModelSpec base);

inline constexpr double kZeroFieldSplittingGs = 6.283185307179586 * 2.87e9;
inline constexpr double kZeroFieldSplittingEs = 6.283185307179586 * 1.42e9;

}  // namespace nvsr
