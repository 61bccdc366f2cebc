#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nvsr/dicke.hpp"
#include "nvsr/fit.hpp"
#include "nvsr/liouville.hpp"
#include "nvsr/solvers.hpp"

namespace nvsr {

/// I_rad = kappa <adag a>.
double radiation_rate(double kappa, double mean_photon_number);
double radiation_rate(const ModelSpec& spec, const DensityState& state);

/// Normalized second-order photon auto-correlation on a tau grid.
/// Normalization is <adag a>^2 (the dimensionally consistent reading of the
/// source formula's [I_rad]^2).
struct G2Curve {
  std::vector<double> taus;
  std::vector<double> values;
  double max_imag_residue = 0.0;
};

/// Geometric tau grid for feature extraction (features span five decades).
std::vector<double> log_tau_grid(double from = 1e-11, double to = 2e-6,
                                 int points = 240);

G2Curve g2(const Liouvillian& l, const DensityState& rho_ss,
           std::span<const double> taus, const EvolveOptions& options = {});

G2Curve g2_dicke(const DickeLiouvillian& l, const VecC& steady,
                 std::span<const double> taus, const EvolveOptions& options = {});

struct FitDiagnostics {
  bool attempted = false;
  bool converged = false;
  double rss = 0.0;
  std::string model;
};

/// Characteristic g2 features: zero-delay peak g0, antibunching dip g1,
/// late-time shoulder g2 with the associated times (Gaussian fit for tau0,
/// exponential fits for the shoulder rise tau1 and decay tau2). Missing
/// features are reported absent, never fabricated.
struct G2Features {
  double g0 = 1.0;
  double g1 = 1.0;
  double g2 = 1.0;
  bool shoulder_present = false;
  std::optional<double> tau0, tau1, tau2;
  FitDiagnostics tau0_fit, tau1_fit, tau2_fit;
};

struct FeatureWindows {
  double dip_max = 5e-9;       // dip search (0, dip_max]
  double shoulder_min = 5e-9;  // shoulder search [shoulder_min, shoulder_max]
  double shoulder_max = 2e-6;
};

G2Features extract_g2_features(const G2Curve& curve,
                               const FeatureWindows& windows = {});

struct SpectrumPeak {
  double center = 0.0;
  double width = 0.0;
  double amplitude = 0.0;
};

struct Spectrum {
  std::vector<double> omegas;   // rad/s relative to the rotating frame
  std::vector<double> samples;  // S(omega) = 2 kappa Re FT of <adag(tau) a>
  std::vector<Complex> correlator;
  std::vector<double> taus;
  std::vector<SpectrumPeak> peaks;
  bool low_confidence = false;
  bool window_warning = false;
};

/// Steady-state emission spectrum of the exact backend via the quantum
/// regression theorem; taus must be uniform.
Spectrum spectrum(const Liouvillian& l, const DensityState& rho_ss,
                  std::span<const double> taus, std::span<const double> omegas,
                  const EvolveOptions& options = {});

/// Lorentzian multi-peak least-squares on a computed spectrum; fills
/// spectrum.peaks (centers ascending) and the low-confidence flag.
std::vector<SpectrumPeak> fit_spectrum_peaks(Spectrum& spectrum);

}  // namespace nvsr
