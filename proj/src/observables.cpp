#include "nvsr/observables.hpp"

#include <algorithm>
#include <cmath>

namespace nvsr {

double radiation_rate(double kappa, double mean_photon_number) {
  return kappa * mean_photon_number;
}

double radiation_rate(const ModelSpec& spec, const DensityState& state) {
  const Operator a = lifted_annihilation(spec);
  return spec.kappa * state.expect(a.adjoint() * a).real();
}

std::vector<double> log_tau_grid(double from, double to, int points) {
  if (from <= 0.0 || to <= from || points < 2)
    throw ValidationError("log_tau_grid: need 0 < from < to and >= 2 points");
  std::vector<double> taus(static_cast<size_t>(points));
  const double step = std::log(to / from) / (points - 1);
  for (int i = 0; i < points; ++i) taus[static_cast<size_t>(i)] = from * std::exp(step * i);
  return taus;
}

G2Curve g2(const Liouvillian& l, const DensityState& rho_ss,
           std::span<const double> taus, const EvolveOptions& options) {
  const Operator a = lifted_annihilation(l.spec);
  const Operator n_op = a.adjoint() * a;
  const double n_ss = rho_ss.expect(n_op).real();
  if (n_ss < 1e-14)
    throw NumericalError("g2: steady photon number below 1e-14, "
                         "normalization undefined");

  const MatC seed = a.matrix() * rho_ss.matrix() * MatC(a.adjoint().matrix());
  const auto numerator = regression_correlator_seeded(l, seed, n_op, taus, options);

  G2Curve curve;
  curve.taus.assign(taus.begin(), taus.end());
  curve.values.resize(taus.size());
  for (size_t k = 0; k < taus.size(); ++k) {
    curve.values[k] = numerator[k].real() / (n_ss * n_ss);
    curve.max_imag_residue = std::max(
        curve.max_imag_residue, std::abs(numerator[k].imag()) / (n_ss * n_ss));
  }
  return curve;
}

G2Curve g2_dicke(const DickeLiouvillian& l, const VecC& steady,
                 std::span<const double> taus, const EvolveOptions& options) {
  const double n_ss = dicke_photon_number(l.space, steady);
  if (n_ss < 1e-14)
    throw NumericalError("g2: steady photon number below 1e-14, "
                         "normalization undefined");
  const VecC seed = dicke_g2_seed(l.space, steady);
  G2Curve curve;
  curve.taus.assign(taus.begin(), taus.end());
  curve.values.resize(taus.size());
  propagate(l.matrix, seed, taus,
            [&](size_t k, double, const VecC& x) {
              const Complex v = dicke_number_expectation(l.space, x);
              curve.values[k] = v.real() / (n_ss * n_ss);
              curve.max_imag_residue =
                  std::max(curve.max_imag_residue, std::abs(v.imag()) / (n_ss * n_ss));
            },
            options);
  return curve;
}

namespace {

// exponential-model time constants are only meaningful when the fitted
// amplitude is visibly nonzero
bool amplitude_significant(double amplitude, double scale) {
  return std::abs(amplitude) > 1e-4 * std::max(scale, 1e-12);
}

}  // namespace

G2Features extract_g2_features(const G2Curve& curve, const FeatureWindows& windows) {
  const size_t n = curve.taus.size();
  if (n < 200)
    throw ValidationError("extract_g2_features: need >= 200 samples spanning "
                          "sub-ns to microseconds");

  G2Features features;
  const auto& taus = curve.taus;
  const auto& v = curve.values;

  // antibunching dip: minimum inside (0, dip_max]
  size_t dip = 0;
  for (size_t k = 1; k < n && taus[k] <= windows.dip_max; ++k)
    if (v[k] < v[dip] || dip == 0) dip = k;
  features.g1 = v[dip];

  // zero-delay peak: maximum before the dip
  size_t peak0 = 0;
  for (size_t k = 0; k <= dip; ++k)
    if (v[k] > v[peak0]) peak0 = k;
  features.g0 = v[peak0];

  // shoulder: maximum after the dip within [shoulder_min, shoulder_max]
  size_t shoulder = dip;
  for (size_t k = dip + 1; k < n; ++k) {
    if (taus[k] < windows.shoulder_min || taus[k] > windows.shoulder_max) continue;
    if (shoulder == dip || v[k] > v[shoulder]) shoulder = k;
  }
  const double asymptote = v.back();
  features.g2 = (shoulder > dip) ? v[shoulder] : asymptote;
  features.shoulder_present = shoulder > dip && shoulder + 1 < n &&
                              features.g2 > asymptote + 2e-3 &&
                              features.g2 > v[dip] + 2e-3;

  // tau0 from a Gaussian fit to the zero-delay peak
  if (dip >= 4 && features.g0 > features.g1 + 1e-6) {
    std::span<const double> xs(taus.data(), dip + 1);
    std::span<const double> ys(v.data(), dip + 1);
    const FitResult fit = fit_gaussian_peak(xs, ys, features.g0 - features.g1,
                                            0.5 * taus[dip], features.g1);
    features.tau0_fit = {true, fit.converged, fit.rss, "gaussian"};
    const double tau0 = std::abs(fit.params(1));
    if (fit.converged && amplitude_significant(fit.params(0), features.g0))
      features.tau0 = tau0;
  }

  if (features.shoulder_present) {
    // shoulder rise between the dip and the shoulder maximum
    if (shoulder > dip + 3) {
      std::span<const double> xs(taus.data() + dip, shoulder - dip + 1);
      std::span<const double> ys(v.data() + dip, shoulder - dip + 1);
      const FitResult fit =
          fit_exponential(xs, ys, taus[dip], -(features.g2 - features.g1),
                          (taus[shoulder] - taus[dip]) / 3.0, features.g2);
      features.tau1_fit = {true, fit.converged, fit.rss, "exponential-rise"};
      if (fit.converged && amplitude_significant(fit.params(0), features.g2) &&
          fit.params(1) > 0.0)
        features.tau1 = fit.params(1);
    }
    // shoulder decay toward one
    if (n - shoulder > 4) {
      std::span<const double> xs(taus.data() + shoulder, n - shoulder);
      std::span<const double> ys(v.data() + shoulder, n - shoulder);
      const FitResult fit =
          fit_exponential(xs, ys, taus[shoulder], features.g2 - 1.0,
                          (taus.back() - taus[shoulder]) / 5.0, 1.0);
      features.tau2_fit = {true, fit.converged, fit.rss, "exponential-decay"};
      if (fit.converged && amplitude_significant(fit.params(0), features.g2) &&
          fit.params(1) > 0.0)
        features.tau2 = fit.params(1);
    }
  }
  return features;
}

Spectrum spectrum(const Liouvillian& l, const DensityState& rho_ss,
                  std::span<const double> taus, std::span<const double> omegas,
                  const EvolveOptions& options) {
  if (taus.size() < 4) throw ValidationError("spectrum: tau grid too short");
  const double dt = taus[1] - taus[0];
  for (size_t k = 1; k < taus.size(); ++k)
    if (std::abs((taus[k] - taus[k - 1]) - dt) > 1e-9 * dt)
      throw ValidationError("spectrum: tau grid must be uniform");

  const Operator a = lifted_annihilation(l.spec);
  // <adag(t+tau) a(t)>: evolve a rho_ss, trace against adag
  const MatC seed = a.matrix() * rho_ss.matrix();
  const auto correlator =
      regression_correlator_seeded(l, seed, a.adjoint(), taus, options);

  Spectrum out;
  out.taus.assign(taus.begin(), taus.end());
  out.omegas.assign(omegas.begin(), omegas.end());
  out.correlator = correlator;
  out.window_warning =
      std::abs(correlator.back()) >
      1e-4 * std::max(1e-300, std::abs(correlator.front()));

  out.samples.resize(omegas.size());
  for (size_t j = 0; j < omegas.size(); ++j) {
    Complex acc = 0.0;
    for (size_t k = 0; k < taus.size(); ++k) {
      const double w = (k == 0 || k + 1 == taus.size()) ? 0.5 : 1.0;
      acc += w * std::exp(Complex(0.0, -omegas[j] * taus[k])) * correlator[k];
    }
    out.samples[j] = 2.0 * l.spec.kappa * (acc * dt).real();
  }
  return out;
}

std::vector<SpectrumPeak> fit_spectrum_peaks(Spectrum& spectrum) {
  const auto& w = spectrum.omegas;
  const auto& s = spectrum.samples;
  if (w.size() < 8) throw ValidationError("fit_spectrum_peaks: grid too short");

  const double s_max = *std::max_element(s.begin(), s.end());
  if (s_max <= 0.0) {
    spectrum.peaks.clear();
    return {};
  }

  // local maxima above 5% of the global maximum seed the fit
  std::vector<LorentzianPeak> seeds;
  for (size_t k = 1; k + 1 < s.size(); ++k) {
    if (s[k] >= s[k - 1] && s[k] > s[k + 1] && s[k] > 0.05 * s_max) {
      // estimate the half width by walking down to half height
      size_t lo = k, hi = k;
      while (lo > 0 && s[lo] > 0.5 * s[k]) --lo;
      while (hi + 1 < s.size() && s[hi] > 0.5 * s[k]) ++hi;
      LorentzianPeak p;
      p.amplitude = s[k];
      p.center = w[k];
      p.width = std::max(0.5 * (w[hi] - w[lo]), w[1] - w[0]);
      seeds.push_back(p);
      if (seeds.size() >= 4) break;
    }
  }
  if (seeds.empty()) {
    // monotone edge case: seed a single peak at the maximum sample
    const size_t k = static_cast<size_t>(
        std::max_element(s.begin(), s.end()) - s.begin());
    seeds.push_back({w[k], (w.back() - w.front()) / 8.0, s[k]});
  }

  const FitResult fit = fit_lorentzians(w, s, seeds);
  std::vector<SpectrumPeak> peaks;
  for (size_t j = 0; j < seeds.size(); ++j) {
    SpectrumPeak p;
    p.amplitude = fit.params(3 * static_cast<long>(j));
    p.center = fit.params(3 * static_cast<long>(j) + 1);
    p.width = std::abs(fit.params(3 * static_cast<long>(j) + 2));
    peaks.push_back(p);
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const SpectrumPeak& a, const SpectrumPeak& b) {
              return a.center < b.center;
            });

  const double residual_scale = std::sqrt(fit.rss / static_cast<double>(w.size()));
  spectrum.low_confidence = residual_scale > 0.2 * s_max;
  spectrum.peaks = peaks;
  return peaks;
}

}  // namespace nvsr
