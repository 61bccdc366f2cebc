#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nvsr/cumulant.hpp"
#include "nvsr/observables.hpp"
#include "nvsr/presets.hpp"

using namespace nvsr;

namespace {

ModelSpec two_level(int n, double pump) {
  ModelSpec spec;
  spec.scheme = LevelScheme::TwoLevel;
  spec.n_emitters = n;
  spec.n_max = 5;
  spec.g = 1.0781e9;
  spec.kappa = kTwoPi * 1e9;
  spec.gamma_e1g1 = 6.5167e7;
  spec.gamma_g1e1 = pump;
  return spec;
}

}  // namespace

TEST_CASE("radiation rate basics") {
  CHECK(radiation_rate(1e9, 0.0) == 0.0);
  ModelSpec spec = two_level(1, 1e6);
  spec.kappa = 1e9;
  const SpaceSignature sig = product_signature(spec);
  // emitter ground, cavity |1>
  const DensityState one_photon = DensityState::pure(sig, 1);
  CHECK(radiation_rate(spec, one_photon) == doctest::Approx(1e9));
  const DensityState vacuum = DensityState::pure(sig, 0);
  CHECK(radiation_rate(spec, vacuum) == doctest::Approx(0.0));
}

TEST_CASE("single weakly pumped emitter antibunches") {
  const ModelSpec spec = two_level(1, 1e6);
  const Liouvillian l = build_qme(spec);
  const DensityState rho = steady_state(l);
  const auto taus = log_tau_grid(1e-11, 2e-6, 220);
  const G2Curve curve = g2(l, rho, taus);
  CHECK(curve.values.front() < 1.0);
  CHECK(curve.max_imag_residue < 1e-9);
  // ergodic steady state: g2 -> 1
  CHECK(curve.values.back() == doctest::Approx(1.0).epsilon(0.02));
  for (double v : curve.values) CHECK(v > -1e-9);
}

TEST_CASE("two-level pair shows no late-time shoulder") {
  const ModelSpec spec = two_level(2, 1e6);
  const Liouvillian l = build_qme(spec);
  const DensityState rho = steady_state(l);
  const auto taus = log_tau_grid(1e-11, 2e-6, 260);
  const G2Curve curve = g2(l, rho, taus);
  const G2Features features = extract_g2_features(curve);
  CHECK_FALSE(features.shoulder_present);
  CHECK_FALSE(features.tau1.has_value());
  CHECK_FALSE(features.tau2.has_value());
  // after the dip the curve climbs monotonically to 1 within 2%
  size_t dip = 0;
  for (size_t k = 1; k < curve.taus.size(); ++k)
    if (curve.values[k] < curve.values[dip]) dip = k;
  for (size_t k = dip; k < curve.values.size(); ++k)
    CHECK(curve.values[k] < 1.02);
  CHECK(curve.values.back() == doctest::Approx(1.0).epsilon(0.02));
  // bunching at zero delay for the pair, antibunching dip below one
  CHECK(features.g0 > 1.0);
  CHECK(features.g1 < 1.0);
  CHECK(features.tau0.has_value());
}

TEST_CASE("flat curve yields unit features and no times") {
  G2Curve flat;
  flat.taus = log_tau_grid(1e-11, 2e-6, 240);
  flat.values.assign(flat.taus.size(), 1.0);
  const G2Features f = extract_g2_features(flat);
  CHECK(f.g0 == doctest::Approx(1.0));
  CHECK(f.g1 == doctest::Approx(1.0));
  CHECK(f.g2 == doctest::Approx(1.0));
  CHECK_FALSE(f.shoulder_present);
  CHECK_FALSE(f.tau0.has_value());
  CHECK_FALSE(f.tau1.has_value());
  CHECK_FALSE(f.tau2.has_value());
}

TEST_CASE("synthetic feature recovery") {
  // g0 peak decaying in 0.5 ns, dip 0.7, shoulder 1.1 rising in 3 ns and
  // decaying in 250 ns
  const auto taus = log_tau_grid(1e-11, 2e-6, 300);
  std::vector<double> values(taus.size());
  for (size_t k = 0; k < taus.size(); ++k) {
    const double t = taus[k];
    const double peak = 0.7 * std::exp(-(t / 5e-10) * (t / 5e-10));
    const double shoulder =
        0.1 * (1.0 - std::exp(-t / 3e-9)) * std::exp(-t / 2.5e-7);
    const double dip = -0.3 * std::exp(-t / 2e-9);
    values[k] = 1.0 + peak + dip + shoulder;
  }
  G2Curve curve{std::vector<double>(taus.begin(), taus.end()), values, 0.0};
  const G2Features f = extract_g2_features(curve);
  CHECK(f.g0 == doctest::Approx(1.4).epsilon(0.05));
  CHECK(f.g1 < 1.0);
  CHECK(f.shoulder_present);
  CHECK(f.g2 == doctest::Approx(1.07).epsilon(0.05));
  REQUIRE(f.tau0.has_value());
  CHECK(*f.tau0 == doctest::Approx(5e-10).epsilon(0.5));
  REQUIRE(f.tau2.has_value());
  CHECK(*f.tau2 == doctest::Approx(2.5e-7).epsilon(0.5));
  REQUIRE(f.tau1.has_value());
  CHECK(*f.tau0 < *f.tau1);
  CHECK(*f.tau1 < *f.tau2);
}

TEST_CASE("lorentzian peak fitting") {
  std::vector<double> omegas;
  for (int k = -500; k <= 500; ++k) omegas.push_back(k * 4e7);

  SUBCASE("single synthetic peak recovered within 1%") {
    Spectrum s;
    s.omegas = omegas;
    for (double w : omegas) {
      const double d = w - 3e9;
      s.samples.push_back(2.0 * 25e16 / (d * d + 25e16));  // width 5e8
    }
    const auto peaks = fit_spectrum_peaks(s);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].center == doctest::Approx(3e9).epsilon(0.01));
    CHECK(peaks[0].width == doctest::Approx(5e8).epsilon(0.01));
    CHECK_FALSE(s.low_confidence);
  }

  SUBCASE("two peaks split by ten widths recovered within 2%") {
    Spectrum s;
    s.omegas = omegas;
    const double w0 = 4e8;
    for (double w : omegas) {
      const double d1 = w + 2e9, d2 = w - 2e9;
      s.samples.push_back(1.0 * w0 * w0 / (d1 * d1 + w0 * w0) +
                          0.8 * w0 * w0 / (d2 * d2 + w0 * w0));
    }
    const auto peaks = fit_spectrum_peaks(s);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].center == doctest::Approx(-2e9).epsilon(0.02));
    CHECK(peaks[1].center == doctest::Approx(2e9).epsilon(0.02));
    CHECK(peaks[0].width == doctest::Approx(w0).epsilon(0.02));
  }

  SUBCASE("merged peaks report a single maximum") {
    Spectrum s;
    s.omegas = omegas;
    const double w0 = 8e8;
    for (double w : omegas) {
      const double d1 = w + 4e7, d2 = w - 4e7;  // split well below the width
      s.samples.push_back(w0 * w0 / (d1 * d1 + w0 * w0) +
                          w0 * w0 / (d2 * d2 + w0 * w0));
    }
    const auto peaks = fit_spectrum_peaks(s);
    CHECK(peaks.size() == 1);
  }
}

TEST_CASE("empty-cavity emission spectrum is a Lorentzian of half-width kappa/2") {
  ModelSpec spec = two_level(1, 0.0);
  spec.g = 0.0;
  spec.kappa = 2e9;
  spec.omega_c = -4e8;
  spec.gamma_e1g1 = 0.0;
  const Liouvillian l = build_qme(spec);

  // thermal-equivalent photon occupation as the seeded stationary state of
  // the regression evolution
  MatC rho = MatC::Zero(l.dim(), l.dim());
  rho(0, 0) = 0.6;  // (g1, n=0)
  rho(1, 1) = 0.4;  // (g1, n=1)
  const DensityState state(l.signature, rho);

  std::vector<double> taus, omegas;
  for (int k = 0; k < 1500; ++k) taus.push_back(k * 1.5e-11);
  for (int k = -300; k <= 300; ++k) omegas.push_back(k * 2e7);
  Spectrum s = spectrum(l, state, taus, omegas);
  CHECK_FALSE(s.window_warning);
  const auto peaks = fit_spectrum_peaks(s);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].center == doctest::Approx(spec.omega_c).epsilon(0.02));
  CHECK(peaks[0].width == doctest::Approx(spec.kappa / 2.0).epsilon(0.02));
}

TEST_CASE("spectrum integral tracks the steady photon number across pumps") {
  std::vector<double> ratios;
  for (double pump : {2e6, 2e7}) {
    const ModelSpec spec = two_level(2, pump);
    const Liouvillian l = build_qme(spec);
    const DensityState rho = steady_state(l);
    const Operator a = lifted_annihilation(spec);
    const double n_ss = rho.expect(a.adjoint() * a).real();

    std::vector<double> taus, omegas;
    for (int k = 0; k < 3000; ++k) taus.push_back(k * 4e-12);
    for (int k = -600; k <= 600; ++k) omegas.push_back(k * 5e7);
    const Spectrum s = spectrum(l, rho, taus, omegas);
    double integral = 0.0;
    for (size_t j = 0; j + 1 < s.samples.size(); ++j)
      integral += 0.5 * (s.samples[j] + s.samples[j + 1]) * 5e7;
    ratios.push_back(integral / n_ss);
  }
  CHECK(ratios[0] == doctest::Approx(ratios[1]).epsilon(0.05));
}

TEST_CASE("exact and mean-field spectra agree on peak positions at N=2") {
  const ModelSpec spec = two_level(2, 1e6);

  std::vector<double> taus, omegas;
  for (int k = 0; k < 4000; ++k) taus.push_back(k * 2.5e-12);
  const double dw = 2.5e7;
  for (int k = -800; k <= 800; ++k) omegas.push_back(k * dw);

  const Liouvillian l = build_qme(spec);
  const DensityState rho = steady_state(l);
  Spectrum s_exact = spectrum(l, rho, taus, omegas);
  const auto peaks_exact = fit_spectrum_peaks(s_exact);

  const cumulant::MeanFieldSystem sys = cumulant::build_mean_field(spec);
  const cumulant::IntegrateResult r =
      cumulant::integrate(sys, cumulant::ground_assignment(sys), 2e-4);
  const cumulant::MfSpectrum mf = cumulant::mf_spectrum(sys, r.state, taus, omegas);
  Spectrum s_mf;
  s_mf.omegas = mf.omegas;
  s_mf.samples = mf.samples;
  const auto peaks_mf = fit_spectrum_peaks(s_mf);

  REQUIRE(peaks_exact.size() == peaks_mf.size());
  for (size_t j = 0; j < peaks_exact.size(); ++j)
    CHECK(std::abs(peaks_exact[j].center - peaks_mf[j].center) <= 3 * dw);
}
