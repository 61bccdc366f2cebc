#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "nvsr/liouville.hpp"
#include "nvsr/presets.hpp"
#include "nvsr/solvers.hpp"

using namespace nvsr;

TEST_CASE("zero generator gives a constant trajectory") {
  const SpaceSignature sig({3});
  const Liouvillian l{sig, SpMat(9, 9), ModelSpec{}};
  const DensityState rho0 = DensityState::maximally_mixed(sig);
  const Trajectory traj = evolve(l, rho0, std::vector<double>{0.0, 1.0, 2.0});
  for (const auto& s : traj.states)
    CHECK((s.matrix() - rho0.matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("decaying cavity follows the analytic exponential") {
  ModelSpec spec;
  spec.scheme = LevelScheme::TwoLevel;
  spec.n_emitters = 1;
  spec.n_max = 6;
  spec.g = 0.0;
  spec.kappa = 2e9;
  const Liouvillian l = build_qme(spec);

  // emitter in g1, cavity in |3>
  const long idx = 0 * 6 + 3;
  const DensityState rho0 = DensityState::pure(l.signature, idx);
  const Operator n_op = lifted_annihilation(spec).adjoint() * lifted_annihilation(spec);

  std::vector<double> times;
  for (int k = 1; k <= 10; ++k) times.push_back(k * 2e-10);
  const Trajectory traj = evolve(l, rho0, times);
  for (size_t k = 0; k < times.size(); ++k) {
    const double expected = 3.0 * std::exp(-spec.kappa * times[k]);
    const double got = traj.states[k].expect(n_op).real();
    CHECK(got == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("five-level relaxation matches a dense matrix-exponential oracle") {
  // Small photon cutoff keeps the dense superoperator exponentiable.
  ModelSpec spec = load_preset("paper-default-5lvl");
  spec.n_emitters = 2;
  spec.n_max = 2;  // 50-dim product space, 2500^2 superoperator
  spec.set("gamma_ge", 2e7);
  const Liouvillian l = build_qme(spec);

  // both emitters excited (e1), cavity empty
  const long e1 = 2;
  const long idx = (e1 * 5 + e1) * 2 + 0;
  const DensityState rho0 = DensityState::pure(l.signature, idx);

  const MatC dense = MatC(l.matrix);
  const double dt = 4e-10;
  std::vector<double> times;
  for (int k = 1; k <= 10; ++k) times.push_back(k * dt);

  const Trajectory traj = evolve(l, rho0, times);
  const MatC propagator = (dense * dt).exp();  // uniform grid: one exponential
  VecC v = rho0.vectorized();
  for (size_t k = 0; k < times.size(); ++k) {
    v = propagator * v;
    const VecC got = traj.states[k].vectorized();
    CHECK((got - v).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("steady state with decay only is the vacuum ground state") {
  ModelSpec spec = load_preset("paper-default-3lvl");
  spec.n_emitters = 1;
  spec.n_max = 3;
  spec.set("gamma_ge", 0.0);
  const Liouvillian l = build_qme(spec);
  const DensityState rho = steady_state(l);
  CHECK(std::abs(rho.matrix()(0, 0).real() - 1.0) < 1e-9);
  CHECK(rho.matrix().cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("detailed-balance family matches the rate-equation oracle") {
  // excited fraction ~ pump / (pump + decay + Gamma_c) in the Purcell regime
  for (double pump : {1e5, 1e6, 1e7}) {
    ModelSpec spec;
    spec.scheme = LevelScheme::TwoLevel;
    spec.n_emitters = 1;
    spec.n_max = 4;
    spec.g = 2e6;
    spec.kappa = 4e9;
    spec.gamma_e1g1 = 5e5;
    spec.gamma_g1e1 = pump;
    const Liouvillian l = build_qme(spec);
    const DensityState rho = steady_state(l);
    const double gc = spec.cavity_decay_rate();
    const double expected = pump / (pump + spec.gamma_e1g1 + gc);
    const Operator p_e = lifted_transition(spec, 0, Level::E1, Level::E1);
    CHECK(rho.expect(p_e).real() == doctest::Approx(expected).epsilon(0.02));
  }
}

TEST_CASE("strong pumping traps a five-level pair in the metastable level") {
  ModelSpec spec = load_preset("paper-default-5lvl");
  spec.n_emitters = 2;
  spec.n_max = 4;
  spec.set("gamma_ge", 5e8);  // strong optical pumping
  const Liouvillian l = build_qme(spec);
  const DensityState rho = steady_state(l);

  std::map<Level, double> population;
  for (Level lvl : {Level::G1, Level::G2, Level::E1, Level::E2, Level::M})
    population[lvl] = rho.expect(lifted_transition(spec, 0, lvl, lvl)).real();

  // lower levels outweigh upper ones, metastable dominates everything
  CHECK(population[Level::E1] > population[Level::E2]);
  CHECK(population[Level::G1] > population[Level::G2]);
  for (Level lvl : {Level::G1, Level::G2, Level::E1, Level::E2})
    CHECK(population[Level::M] > population[lvl]);
}

TEST_CASE("evolve and steady_state agree at long times") {
  ModelSpec spec = load_preset("paper-default-2lvl");
  spec.n_emitters = 2;
  spec.n_max = 4;
  spec.set("gamma_ge", 2e7);
  const Liouvillian l = build_qme(spec);

  const DensityState target = steady_state(l);
  const DensityState rho0 = DensityState::pure(l.signature, 0);
  const double horizon = 50.0 / std::min(spec.gamma_e1g1, spec.gamma_g1e1);
  const Trajectory traj = evolve(l, rho0, std::vector<double>{horizon});
  const double dist =
      0.5 * (traj.states[0].matrix() - target.matrix()).cwiseAbs().sum();
  CHECK(dist < 1e-6);
}

TEST_CASE("regression correlator basics") {
  ModelSpec spec = load_preset("paper-default-2lvl");
  spec.n_emitters = 1;
  spec.n_max = 4;
  spec.set("gamma_ge", 1e7);
  const Liouvillian l = build_qme(spec);
  const DensityState rho_ss = steady_state(l);
  const Operator a = lifted_annihilation(spec);
  const Operator n_op = a.adjoint() * a;
  const Operator eye = Operator::identity(l.signature);

  std::vector<double> taus{0.0, 1e-10, 1e-9, 5e-9};

  SUBCASE("trace preservation: <I(tau) rho_seed> is constant") {
    // seed with the steady state itself (trace 1)
    const auto c = regression_correlator(l, rho_ss, eye, eye, taus);
    for (const auto& v : c) CHECK(std::abs(v - Complex(1.0, 0.0)) < 1e-9);
  }

  SUBCASE("tau=0 equals the direct moment") {
    // g2 kernel seed a rho a^dag, traced against a^dag a at tau=0 equals
    // <a^dag a^dag a a> evaluated directly.
    const MatC seed = a.matrix() * rho_ss.matrix() * MatC(a.adjoint().matrix());
    const auto c = regression_correlator_seeded(l, seed, n_op, taus);
    const Operator fourth =
        a.adjoint() * (a.adjoint() * a) * a;  // a^dag a^dag a a
    const Complex direct = rho_ss.expect(fourth);
    CHECK(std::abs(c[0] - direct) < 1e-10 * std::max(1.0, std::abs(direct)));
  }

  SUBCASE("non-stationary input raises") {
    const DensityState rho0 = DensityState::pure(l.signature, 1);
    CHECK_THROWS_AS(
        regression_correlator(l, rho0, eye, eye, taus), StationarityError);
  }
}

TEST_CASE("seeded photon kernel of an empty decaying cavity decays at kappa") {
  ModelSpec spec;
  spec.scheme = LevelScheme::TwoLevel;
  spec.n_emitters = 1;
  spec.n_max = 5;
  spec.g = 0.0;
  spec.kappa = 1e9;
  const Liouvillian l = build_qme(spec);

  // one-photon seed
  MatC seed = MatC::Zero(l.dim(), l.dim());
  seed(1, 1) = 1.0;  // (g1, n=1)
  const Operator a = lifted_annihilation(spec);
  const Operator n_op = a.adjoint() * a;
  std::vector<double> taus{0.0, 5e-10, 1e-9, 2e-9};
  const auto c = regression_correlator_seeded(l, seed, n_op, taus);
  for (size_t k = 0; k < taus.size(); ++k)
    CHECK(std::abs(c[k].real() - std::exp(-spec.kappa * taus[k])) < 1e-6);
}

TEST_CASE("independent fixed-step RK4 oracle agrees on the full five-level space") {
  ModelSpec spec = load_preset("paper-default-5lvl");
  spec.n_emitters = 1;
  spec.n_max = 5;  // 25-dim space, 625^2 superoperator
  spec.set("gamma_ge", 1e8);
  const Liouvillian l = build_qme(spec);
  const DensityState rho0 = DensityState::pure(l.signature, 2 * 5 + 0);  // e1, vacuum

  const double t_end = 2e-9;
  const VecC adaptive = propagate_to(l.matrix, rho0.vectorized(), t_end);

  // classical RK4 with a conservatively small fixed step
  VecC v = rho0.vectorized();
  const int steps = 20000;
  const double h = t_end / steps;
  for (int s = 0; s < steps; ++s) {
    const VecC k1 = l.matrix * v;
    const VecC k2 = l.matrix * (v + 0.5 * h * k1);
    const VecC k3 = l.matrix * (v + 0.5 * h * k2);
    const VecC k4 = l.matrix * (v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  CHECK((adaptive - v).cwiseAbs().maxCoeff() < 1e-8);
}
