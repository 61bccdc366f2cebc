#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nvsr/liouville.hpp"
#include "nvsr/operators.hpp"

namespace nvsr {

struct EvolveOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  int krylov_dim = 30;
  // Step-size collapse threshold as a fraction of the requested span;
  // crossing it raises a NumericalError suggesting a tolerance/rate review.
  double min_step_fraction = 1e-13;
  long max_steps = 2'000'000;
};

/// Samples y(t) = exp(A t) y0 at the (ascending, non-negative) times.
/// Adaptive Krylov/Arnoldi propagation with local error control; exact
/// (up to the dense exponential) whenever the Krylov space closes.
void propagate(const SpMat& a, const VecC& y0, std::span<const double> times,
               const std::function<void(size_t, double, const VecC&)>& on_sample,
               const EvolveOptions& options = {});

/// Convenience single-endpoint version.
VecC propagate_to(const SpMat& a, const VecC& y0, double t,
                  const EvolveOptions& options = {});

struct SteadyOptions {
  double residual_tol = 1e-10;
  int refine_iterations = 3;
  /// When the direct solve fails, integrate from the maximally mixed state
  /// for `fallback_horizon_rates` inverse minimum rates.
  double fallback_horizon = 0.0;  // seconds; 0 disables the fallback
};

struct SteadyResult {
  VecC state;       // vectorized, trace-normalized
  double residual;  // max-norm of L*state after normalization
  bool used_fallback = false;
};

/// Solves L x = 0 with the trace condition replacing the generator row of
/// the given diagonal element (deterministic, index `trace_row`). Iterative
/// refinement through the factorization; falls back to long-time evolution
/// when the linear solve is singular beyond tolerance and a fallback horizon
/// is configured. A residual floor above tolerance raises MultiplicityError.
SteadyResult steady_state_vec(const SpMat& l, const VecC& trace_row,
                              long replace_row, const SteadyOptions& options = {});

/// Time-ordered states of a density-matrix evolution.
struct Trajectory {
  std::vector<double> times;
  std::vector<DensityState> states;
};

/// Integrates d rho/dt = L rho from rho0, storing states at `times`
/// (relative to rho0). Trace drift beyond 1e-8 raises NumericalError.
Trajectory evolve(const Liouvillian& l, const DensityState& rho0,
                  std::span<const double> times, const EvolveOptions& options = {});

/// Sampling variant that does not store states.
void evolve_sampled(const Liouvillian& l, const DensityState& rho0,
                    std::span<const double> times,
                    const std::function<void(size_t, double, const DensityState&)>& sampler,
                    const EvolveOptions& options = {});

/// Steady state of the product-space generator.
DensityState steady_state(const Liouvillian& l, const SteadyOptions& options = {});

/// Quantum-regression two-time correlator <A(t_ss + tau) B(t_ss)>: evolves
/// the seeded operator B rho_ss under L and traces against A at each tau.
/// rho_ss must satisfy ||L vec(rho_ss)||_inf < stationarity_tol.
std::vector<Complex> regression_correlator(const Liouvillian& l,
                                           const DensityState& rho_ss,
                                           const Operator& a, const Operator& b,
                                           std::span<const double> taus,
                                           double stationarity_tol = 1e-8,
                                           const EvolveOptions& options = {});

/// Same quantum-regression evolution for an arbitrary seeded operator
/// (e.g. a rho a^dag for the photon-correlation kernel).
std::vector<Complex> regression_correlator_seeded(const Liouvillian& l,
                                                  const MatC& seed,
                                                  const Operator& a,
                                                  std::span<const double> taus,
                                                  const EvolveOptions& options = {});

/// trace(A unvec(x)) as a dot product helper.
Complex trace_against(const Operator& a, const VecC& x);

}  // namespace nvsr
