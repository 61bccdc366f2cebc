#pragma once

#include <functional>
#include <span>

#include "nvsr/error.hpp"
#include "nvsr/types.hpp"

namespace nvsr {

/// Autonomous complex ODE y' = f(y) with a dense analytic Jacobian.
struct OdeSystem {
  std::function<void(const VecC&, VecC&)> rhs;
  std::function<void(const VecC&, MatC&)> jacobian;
  long dim = 0;
};

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  double h_initial = 0.0;  // 0: choose automatically
  double h_min_fraction = 1e-14;
  long max_steps = 500'000;
  /// Declare steady state when max|f| < steady_rtol * max|y| and stop.
  bool stop_at_steady = false;
  double steady_rtol = 1e-10;
};

struct OdeResult {
  VecC y;
  double t = 0.0;
  bool reached_steady = false;
  double residual = 0.0;  // max|f(y)| at exit
  long steps = 0;         // attempted steps
  long accepted = 0;
  long rejected_error = 0;
  long rejected_newton = 0;
  long factorizations = 0;
};

/// TR-BDF2 (trapezoidal / BDF2 composite, L-stable, one factorization per
/// step) with a third-order embedded error estimate and adaptive steps.
/// `sample_times` are hit exactly and reported through `on_sample`.
OdeResult integrate_trbdf2(
    const OdeSystem& system, VecC y0, double t_end, const OdeOptions& options = {},
    std::span<const double> sample_times = {},
    const std::function<void(size_t, double, const VecC&)>& on_sample = {});

}  // namespace nvsr
