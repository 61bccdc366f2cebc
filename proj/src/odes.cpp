#include "nvsr/odes.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

namespace nvsr {

namespace {

constexpr double kGamma = 0.5857864376269049;  // 2 - sqrt(2)

double wrms(const VecC& err, const VecC& y, double rtol, double atol) {
  double acc = 0.0;
  for (long i = 0; i < err.size(); ++i) {
    const double scale = atol + rtol * std::abs(y(i));
    const double r = std::abs(err(i)) / scale;
    acc += r * r;
  }
  return std::sqrt(acc / std::max<long>(1, err.size()));
}

struct NewtonOutcome {
  bool converged = false;
  VecC y;
};

// Simplified Newton for y - d*h*f(y) = rhs_const with the step-start
// factorization reused across iterations.
NewtonOutcome solve_stage(const OdeSystem& system,
                          const Eigen::PartialPivLU<MatC>& lu, double dh,
                          const VecC& rhs_const, VecC y_guess, double tol) {
  VecC f(system.dim), g(system.dim);
  for (int it = 0; it < 12; ++it) {
    system.rhs(y_guess, f);
    g = y_guess - dh * f - rhs_const;
    const VecC delta = lu.solve(g);
    y_guess -= delta;
    double dn = 0.0, yn = 0.0;
    for (long i = 0; i < delta.size(); ++i) {
      dn = std::max(dn, std::abs(delta(i)));
      yn = std::max(yn, std::abs(y_guess(i)));
    }
    if (dn <= tol * std::max(1.0, yn)) return {true, std::move(y_guess)};
  }
  return {false, std::move(y_guess)};
}

}  // namespace

OdeResult integrate_trbdf2(
    const OdeSystem& system, VecC y0, double t_end, const OdeOptions& options,
    std::span<const double> sample_times,
    const std::function<void(size_t, double, const VecC&)>& on_sample) {
  const long n = system.dim;
  if (y0.size() != n) throw SignatureError("integrate_trbdf2: state size mismatch");

  // quadrature weights of the cubic-accurate reference solution
  const double g = kGamma;
  const double w0 = 0.5 - 1.0 / (6.0 * g);
  const double wg = 1.0 / (6.0 * g * (1.0 - g));
  const double w1 = (2.0 - 3.0 * g) / (6.0 * (1.0 - g));
  const double bdf_c1 = 1.0 / (g * (2.0 - g));
  const double bdf_c0 = (1.0 - g) * (1.0 - g) / (g * (2.0 - g));
  const double d = g / 2.0;

  OdeResult result;
  result.y = std::move(y0);
  VecC f_n(n), f_g(n), f_1(n);
  MatC jac(n, n);

  system.rhs(result.y, f_n);
  double h = options.h_initial;
  if (h <= 0.0) {
    const double fmax = f_n.cwiseAbs().maxCoeff();
    const double ymax = result.y.cwiseAbs().maxCoeff();
    h = (fmax > 0.0) ? 0.01 * (options.atol + options.rtol * ymax) / fmax
                     : t_end / 10.0;
    h = std::clamp(h, t_end * 1e-12, t_end / 10.0);
  }
  const double h_floor = t_end * options.h_min_fraction;

  size_t next_sample = 0;
  auto emit_samples_at = [&](double t, const VecC& y) {
    while (next_sample < sample_times.size() &&
           sample_times[next_sample] <= t * (1.0 + 1e-12)) {
      if (on_sample) on_sample(next_sample, sample_times[next_sample], y);
      ++next_sample;
    }
  };
  emit_samples_at(0.0, result.y);

  bool jac_fresh = false;
  Eigen::PartialPivLU<MatC> lu;
  double h_factored = -1.0;

  while (result.t < t_end * (1.0 - 1e-14)) {
    if (++result.steps > options.max_steps)
      throw NumericalError("integrate_trbdf2: step budget exhausted");

    h = std::min(h, t_end - result.t);
    // land exactly on the next sample time
    if (next_sample < sample_times.size()) {
      const double gap = sample_times[next_sample] - result.t;
      if (gap > 0.0 && gap < h) h = gap;
    }

    if (!jac_fresh || std::abs(h - h_factored) > 1e-3 * h_factored) {
      system.jacobian(result.y, jac);
      MatC m = MatC::Identity(n, n) - Complex(d * h, 0.0) * jac;
      lu.compute(m);
      ++result.factorizations;
      jac_fresh = true;
      h_factored = h;
    }

    const double newton_tol = 0.02 * std::min(options.rtol, 1e-2);

    // TR stage to t + gamma*h
    const VecC rhs_tr = result.y + (d * h) * f_n;
    NewtonOutcome stage1 =
        solve_stage(system, lu, d * h, rhs_tr, result.y + (g * h) * f_n, newton_tol);
    bool ok = stage1.converged;
    NewtonOutcome stage2;
    if (ok) {
      system.rhs(stage1.y, f_g);
      // BDF2 stage to t + h
      const VecC rhs_bdf = bdf_c1 * stage1.y - bdf_c0 * result.y;
      stage2 = solve_stage(system, lu, d * h, rhs_bdf, stage1.y, newton_tol);
      ok = stage2.converged;
    }
    if (!ok) {
      ++result.rejected_newton;
      h *= 0.25;
      jac_fresh = false;
      if (h < h_floor)
        throw NumericalError(
            "integrate_trbdf2: Newton iteration stopped converging; the "
            "system is too stiff for the requested tolerance");
      continue;
    }

    system.rhs(stage2.y, f_1);
    VecC est = result.y + h * (w0 * f_n + wg * f_g + w1 * f_1) - stage2.y;
    est = lu.solve(est);  // stiff-safe filtering of the raw estimate
    const double err = wrms(est, stage2.y, options.rtol, options.atol);

    if (err <= 1.0) {
      ++result.accepted;
      result.t += h;
      result.y = std::move(stage2.y);
      f_n = f_1;
      emit_samples_at(result.t, result.y);
      const double fmax = f_n.cwiseAbs().maxCoeff();
      result.residual = fmax;
      if (options.stop_at_steady &&
          fmax < options.steady_rtol * result.y.cwiseAbs().maxCoeff()) {
        result.reached_steady = true;
        return result;
      }
      const double grow = 0.9 * std::pow(std::max(err, 1e-10), -1.0 / 3.0);
      h *= std::clamp(grow, 1.0, 5.0);
      jac_fresh = false;
    } else {
      ++result.rejected_error;
      const double shrink = 0.9 * std::pow(err, -1.0 / 3.0);
      h *= std::clamp(shrink, 0.1, 0.5);
      jac_fresh = false;
      if (h < h_floor)
        throw NumericalError("integrate_trbdf2: step size collapsed");
    }
  }
  system.rhs(result.y, f_n);
  result.residual = f_n.cwiseAbs().maxCoeff();
  return result;
}

}  // namespace nvsr
