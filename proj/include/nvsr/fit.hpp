#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nvsr/types.hpp"

namespace nvsr {

struct FitResult {
  VecR params;
  double rss = 0.0;  // sum of squared residuals
  bool converged = false;
  int iterations = 0;
};

/// Small dense Levenberg-Marquardt with a forward-difference Jacobian.
FitResult fit_least_squares(
    const std::function<void(const VecR&, VecR&)>& residuals, long n_residuals,
    VecR initial, int max_iterations = 200, double tol = 1e-12);

/// y = b + A exp(-(x/tau)^2); params [A, tau, b].
FitResult fit_gaussian_peak(std::span<const double> xs, std::span<const double> ys,
                            double a0, double tau0, double b0);

/// y = c + A exp(-(x - x0)/tau); params [A, tau, c].
FitResult fit_exponential(std::span<const double> xs, std::span<const double> ys,
                          double x0, double a0, double tau0, double c0);

struct LorentzianPeak {
  double center = 0.0;
  double width = 0.0;  // half width at half maximum
  double amplitude = 0.0;
};

/// Sum of n Lorentzians A w^2 / ((x-c)^2 + w^2); initial guesses required.
FitResult fit_lorentzians(std::span<const double> xs, std::span<const double> ys,
                          std::vector<LorentzianPeak> initial);

}  // namespace nvsr
