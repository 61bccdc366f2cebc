#include "nvsr/fit.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "nvsr/error.hpp"

namespace nvsr {

FitResult fit_least_squares(
    const std::function<void(const VecR&, VecR&)>& residuals, long n_residuals,
    VecR initial, int max_iterations, double tol) {
  const long np = initial.size();
  FitResult result;
  result.params = std::move(initial);

  VecR r(n_residuals), r_try(n_residuals);
  residuals(result.params, r);
  double rss = r.squaredNorm();
  double lambda = 1e-3;

  MatR jac(n_residuals, np);
  VecR perturbed(np);

  for (int iter = 0; iter < max_iterations; ++iter) {
    result.iterations = iter + 1;
    // forward-difference Jacobian
    for (long j = 0; j < np; ++j) {
      const double h = 1e-7 * std::max(1e-8, std::abs(result.params(j)));
      perturbed = result.params;
      perturbed(j) += h;
      residuals(perturbed, r_try);
      jac.col(j) = (r_try - r) / h;
    }
    const MatR jtj = jac.transpose() * jac;
    const VecR jtr = jac.transpose() * r;

    bool improved = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      MatR damped = jtj;
      for (long j = 0; j < np; ++j)
        damped(j, j) += lambda * std::max(jtj(j, j), 1e-30);
      const VecR step = damped.ldlt().solve(jtr);
      perturbed = result.params - step;
      residuals(perturbed, r_try);
      const double rss_try = r_try.squaredNorm();
      if (rss_try < rss) {
        const double drop = rss - rss_try;
        result.params = perturbed;
        r = r_try;
        rss = rss_try;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        if (drop <= tol * std::max(rss, 1e-300)) {
          result.converged = true;
          result.rss = rss;
          return result;
        }
        break;
      }
      lambda *= 8.0;
    }
    if (!improved) {
      result.converged = true;  // stuck at a (local) minimum
      break;
    }
  }
  result.rss = rss;
  return result;
}

FitResult fit_gaussian_peak(std::span<const double> xs, std::span<const double> ys,
                            double a0, double tau0, double b0) {
  if (xs.size() != ys.size() || xs.size() < 4)
    throw ValidationError("fit_gaussian_peak: need at least 4 samples");
  const long n = static_cast<long>(xs.size());
  auto resid = [&](const VecR& p, VecR& out) {
    for (long i = 0; i < n; ++i) {
      const double z = xs[i] / p(1);
      out(i) = p(2) + p(0) * std::exp(-z * z) - ys[i];
    }
  };
  VecR p0(3);
  p0 << a0, tau0, b0;
  return fit_least_squares(resid, n, p0);
}

FitResult fit_exponential(std::span<const double> xs, std::span<const double> ys,
                          double x0, double a0, double tau0, double c0) {
  if (xs.size() != ys.size() || xs.size() < 4)
    throw ValidationError("fit_exponential: need at least 4 samples");
  const long n = static_cast<long>(xs.size());
  auto resid = [&](const VecR& p, VecR& out) {
    for (long i = 0; i < n; ++i)
      out(i) = p(2) + p(0) * std::exp(-(xs[i] - x0) / p(1)) - ys[i];
  };
  VecR p0(3);
  p0 << a0, tau0, c0;
  return fit_least_squares(resid, n, p0);
}

FitResult fit_lorentzians(std::span<const double> xs, std::span<const double> ys,
                          std::vector<LorentzianPeak> initial) {
  if (initial.empty()) throw ValidationError("fit_lorentzians: no peaks given");
  if (xs.size() != ys.size() || xs.size() < 3 * initial.size() + 1)
    throw ValidationError("fit_lorentzians: too few samples for the peak count");
  const long n = static_cast<long>(xs.size());
  const long k = static_cast<long>(initial.size());
  auto resid = [&, k](const VecR& p, VecR& out) {
    for (long i = 0; i < n; ++i) {
      double model = 0.0;
      for (long j = 0; j < k; ++j) {
        const double a = p(3 * j), c = p(3 * j + 1), w = p(3 * j + 2);
        const double d = xs[i] - c;
        model += a * w * w / (d * d + w * w);
      }
      out(i) = model - ys[i];
    }
  };
  VecR p0(3 * k);
  for (long j = 0; j < k; ++j) {
    p0(3 * j) = initial[static_cast<size_t>(j)].amplitude;
    p0(3 * j + 1) = initial[static_cast<size_t>(j)].center;
    p0(3 * j + 2) = initial[static_cast<size_t>(j)].width;
  }
  return fit_least_squares(resid, n, p0, 400);
}

}  // namespace nvsr
