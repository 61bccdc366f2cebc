#include "nvsr/solvers.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

namespace nvsr {

namespace {

double max_abs_coeff(const SpMat& m) {
  double out = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      out = std::max(out, std::abs(it.value()));
  return out;
}

// Arnoldi decomposition of (A, v): V holds m+1 orthonormal vectors, H the
// (m+2)^2 Hessenberg augmented for the phi-function error estimates.
struct ArnoldiResult {
  MatC v;          // n x (m+1)
  MatC h;          // (m+2) x (m+2)
  int m_used = 0;  // Krylov dimension actually built
  bool closed = false;  // invariant subspace found (happy breakdown)
  double beta = 0.0;
  double avnorm = 0.0;  // ||A v_{m+1}||, used by the second error term
  double hnorm = 0.0;
};

ArnoldiResult arnoldi(const SpMat& a, const VecC& v, int m) {
  const long n = v.size();
  m = static_cast<int>(std::min<long>(m, n));
  ArnoldiResult r;
  r.beta = v.norm();
  r.v.resize(n, m + 1);
  r.h = MatC::Zero(m + 2, m + 2);
  if (r.beta == 0.0) {
    r.closed = true;
    r.m_used = 0;
    return r;
  }
  r.v.col(0) = v / r.beta;
  double scale = 0.0;
  for (int j = 0; j < m; ++j) {
    VecC w = a * r.v.col(j);
    for (int i = 0; i <= j; ++i) {
      const Complex hij = r.v.col(i).dot(w);
      r.h(i, j) += hij;
      w -= hij * r.v.col(i);
    }
    // One re-orthogonalization pass keeps the basis clean for stiff spectra.
    for (int i = 0; i <= j; ++i) {
      const Complex c = r.v.col(i).dot(w);
      r.h(i, j) += c;
      w -= c * r.v.col(i);
    }
    const double hnext = w.norm();
    scale = std::max(scale, r.h.col(j).cwiseAbs().maxCoeff());
    r.m_used = j + 1;
    if (hnext <= 1e-12 * std::max(1.0, scale)) {
      r.closed = true;
      return r;
    }
    r.h(j + 1, j) = hnext;
    r.v.col(j + 1) = w / hnext;
  }
  r.avnorm = (a * r.v.col(m)).norm();
  for (int i = 0; i < m + 2; ++i) r.hnorm = std::max(r.hnorm, r.h.row(i).cwiseAbs().sum());
  return r;
}

// One accepted Krylov step of size <= h_max; returns the step taken and
// updates v and the step-size suggestion.
double krylov_step(const SpMat& a, VecC& v, double h_max, double tol_rate,
                   const EvolveOptions& opt, double& h_suggest, double h_floor) {
  ArnoldiResult ar = arnoldi(a, v, opt.krylov_dim);
  if (ar.beta == 0.0) return h_max;  // zero vector is stationary

  const int m = ar.m_used;
  if (ar.closed) {
    // Exact within the closed subspace: take the full step.
    const MatC f = (h_max * ar.h.topLeftCorner(m, m)).exp();
    v = ar.beta * (ar.v.leftCols(m) * f.col(0));
    h_suggest = h_max;
    return h_max;
  }

  // Augment H so that exp(h H) exposes the first two phi-correction terms.
  MatC haug = ar.h;
  haug(m + 1, m) = 1.0;

  double h = std::min(h_max, 200.0 / std::max(ar.hnorm, 1e-300));
  if (h_suggest > 0.0) h = std::min(h, h_suggest);

  for (int attempt = 0; attempt < 60; ++attempt) {
    const MatC f = (h * haug).exp();
    const double err1 = ar.beta * std::abs(f(m, 0));
    const double err2 = ar.beta * std::abs(f(m + 1, 0)) * ar.avnorm;
    double err_loc;
    double order;
    if (err1 > 10.0 * err2) {
      err_loc = err2;
      order = 1.0 / m;
    } else if (err1 > err2) {
      err_loc = err1 * err2 / (err1 - err2);
      order = 1.0 / m;
    } else {
      err_loc = err1;
      order = 1.0 / std::max(1, m - 1);
    }

    const double budget = 1.2 * h * tol_rate;
    if (err_loc <= budget || h <= h_floor) {
      v = ar.beta * (ar.v.leftCols(m) * f.col(0).head(m) + f(m, 0) * ar.v.col(m));
      const double grow = (err_loc > 0.0)
                              ? 0.9 * std::pow(h * tol_rate / err_loc, order)
                              : 5.0;
      h_suggest = h * std::clamp(grow, 0.2, 5.0);
      return h;
    }
    const double shrink = 0.9 * std::pow(h * tol_rate / err_loc, order);
    h *= std::clamp(shrink, 0.1, 0.9);
  }
  throw NumericalError(
      "propagate: step size collapsed; the generator is too stiff for the "
      "requested tolerance, review rates/tolerances");
}

}  // namespace

void propagate(const SpMat& a, const VecC& y0, std::span<const double> times,
               const std::function<void(size_t, double, const VecC&)>& on_sample,
               const EvolveOptions& options) {
  if (a.rows() != a.cols() || a.rows() != y0.size())
    throw SignatureError("propagate: generator/state dimensions disagree");
  double t = 0.0;
  VecC v = y0;
  double h_suggest = 0.0;
  long steps = 0;

  double span = 0.0;
  for (double target : times) span = std::max(span, target);
  span = std::max(span, 1e-300);

  for (size_t k = 0; k < times.size(); ++k) {
    const double target = times[k];
    if (target < t - 1e-15 * span)
      throw ValidationError("propagate: times must be ascending");
    const double tol_rate =
        std::max(options.atol, options.rtol * std::max(y0.norm(), v.norm())) / span;
    const double h_floor = options.min_step_fraction * span;
    while (target - t > 1e-15 * span) {
      const double remaining = target - t;
      const double taken =
          krylov_step(a, v, remaining, tol_rate, options, h_suggest, h_floor);
      t += taken;
      if (++steps > options.max_steps)
        throw NumericalError("propagate: step budget exhausted (stiff system?)");
      if (taken >= remaining * (1.0 - 1e-12)) {
        t = target;
        break;
      }
    }
    on_sample(k, target, v);
  }
}

VecC propagate_to(const SpMat& a, const VecC& y0, double t,
                  const EvolveOptions& options) {
  VecC out;
  const double times[1] = {t};
  propagate(a, y0, times, [&](size_t, double, const VecC& v) { out = v; }, options);
  return out;
}

SteadyResult steady_state_vec(const SpMat& l, const VecC& trace_row,
                              long replace_row, const SteadyOptions& options) {
  const long n = l.rows();
  if (trace_row.size() != n || replace_row < 0 || replace_row >= n)
    throw SignatureError("steady_state_vec: bad trace row");

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<size_t>(l.nonZeros()) + static_cast<size_t>(n));
  for (int k = 0; k < l.outerSize(); ++k)
    for (SpMat::InnerIterator it(l, k); it; ++it)
      if (it.row() != replace_row)
        triplets.emplace_back(it.row(), it.col(), it.value());
  for (long i = 0; i < n; ++i)
    if (trace_row(i) != Complex(0.0, 0.0))
      triplets.emplace_back(replace_row, i, trace_row(i));

  SpMat m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();

  VecC b = VecC::Zero(n);
  b(replace_row) = 1.0;

  SteadyResult result;
  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(m);
  lu.factorize(m);
  bool solved = false;
  if (lu.info() == Eigen::Success) {
    VecC x = lu.solve(b);
    if (lu.info() == Eigen::Success && x.allFinite()) {
      for (int it = 0; it < options.refine_iterations; ++it) {
        VecC r = b - m * x;
        VecC dx = lu.solve(r);
        if (lu.info() != Eigen::Success || !dx.allFinite()) break;
        x += dx;
      }
      const Complex tr = trace_row.conjugate().dot(x);
      if (std::abs(tr) > 1e-300) {
        x /= tr;
        result.state = std::move(x);
        solved = true;
      }
    }
  }

  if (solved) {
    result.residual = (l * result.state).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, max_abs_coeff(l));
    if (result.residual <= options.residual_tol * scale) return result;
    // A residual floor after refinement signals a non-unique nullspace.
    if (options.fallback_horizon <= 0.0)
      throw MultiplicityError(
          "steady_state: residual floor " + std::to_string(result.residual) +
          " after refinement suggests a degenerate nullspace");
  }

  if (options.fallback_horizon <= 0.0)
    throw NumericalError("steady_state: sparse solve failed and no fallback horizon set");

  // Long-time evolution fallback from the maximally mixed state.
  VecC x0 = trace_row / trace_row.cwiseAbs().sum();
  EvolveOptions evolve_options;
  VecC x = propagate_to(l, x0, options.fallback_horizon, evolve_options);
  const Complex tr = trace_row.conjugate().dot(x);
  if (std::abs(tr) < 1e-300)
    throw NumericalError("steady_state: fallback evolution lost the trace");
  x /= tr;
  result.state = std::move(x);
  result.residual = (l * result.state).cwiseAbs().maxCoeff();
  result.used_fallback = true;
  const double scale = std::max(1.0, max_abs_coeff(l));
  if (result.residual > 1e-6 * scale)
    throw MultiplicityError(
        "steady_state: fallback evolution did not converge to a unique "
        "stationary state (residual " + std::to_string(result.residual) + ")");
  return result;
}

Trajectory evolve(const Liouvillian& l, const DensityState& rho0,
                  std::span<const double> times, const EvolveOptions& options) {
  Trajectory trajectory;
  trajectory.times.assign(times.begin(), times.end());
  trajectory.states.reserve(times.size());
  evolve_sampled(l, rho0, times,
                 [&](size_t, double, const DensityState& s) {
                   trajectory.states.push_back(s);
                 },
                 options);
  return trajectory;
}

void evolve_sampled(const Liouvillian& l, const DensityState& rho0,
                    std::span<const double> times,
                    const std::function<void(size_t, double, const DensityState&)>& sampler,
                    const EvolveOptions& options) {
  if (!(rho0.signature() == l.signature))
    throw SignatureError("evolve: state signature does not match Liouvillian");
  const VecC v0 = rho0.vectorized();
  propagate(l.matrix, v0, times,
            [&](size_t k, double t, const VecC& v) {
              DensityState state = DensityState::from_vector(l.signature, v);
              if (state.trace_error() > 1e-8)
                throw NumericalError("evolve: trace drift " +
                                     std::to_string(state.trace_error()) +
                                     " at t = " + std::to_string(t));
              sampler(k, t, state);
            },
            options);
}

DensityState steady_state(const Liouvillian& l, const SteadyOptions& options) {
  SteadyOptions opts = options;
  if (opts.fallback_horizon == 0.0) {
    // Default horizon: 50 inverse minimum nonzero rates.
    double min_rate = l.spec.kappa;
    for (double r : {l.spec.gamma_e1g1, l.spec.gamma_e2g2, l.spec.gamma_g1e1,
                     l.spec.gamma_g2e2, l.spec.gamma_mg1, l.spec.gamma_mg2,
                     l.spec.gamma_e1m, l.spec.gamma_e2m})
      if (r > 0.0) min_rate = std::min(min_rate, r);
    opts.fallback_horizon = 50.0 / min_rate;
  }
  const VecC trace_row = vectorized_trace_row(l.signature);
  SteadyResult r = steady_state_vec(l.matrix, trace_row, 0, opts);
  DensityState rho = DensityState::from_vector(l.signature, r.state);
  // Hermitize away solver round-off before handing the state out.
  MatC h = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  h /= h.trace().real();
  return DensityState(l.signature, std::move(h));
}

Complex trace_against(const Operator& a, const VecC& x) {
  const long d = a.dim();
  if (x.size() != d * d)
    throw SignatureError("trace_against: vector length mismatch");
  Complex sum = 0.0;
  const SpMat& m = a.matrix();
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      sum += it.value() * x(it.row() * d + it.col());
  return sum;
}

std::vector<Complex> regression_correlator_seeded(const Liouvillian& l,
                                                  const MatC& seed,
                                                  const Operator& a,
                                                  std::span<const double> taus,
                                                  const EvolveOptions& options) {
  const long d = l.dim();
  if (seed.rows() != d || seed.cols() != d)
    throw SignatureError("regression: seed dimension mismatch");
  VecC v(d * d);
  for (long c = 0; c < d; ++c) v.segment(c * d, d) = seed.col(c);
  std::vector<Complex> samples(taus.size());
  propagate(l.matrix, v, taus,
            [&](size_t k, double, const VecC& x) {
              samples[k] = trace_against(a, x);
            },
            options);
  return samples;
}

std::vector<Complex> regression_correlator(const Liouvillian& l,
                                           const DensityState& rho_ss,
                                           const Operator& a, const Operator& b,
                                           std::span<const double> taus,
                                           double stationarity_tol,
                                           const EvolveOptions& options) {
  const VecC v = rho_ss.vectorized();
  const double residual = (l.matrix * v).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, max_abs_coeff(l.matrix));
  if (residual > stationarity_tol * scale)
    throw StationarityError("regression_correlator: input state is not stationary "
                            "(residual " + std::to_string(residual) + ")");
  const MatC seed = b.matrix() * rho_ss.matrix();
  return regression_correlator_seeded(l, seed, a, taus, options);
}

}  // namespace nvsr
