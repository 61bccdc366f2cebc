#pragma once

#include <compare>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nvsr/models.hpp"
#include "nvsr/odes.hpp"
#include "nvsr/types.hpp"

namespace nvsr::cumulant {

/// Emitter transition factor sigma_tag^{ab} = |a><b| on representative
/// emitter `tag` (1-based); level indices within the model scheme.
struct SigmaFactor {
  int tag = 1;
  int a = 0;
  int b = 0;
  auto operator<=>(const SigmaFactor&) const = default;
};

/// Normal-ordered operator monomial  adag^nc  sigma...  a^na  (photon
/// operators commute with emitter ones; creations left of annihilations;
/// at most one sigma per tag after contraction).
struct Monomial {
  int n_create = 0;
  int n_annihilate = 0;
  std::vector<SigmaFactor> sigmas;  // ascending tag

  int order() const {
    return n_create + n_annihilate + static_cast<int>(sigmas.size());
  }
  auto operator<=>(const Monomial&) const = default;
};

/// Operator polynomial: moment symbol -> coefficient.
using Polynomial = std::map<Monomial, Complex>;

/// Product of expectation values Prod_k <factor_k> (factors sorted).
struct MomentProduct {
  std::vector<Monomial> factors;
  auto operator<=>(const MomentProduct&) const = default;
};

/// Sum of coefficient * moment products.
using MomentExpr = std::map<MomentProduct, Complex>;

// -- operator algebra ------------------------------------------------------

/// Product of two monomials, normal-ordered: boson reordering via
/// a^p adag^q = sum_k k! C(p,k) C(q,k) adag^{q-k} a^{p-k} and emitter
/// contraction sigma^{ab} sigma^{cd} = delta_{bc} sigma^{ad} per tag.
Polynomial mono_mul(const Monomial& x, const Monomial& y);
Polynomial poly_mul(const Polynomial& x, const Polynomial& y);
Polynomial poly_add(Polynomial x, const Polynomial& y, Complex scale = 1.0);

/// Relabels emitter tags to the canonical 1..k assignment (identical
/// emitters make expectation values tag-permutation invariant).
Monomial canonicalize(Monomial m);

/// Hermitian conjugate of a monomial (also normal-ordered).
Monomial adjoint(const Monomial& m);

// -- derivation ------------------------------------------------------------

/// Exact (unclosed) adjoint-equation hierarchy up to second order:
/// d<X>/dt as a linear combination of moments up to third order, with the
/// identical-emitter reduction already applied (tags 1,2 and factors of N).
struct ExactHierarchy {
  ModelSpec spec;
  std::vector<Monomial> variables;
  std::vector<Polynomial> rhs;

  int index_of(const Monomial& m) const;  // -1 if absent
};

ExactHierarchy derive_eom(const ModelSpec& spec);

/// The second-order cumulant expansion of a normal-ordered triple product:
/// <opq> ~ <o><pq> + <p><oq> + <q><op> - 2<o><p><q>.
MomentExpr cumulant_close(const Monomial& third_order);

/// Closed polynomial ODE system over the second-order variable set.
struct MeanFieldSystem {
  ModelSpec spec;
  std::vector<Monomial> variables;

  struct Term {
    Complex coeff;
    std::vector<int> vars;  // product over variable indices (may be empty)
  };
  std::vector<std::vector<Term>> rhs;

  long dim() const { return static_cast<long>(variables.size()); }
  int index_of(const Monomial& m) const;
  void eval(const VecC& y, VecC& out) const;
  void jacobian(const VecC& y, MatC& out) const;
  /// Largest coefficient magnitude on any rhs; the natural 1/s scale that
  /// makes the steady-state criterion max|rhs| < tol * scale * max|y|
  /// dimensionally meaningful.
  double rate_scale() const;
  /// Plain-text listing of every equation for audit.
  std::string to_text() const;

  void build_index();

 private:
  std::vector<int> sorted_;  // variable indices in Monomial order
};

MeanFieldSystem close_system(const ExactHierarchy& hierarchy);
/// derive_eom + close_system.
MeanFieldSystem build_mean_field(const ModelSpec& spec);

// -- initial assignments ----------------------------------------------------

/// Uncorrelated product state: level populations `pops` per emitter,
/// cavity in vacuum, no coherences.
VecC uncorrelated_assignment(const MeanFieldSystem& system,
                             const std::vector<double>& pops);
VecC ground_assignment(const MeanFieldSystem& system);

/// Checks conjugation consistency and population normalization.
void validate_assignment(const MeanFieldSystem& system, const VecC& y,
                         double tol = 1e-9);

// -- integration -------------------------------------------------------------

struct IntegrateResult {
  VecC state;
  double t = 0.0;
  bool steady = false;
  double residual = 0.0;
  bool converged = true;  // false when t_end hit without steady detection
};

/// Adaptive stiff integration to steady state (max|rhs| < steady_rtol *
/// max|var|) or t_end; non-convergence is flagged, not thrown.
IntegrateResult integrate(const MeanFieldSystem& system, const VecC& init,
                          double t_end, const OdeOptions& options = {});

/// Trajectory sampling variant.
IntegrateResult integrate_sampled(
    const MeanFieldSystem& system, const VecC& init, double t_end,
    std::span<const double> sample_times,
    const std::function<void(size_t, double, const VecC&)>& on_sample,
    const OdeOptions& options = {});

// -- observables --------------------------------------------------------------

Complex value_of(const MeanFieldSystem& system, const VecC& y, const Monomial& m);

/// Mean photon number <adag a>.
double photon_number(const MeanFieldSystem& system, const VecC& y);
/// Population of a level, <sigma^{ll}>.
double level_population(const MeanFieldSystem& system, const VecC& y, Level level);

struct DickeNumbers {
  double jbar = 0.0;
  double mbar = 0.0;
};

/// Collective quantum numbers (Jbar, Mbar) of the two cavity-coupled levels
/// from first- and second-order moments supplied by `lookup`.
DickeNumbers dicke_numbers(const ModelSpec& spec,
                           const std::function<Complex(const Monomial&)>& lookup);
DickeNumbers dicke_numbers(const MeanFieldSystem& system, const VecC& y);

// -- regression spectrum -------------------------------------------------------

struct MfSpectrum {
  std::vector<double> omegas;   // rad/s relative to the rotating frame
  std::vector<double> samples;  // S(omega)
  std::vector<Complex> correlator;  // <adag(tau) a(0)> on the tau grid
  std::vector<double> taus;
  bool window_warning = false;  // correlator not decayed below 1e-4
};

/// Steady-state emission spectrum via the quantum regression theorem at the
/// mean-field level: the two-time correlator set <X(tau) a> obeys the same
/// closed equations linearized around the steady state; S(omega) =
/// 2 kappa Re integral dtau e^{-i omega tau} <adag(tau) a>.
MfSpectrum mf_spectrum(const MeanFieldSystem& system, const VecC& steady,
                       std::span<const double> taus,
                       std::span<const double> omegas);

}  // namespace nvsr::cumulant
