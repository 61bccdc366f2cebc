#pragma once

#include "nvsr/models.hpp"
#include "nvsr/operators.hpp"

namespace nvsr {

// Vectorization is column-stacking throughout: vec(A rho B) =
// (B^T kron A) vec(rho), so superoperator matrices are bit-comparable
// across backends.

/// vec(A rho) = spre(A) vec(rho)
SpMat spre(const SpMat& a);
/// vec(rho A) = spost(A) vec(rho)
SpMat spost(const SpMat& a);
/// vec(o rho o^dag) = sandwich(o) vec(rho)
SpMat sandwich(const SpMat& o);

/// Superoperator of D[o] rho = 1/2 {o^dag o, rho} - o rho o^dag. The master
/// equation enters with -D[o], so assemblers negate this contribution.
SpMat dissipator(const Operator& o);

/// Superoperator of rho -> -i [H, rho]; H must be Hermitian within 1e-10.
SpMat hamiltonian_part(const Operator& h);

/// Assembled master-equation generator on the vectorized product space.
struct Liouvillian {
  SpaceSignature signature;
  SpMat matrix;  // dim^2 x dim^2
  ModelSpec spec;

  long dim() const { return signature.total(); }
};

/// Memory guard for build_qme: (levels^N * n_max)^2 vectorized dimension.
inline constexpr long kDefaultSuperopBudget = 40'000'000;

/// Builds the full product-space Liouvillian of the validated spec:
/// emitter and cavity Hamiltonians, Tavis-Cummings coupling of both optical
/// branches, photon loss, per-emitter emission/pumping/dephasing and the
/// four inter-system-crossing channels.
Liouvillian build_qme(const ModelSpec& spec,
                      long superop_budget = kDefaultSuperopBudget);

/// Product-space signature used by build_qme: [emitter 1..N, cavity].
SpaceSignature product_signature(const ModelSpec& spec);

/// Emitter transition operator sigma^{ab} = |a><b| of one emitter lifted to
/// the product space (levels indexed within the scheme).
Operator lifted_transition(const ModelSpec& spec, int emitter, Level a, Level b);

/// Cavity annihilation operator lifted to the product space.
Operator lifted_annihilation(const ModelSpec& spec);

/// Trace functional as a row vector on the vectorized space:
/// trace(unvec(x)) = trace_row . x.
VecC vectorized_trace_row(const SpaceSignature& sig);

/// Max column-sum defect of trace preservation: the adjoint generator
/// applied to the identity (zero for any proper Lindblad generator).
double trace_preservation_defect(const Liouvillian& liouvillian);

}  // namespace nvsr
