#include "nvsr/liouville.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace nvsr {

SpMat spre(const SpMat& a) {
  SpMat eye(a.rows(), a.cols());
  eye.setIdentity();
  return Eigen::kroneckerProduct(eye, a).eval();
}

SpMat spost(const SpMat& a) {
  SpMat eye(a.rows(), a.cols());
  eye.setIdentity();
  SpMat at = SpMat(a.transpose());
  return Eigen::kroneckerProduct(at, eye).eval();
}

SpMat sandwich(const SpMat& o) {
  SpMat oc = o.conjugate();
  return Eigen::kroneckerProduct(oc, o).eval();
}

SpMat dissipator(const Operator& o) {
  const SpMat& m = o.matrix();
  SpMat odo = SpMat(m.adjoint() * m);
  return SpMat(0.5 * (spre(odo) + spost(odo)) - sandwich(m));
}

SpMat hamiltonian_part(const Operator& h) {
  const SpMat defect = SpMat(h.matrix() - SpMat(h.matrix().adjoint()));
  double max_defect = 0.0;
  for (int k = 0; k < defect.outerSize(); ++k)
    for (SpMat::InnerIterator it(defect, k); it; ++it)
      max_defect = std::max(max_defect, std::abs(it.value()));
  if (max_defect > 1e-10)
    throw ValidationError("hamiltonian_part: operator is not Hermitian (defect " +
                          std::to_string(max_defect) + ")");
  return SpMat(-kI * (spre(h.matrix()) - spost(h.matrix())));
}

SpaceSignature product_signature(const ModelSpec& spec) {
  std::vector<int> dims(static_cast<size_t>(spec.n_emitters), spec.levels());
  dims.push_back(spec.n_max);
  return SpaceSignature(std::move(dims));
}

Operator lifted_transition(const ModelSpec& spec, int emitter, Level a, Level b) {
  if (emitter < 0 || emitter >= spec.n_emitters)
    throw DimensionError("emitter index out of range");
  const int levels = spec.levels();
  const Operator local =
      transition(levels, level_index(spec.scheme, b), level_index(spec.scheme, a));
  return embed(local, emitter, product_signature(spec));
}

Operator lifted_annihilation(const ModelSpec& spec) {
  return embed(annihilation(spec.n_max), spec.n_emitters, product_signature(spec));
}

Liouvillian build_qme(const ModelSpec& raw, long superop_budget) {
  const ModelSpec spec = validate(raw);
  const SpaceSignature sig = product_signature(spec);
  const long dim = sig.total();
  if (dim * dim > superop_budget)
    throw CapacityError(
        "product space " + sig.to_string() + " needs a " + std::to_string(dim) +
        "^2 superoperator, over budget; use the dicke backend (two-level) or "
        "the mean-field backend");

  const bool has_branch2 = spec.scheme == LevelScheme::FiveLevel;
  const bool has_singlet = spec.scheme != LevelScheme::TwoLevel;

  const Operator a = lifted_annihilation(spec);
  Operator h = Operator::zero(sig);

  // H_c in the rotating frame.
  h = h + spec.omega_c * (a.adjoint() * a);

  for (int i = 0; i < spec.n_emitters; ++i) {
    const double extra = spec.detuning_overrides.empty()
                             ? 0.0
                             : spec.detuning_overrides[static_cast<size_t>(i)];
    const Operator p_g1 = lifted_transition(spec, i, Level::G1, Level::G1);
    const Operator p_e1 = lifted_transition(spec, i, Level::E1, Level::E1);
    h = h + Complex(0.5 * (spec.omega_e1g1 + extra), 0.0) * (p_e1 - p_g1);
    if (has_branch2) {
      const Operator p_g2 = lifted_transition(spec, i, Level::G2, Level::G2);
      const Operator p_e2 = lifted_transition(spec, i, Level::E2, Level::E2);
      h = h + Complex(0.5 * (spec.omega_e2g2 + extra), 0.0) * (p_e2 - p_g2);
    }

    // Tavis-Cummings coupling; both optical branches share the same g.
    Operator raise = lifted_transition(spec, i, Level::E1, Level::G1);
    if (has_branch2)
      raise = raise + lifted_transition(spec, i, Level::E2, Level::G2);
    h = h + Complex(spec.g, 0.0) * (raise * a + a.adjoint() * raise.adjoint());
  }

  SpMat l = hamiltonian_part(h);
  l -= spec.kappa * dissipator(a);

  for (int i = 0; i < spec.n_emitters; ++i) {
    const auto sigma = [&](Level x, Level y) {
      return lifted_transition(spec, i, x, y);
    };
    l -= spec.gamma_e1g1 * dissipator(sigma(Level::G1, Level::E1));
    l -= spec.gamma_g1e1 * dissipator(sigma(Level::E1, Level::G1));
    l -= (spec.chi_e1g1 / 2.0) *
         dissipator(sigma(Level::E1, Level::E1) - sigma(Level::G1, Level::G1));
    if (has_branch2) {
      l -= spec.gamma_e2g2 * dissipator(sigma(Level::G2, Level::E2));
      l -= spec.gamma_g2e2 * dissipator(sigma(Level::E2, Level::G2));
      // The e2/g2 dephasing line uses chi_e2g2; the source text reuses the
      // e1 symbol there, treated as a typo.
      l -= (spec.chi_e2g2 / 2.0) *
           dissipator(sigma(Level::E2, Level::E2) - sigma(Level::G2, Level::G2));
    }
    if (has_singlet) {
      l -= spec.gamma_e1m * dissipator(sigma(Level::M, Level::E1));
      l -= spec.gamma_mg1 * dissipator(sigma(Level::G1, Level::M));
      if (has_branch2) {
        l -= spec.gamma_e2m * dissipator(sigma(Level::M, Level::E2));
        l -= spec.gamma_mg2 * dissipator(sigma(Level::G2, Level::M));
      }
    }
  }

  l.makeCompressed();
  return Liouvillian{sig, std::move(l), spec};
}

VecC vectorized_trace_row(const SpaceSignature& sig) {
  const long d = sig.total();
  VecC row = VecC::Zero(d * d);
  for (long i = 0; i < d; ++i) row(i * d + i) = 1.0;
  return row;
}

double trace_preservation_defect(const Liouvillian& liouvillian) {
  const VecC row = vectorized_trace_row(liouvillian.signature);
  const VecC defect = liouvillian.matrix.adjoint() * row;
  return defect.cwiseAbs().maxCoeff();
}

}  // namespace nvsr
