#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "nvsr/error.hpp"
#include "nvsr/types.hpp"

namespace nvsr {

/// Ordered list of subsystem dimensions of a tensor-product Hilbert space.
/// Subsystem ordering is fixed as [emitter 1, ..., emitter N, cavity] so
/// basis indices are reproducible across backends.
class SpaceSignature {
 public:
  SpaceSignature() = default;
  explicit SpaceSignature(std::vector<int> dims);
  SpaceSignature(std::initializer_list<int> dims)
      : SpaceSignature(std::vector<int>(dims)) {}

  int subsystems() const { return static_cast<int>(dims_.size()); }
  int dim(int slot) const;
  long total() const { return total_; }
  const std::vector<int>& dims() const { return dims_; }
  std::string to_string() const;

  bool operator==(const SpaceSignature& other) const {
    return dims_ == other.dims_;
  }

 private:
  std::vector<int> dims_;
  long total_ = 1;
};

/// Sparse operator tagged with the signature of the space it acts on.
/// Immutable after construction; safe to share across threads.
class Operator {
 public:
  Operator(SpaceSignature sig, SpMat matrix);

  static Operator identity(const SpaceSignature& sig);
  static Operator zero(const SpaceSignature& sig);

  const SpaceSignature& signature() const { return sig_; }
  const SpMat& matrix() const { return mat_; }
  long dim() const { return sig_.total(); }

  Operator adjoint() const;
  Complex trace() const;

  Operator operator*(const Operator& rhs) const;  // compose
  Operator operator+(const Operator& rhs) const;
  Operator operator-(const Operator& rhs) const;
  Operator operator*(Complex scalar) const;
  friend Operator operator*(Complex scalar, const Operator& op) {
    return op * scalar;
  }

 private:
  SpaceSignature sig_;
  SpMat mat_;
};

/// Photon annihilation operator on a Fock space truncated to n_max states
/// |0>..|n_max-1>: entries (n-1, n) = sqrt(n).
Operator annihilation(int n_max);

/// Adjoint of annihilation.
Operator creation(int n_max);

/// Photon number operator a^dag a.
Operator number_operator(int n_max);

/// Emitter transition operator |to><from| on a `levels`-dimensional space;
/// a projection when from == to.
Operator transition(int levels, int from, int to);

/// Projection |level><level|.
Operator projection(int levels, int level);

/// Kronecker lift of a single-subsystem operator into slot `slot` of the
/// product space described by `sig` (identity on all other slots).
Operator embed(const Operator& op, int slot, const SpaceSignature& sig);

/// Density state on a product space. Solvers keep trace within 1e-9,
/// Hermiticity within 1e-9 and eigenvalues above -1e-7.
class DensityState {
 public:
  DensityState(SpaceSignature sig, MatC rho);

  /// Pure state |index><index| in the product basis.
  static DensityState pure(const SpaceSignature& sig, long basis_index);
  static DensityState maximally_mixed(const SpaceSignature& sig);
  /// Unvectorize a column-stacked density vector.
  static DensityState from_vector(const SpaceSignature& sig, const VecC& v);

  const SpaceSignature& signature() const { return sig_; }
  const MatC& matrix() const { return rho_; }

  Complex expect(const Operator& op) const;
  double trace_error() const;         // |tr(rho) - 1|
  double hermiticity_defect() const;  // max |rho - rho^dag|
  double min_eigenvalue() const;      // smallest eigenvalue of (rho+rho^dag)/2

  /// Throws ValidationError if a state invariant is violated.
  void validate(double trace_tol = 1e-9, double herm_tol = 1e-9,
                double positivity_slack = 1e-7) const;

  /// Column-stacked vectorization.
  VecC vectorized() const;

 private:
  SpaceSignature sig_;
  MatC rho_;
};

}  // namespace nvsr
