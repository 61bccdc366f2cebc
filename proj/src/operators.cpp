#include "nvsr/operators.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace nvsr {

SpaceSignature::SpaceSignature(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DimensionError("signature needs at least one subsystem");
  total_ = 1;
  for (int d : dims_) {
    if (d < 1) throw DimensionError("subsystem dimension must be >= 1");
    total_ *= d;
  }
}

int SpaceSignature::dim(int slot) const {
  if (slot < 0 || slot >= subsystems())
    throw DimensionError("subsystem slot out of range");
  return dims_[static_cast<size_t>(slot)];
}

std::string SpaceSignature::to_string() const {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < dims_.size(); ++i) os << (i ? "," : "") << dims_[i];
  os << "]";
  return os.str();
}

Operator::Operator(SpaceSignature sig, SpMat matrix)
    : sig_(std::move(sig)), mat_(std::move(matrix)) {
  if (mat_.rows() != sig_.total() || mat_.cols() != sig_.total())
    throw SignatureError("operator matrix does not match signature dimension " +
                         sig_.to_string());
  mat_.makeCompressed();
}

Operator Operator::identity(const SpaceSignature& sig) {
  SpMat m(sig.total(), sig.total());
  m.setIdentity();
  return Operator(sig, std::move(m));
}

Operator Operator::zero(const SpaceSignature& sig) {
  return Operator(sig, SpMat(sig.total(), sig.total()));
}

Operator Operator::adjoint() const {
  return Operator(sig_, SpMat(mat_.adjoint()));
}

Complex Operator::trace() const {
  Complex t = 0.0;
  for (int k = 0; k < mat_.outerSize(); ++k)
    for (SpMat::InnerIterator it(mat_, k); it; ++it)
      if (it.row() == it.col()) t += it.value();
  return t;
}

Operator Operator::operator*(const Operator& rhs) const {
  if (!(sig_ == rhs.sig_))
    throw SignatureError("compose rejected: signatures differ (" +
                         sig_.to_string() + " vs " + rhs.sig_.to_string() + ")");
  return Operator(sig_, SpMat(mat_ * rhs.mat_));
}

Operator Operator::operator+(const Operator& rhs) const {
  if (!(sig_ == rhs.sig_)) throw SignatureError("operator sum: signatures differ");
  return Operator(sig_, SpMat(mat_ + rhs.mat_));
}

Operator Operator::operator-(const Operator& rhs) const {
  if (!(sig_ == rhs.sig_)) throw SignatureError("operator difference: signatures differ");
  return Operator(sig_, SpMat(mat_ - rhs.mat_));
}

Operator Operator::operator*(Complex scalar) const {
  return Operator(sig_, SpMat(mat_ * scalar));
}

Operator annihilation(int n_max) {
  if (n_max < 1) throw DimensionError("annihilation: n_max must be >= 1");
  SpMat m(n_max, n_max);
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(n_max));
  for (int n = 1; n < n_max; ++n)
    t.emplace_back(n - 1, n, Complex(std::sqrt(static_cast<double>(n)), 0.0));
  m.setFromTriplets(t.begin(), t.end());
  return Operator(SpaceSignature({n_max}), std::move(m));
}

Operator creation(int n_max) { return annihilation(n_max).adjoint(); }

Operator number_operator(int n_max) {
  if (n_max < 1) throw DimensionError("number_operator: n_max must be >= 1");
  SpMat m(n_max, n_max);
  std::vector<Triplet> t;
  for (int n = 1; n < n_max; ++n) t.emplace_back(n, n, Complex(n, 0.0));
  m.setFromTriplets(t.begin(), t.end());
  return Operator(SpaceSignature({n_max}), std::move(m));
}

Operator transition(int levels, int from, int to) {
  if (levels < 1) throw DimensionError("transition: levels must be >= 1");
  if (from < 0 || from >= levels || to < 0 || to >= levels)
    throw DimensionError("transition: level index out of range");
  SpMat m(levels, levels);
  m.insert(to, from) = 1.0;
  m.makeCompressed();
  return Operator(SpaceSignature({levels}), std::move(m));
}

Operator projection(int levels, int level) {
  return transition(levels, level, level);
}

Operator embed(const Operator& op, int slot, const SpaceSignature& sig) {
  if (slot < 0 || slot >= sig.subsystems())
    throw SignatureError("embed: slot out of range for " + sig.to_string());
  if (op.signature().subsystems() != 1 ||
      op.signature().total() != sig.dim(slot))
    throw SignatureError("embed: operator dimension does not match slot " +
                         std::to_string(slot) + " of " + sig.to_string());
  long left = 1, right = 1;
  for (int s = 0; s < slot; ++s) left *= sig.dim(s);
  for (int s = slot + 1; s < sig.subsystems(); ++s) right *= sig.dim(s);

  SpMat eye_left(left, left), eye_right(right, right);
  eye_left.setIdentity();
  eye_right.setIdentity();
  SpMat lifted =
      Eigen::kroneckerProduct(eye_left, Eigen::kroneckerProduct(op.matrix(), eye_right)
                                            .eval())
          .eval();
  return Operator(sig, std::move(lifted));
}

DensityState::DensityState(SpaceSignature sig, MatC rho)
    : sig_(std::move(sig)), rho_(std::move(rho)) {
  if (rho_.rows() != sig_.total() || rho_.cols() != sig_.total())
    throw SignatureError("density matrix does not match signature " +
                         sig_.to_string());
}

DensityState DensityState::pure(const SpaceSignature& sig, long basis_index) {
  if (basis_index < 0 || basis_index >= sig.total())
    throw DimensionError("pure: basis index out of range");
  MatC rho = MatC::Zero(sig.total(), sig.total());
  rho(basis_index, basis_index) = 1.0;
  return DensityState(sig, std::move(rho));
}

DensityState DensityState::maximally_mixed(const SpaceSignature& sig) {
  MatC rho = MatC::Identity(sig.total(), sig.total()) /
             static_cast<double>(sig.total());
  return DensityState(sig, std::move(rho));
}

DensityState DensityState::from_vector(const SpaceSignature& sig, const VecC& v) {
  const long d = sig.total();
  if (v.size() != d * d)
    throw SignatureError("from_vector: length does not match signature");
  MatC rho(d, d);
  for (long c = 0; c < d; ++c) rho.col(c) = v.segment(c * d, d);
  return DensityState(sig, std::move(rho));
}

Complex DensityState::expect(const Operator& op) const {
  if (!(op.signature() == sig_))
    throw SignatureError("expect: operator signature mismatch");
  return (op.matrix() * rho_).trace();
}

double DensityState::trace_error() const {
  return std::abs(rho_.trace() - Complex(1.0, 0.0));
}

double DensityState::hermiticity_defect() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityState::min_eigenvalue() const {
  MatC h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<MatC> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityState::validate(double trace_tol, double herm_tol,
                            double positivity_slack) const {
  if (trace_error() > trace_tol)
    throw ValidationError("density state trace deviates from 1 by " +
                          std::to_string(trace_error()));
  if (hermiticity_defect() > herm_tol)
    throw ValidationError("density state is not Hermitian (defect " +
                          std::to_string(hermiticity_defect()) + ")");
  const double lambda_min = min_eigenvalue();
  if (lambda_min < -positivity_slack)
    throw ValidationError("density state has negative eigenvalue " +
                          std::to_string(lambda_min));
}

VecC DensityState::vectorized() const {
  const long d = sig_.total();
  VecC v(d * d);
  for (long c = 0; c < d; ++c) v.segment(c * d, d) = rho_.col(c);
  return v;
}

}  // namespace nvsr
