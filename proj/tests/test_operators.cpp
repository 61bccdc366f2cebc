#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "nvsr/operators.hpp"

using namespace nvsr;

namespace {

MatC random_matrix(long n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatC m(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) m(i, j) = Complex(u(rng), u(rng));
  return m;
}

SpMat to_sparse(const MatC& m) {
  return m.sparseView();
}

// Dense Kronecker product, the oracle for embed.
MatC dense_kron(const MatC& a, const MatC& b) {
  MatC out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

TEST_CASE("annihilation operator entries") {
  const Operator a2 = annihilation(2);
  CHECK(a2.matrix().nonZeros() == 1);
  CHECK(a2.matrix().coeff(0, 1) == Complex(1.0, 0.0));

  const Operator a4 = annihilation(4);
  CHECK(a4.matrix().nonZeros() == 3);
  for (int n = 1; n < 4; ++n)
    CHECK(std::abs(a4.matrix().coeff(n - 1, n) - Complex(std::sqrt(double(n)), 0.0)) ==
          doctest::Approx(0.0));

  CHECK_THROWS_AS(annihilation(0), DimensionError);
}

TEST_CASE("a a^dag - a^dag a is identity below the truncation edge") {
  const int n_max = 6;
  const Operator a = annihilation(n_max);
  const Operator comm = a * a.adjoint() - a.adjoint() * a;
  for (int n = 0; n < n_max - 1; ++n)
    CHECK(std::abs(comm.matrix().coeff(n, n) - Complex(1.0, 0.0)) < 1e-14);
  // Truncation artifact on the last diagonal entry, everything else zero.
  for (int n = 0; n < n_max; ++n)
    for (int m = 0; m < n_max; ++m)
      if (n != m) CHECK(std::abs(comm.matrix().coeff(n, m)) < 1e-14);
}

TEST_CASE("transition operators contract and complete") {
  const int levels = 5;
  // sigma^{ab} sigma^{cd} = delta_{bc} sigma^{ad}; compose checks one case:
  // transition(levels, a=e1 index 2, b=g1 index 0) etc.
  const Operator lower = transition(levels, 2, 0);  // |g1><e1|
  const Operator raise = transition(levels, 0, 2);  // |e1><g1|
  const Operator proj_g1 = lower * raise;           // applied right-to-left
  CHECK((proj_g1.matrix() - projection(levels, 0).matrix()).norm() < 1e-15);

  // compose(transition(L,a,b), transition(L,c,a)) = transition(L,c,b)
  const Operator t_ab = transition(levels, 3, 1);  // |1><3|
  const Operator t_ca = transition(levels, 4, 3);  // |3><4|
  const Operator prod = t_ab * t_ca;
  CHECK((prod.matrix() - transition(levels, 4, 1).matrix()).norm() < 1e-15);

  Operator sum = Operator::zero(SpaceSignature({levels}));
  for (int l = 0; l < levels; ++l) sum = sum + projection(levels, l);
  CHECK((sum.matrix() - Operator::identity(SpaceSignature({levels})).matrix()).norm() <
        1e-15);

  CHECK_THROWS_AS(transition(5, 5, 0), DimensionError);
  CHECK_THROWS_AS(transition(5, 0, -1), DimensionError);
}

TEST_CASE("embed matches the dense Kronecker oracle") {
  const SpaceSignature sig({2, 3});
  const Operator lower = annihilation(2);
  const Operator lifted = embed(lower, 0, sig);
  CHECK(lifted.matrix().nonZeros() == 3);

  MatC dense_a = MatC(lower.matrix());
  MatC expected = dense_kron(dense_a, MatC::Identity(3, 3));
  CHECK((MatC(lifted.matrix()) - expected).norm() < 1e-15);

  const Operator b = annihilation(3);
  const Operator lifted_b = embed(b, 1, sig);
  MatC expected_b = dense_kron(MatC::Identity(2, 2), MatC(b.matrix()));
  CHECK((MatC(lifted_b.matrix()) - expected_b).norm() < 1e-15);

  // embed(identity) = identity
  const Operator eye = embed(Operator::identity(SpaceSignature({3})), 1, sig);
  CHECK((eye.matrix() - Operator::identity(sig).matrix()).norm() < 1e-15);

  // disjoint-slot embeds commute
  const Operator ab = lifted * lifted_b;
  const Operator ba = lifted_b * lifted;
  CHECK((ab.matrix() - ba.matrix()).norm() < 1e-14);

  CHECK_THROWS_AS(embed(annihilation(4), 0, sig), SignatureError);
}

TEST_CASE("adjoint is an involution") {
  const MatC m = random_matrix(7, 11);
  const Operator op(SpaceSignature({7}), to_sparse(m));
  CHECK((MatC(op.adjoint().adjoint().matrix()) - m).norm() < 1e-15);
}

TEST_CASE("identity is neutral for compose") {
  const SpaceSignature sig({4});
  const MatC m = random_matrix(4, 5);
  const Operator op(sig, to_sparse(m));
  const Operator eye = Operator::identity(sig);
  CHECK((MatC((op * eye).matrix()) - m).norm() < 1e-15);
  CHECK((MatC((eye * op).matrix()) - m).norm() < 1e-15);
}

TEST_CASE("compose rejects mismatched signatures") {
  const Operator a = annihilation(3);
  const Operator b = annihilation(4);
  CHECK_THROWS_AS(a * b, SignatureError);
  // Same total dimension but different factorization is still rejected.
  const Operator c(SpaceSignature({2, 2}), to_sparse(random_matrix(4, 2)));
  const Operator d(SpaceSignature({4}), to_sparse(random_matrix(4, 3)));
  CHECK_THROWS_AS(c * d, SignatureError);
}

TEST_CASE("trace is cyclic") {
  const SpaceSignature sig({9});
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Operator a(sig, to_sparse(random_matrix(9, 100 + seed)));
    const Operator b(sig, to_sparse(random_matrix(9, 200 + seed)));
    const Complex tab = (a * b).trace();
    const Complex tba = (b * a).trace();
    CHECK(std::abs(tab - tba) <= 1e-10 * std::max(1.0, std::abs(tab)));
  }
}

TEST_CASE("sparse compose equals dense compose on random 20x20 instances") {
  const SpaceSignature sig({20});
  for (unsigned seed = 0; seed < 4; ++seed) {
    const MatC ma = random_matrix(20, 300 + seed);
    const MatC mb = random_matrix(20, 400 + seed);
    const Operator a(sig, to_sparse(ma));
    const Operator b(sig, to_sparse(mb));
    CHECK((MatC((a * b).matrix()) - ma * mb).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("embed preserves spectra with multiplicity total/dim_k") {
  const SpaceSignature sig({3, 2, 5});  // total 30
  const MatC m = random_matrix(2, 77);
  const Operator op(SpaceSignature({2}), to_sparse(m));
  const Operator lifted = embed(op, 1, sig);

  Eigen::ComplexEigenSolver<MatC> small(m);
  Eigen::ComplexEigenSolver<MatC> big(MatC(lifted.matrix()));
  std::vector<Complex> expected;
  const long copies = sig.total() / 2;
  for (long i = 0; i < 2; ++i)
    for (long c = 0; c < copies; ++c) expected.push_back(small.eigenvalues()(i));
  std::vector<Complex> got(big.eigenvalues().data(),
                           big.eigenvalues().data() + sig.total());
  auto by_parts = [](const Complex& x, const Complex& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  };
  std::sort(expected.begin(), expected.end(), by_parts);
  std::sort(got.begin(), got.end(), by_parts);
  for (size_t i = 0; i < got.size(); ++i)
    CHECK(std::abs(got[i] - expected[i]) < 1e-9);
}

TEST_CASE("density state validation") {
  const SpaceSignature sig({3});
  auto rho = DensityState::maximally_mixed(sig);
  CHECK(rho.trace_error() < 1e-15);
  CHECK(rho.hermiticity_defect() == 0.0);
  CHECK(rho.min_eigenvalue() == doctest::Approx(1.0 / 3.0));
  CHECK_NOTHROW(rho.validate());

  MatC bad = MatC::Identity(3, 3);  // trace 3
  CHECK_THROWS_AS(DensityState(sig, bad).validate(), ValidationError);

  // vectorize/unvectorize round-trip
  const MatC m = random_matrix(3, 9);
  const DensityState s(sig, m);
  const DensityState back = DensityState::from_vector(sig, s.vectorized());
  CHECK((back.matrix() - m).norm() < 1e-15);
}
