#pragma once

#include <complex>
#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace nvsr {

using Complex = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Complex>;
using SpVec = Eigen::SparseVector<Complex>;
using Triplet = Eigen::Triplet<Complex>;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace nvsr
