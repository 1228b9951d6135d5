#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qmetric {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-10;

inline constexpr Complex kI{0.0, 1.0};

}  // namespace qmetric
