#pragma once

#include <complex>
#include <Eigen/Core>

namespace strh2 {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr Complex imag_unit{0.0, 1.0};

}  // namespace strh2
