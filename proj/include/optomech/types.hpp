#pragma once

#include <complex>

#include <Eigen/Dense>

namespace optomech {

using cplx = std::complex<double>;

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using CMat6 = Eigen::Matrix<cplx, 6, 6>;
using CVec6 = Eigen::Matrix<cplx, 6, 1>;

}  // namespace optomech
