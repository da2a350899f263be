#pragma once
#include <complex>
#include <Eigen/Dense>

namespace freelab {

using cx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;

}  // namespace freelab
