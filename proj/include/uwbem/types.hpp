#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace uwbem {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using BoolMat = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

// Ordered, strictly increasing set of column indexes.
using IndexSet = std::vector<Index>;

// One bit per element, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

}  // namespace uwbem
