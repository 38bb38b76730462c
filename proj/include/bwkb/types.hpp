#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace bwkb {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr Real kPi = std::numbers::pi_v<Real>;
inline constexpr Complex kI{0.0, 1.0};

}  // namespace bwkb
