#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace nearlattice {

/// Positions are always stored with three components; planar data keeps z = 0.
using Point = Eigen::Vector3d;

/// Integer period offsets (multiples of n * t_k). Unused axes stay 0.
using Offset = Eigen::Vector3i;

/// d x d matrix with d in {2, 3}; fixed capacity, no heap allocation.
using SquareMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

/// Guard band applied to every strict inequality on lengths and volumes.
inline constexpr double kStrictGuard = 1e-12;

}  // namespace nearlattice
