#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace aoisim {

// Math conventions used across the library:
// - horizontal positions are Vec2 in meters, the origin at the area's corner
// - rates are bits per millisecond, times in milliseconds, CPU in cycles/ms
// - ages are integer slot counts
using Vec2 = Eigen::Vector2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using MatB = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using AgeVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

}  // namespace aoisim
