#pragma once

#include <cstdint>

#include "hbm/body.hpp"

namespace hbm {

// Random smooth origin-symmetric planar body: an ellipse with bounded even
// trigonometric perturbations, h'' + h > 0 enforced by rejection. Pure
// function of (seed, index) through the counter generator.
BodyPtr random_planar_body(std::uint64_t seed, std::uint64_t index);

// Random planar matrix with condition number in [1, max_cond] (rotation *
// diagonal * rotation), deterministic in (seed, index).
Eigen::Matrix2d random_planar_matrix(std::uint64_t seed, std::uint64_t index, double max_cond);
Eigen::Matrix3d random_spatial_matrix(std::uint64_t seed, std::uint64_t index, double max_cond);

}  // namespace hbm
