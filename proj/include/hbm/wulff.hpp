#pragma once

#include <Eigen/Core>
#include <vector>

#include "hbm/field.hpp"
#include "hbm/grid.hpp"

namespace hbm {

// Aleksandrov body A[w] = intersection over grid nodes of {x : <x,theta_j> <= w_j},
// computed as the polar of the convex hull of {theta_j / w_j}.
struct WulffResult {
    GridPtr grid;
    std::vector<Vec3> vertices;   // polygon loop (CCW) for n=2; vertex cloud for n=3
    Eigen::VectorXd h_resampled;  // max over vertices of <theta_j, v>
    double volume = 0.0;
};

WulffResult wulff_body(GridPtr grid, const Eigen::VectorXd& w);

// Nodewise Wulff values ((1-lambda) h0^p + lambda h1^p)^(1/p); geometric mean
// at p=0 (separate branch, never a numerical limit). Endpoints are returned
// exactly.
Eigen::VectorXd p_combination(const SupportField& h0, const SupportField& h1, double lambda,
                              double p);

struct WulffSupportCheck {
    bool is_support;
    double max_rel_gap;  // max_j (w_j - h_{A[w]}(theta_j)) / w_j
    int worst_node;
};

WulffSupportCheck wulff_is_support(GridPtr grid, const Eigen::VectorXd& w, double tol);

// convex-hull helpers (exposed for oracles and the stability module)
// 2D: indices of hull vertices in CCW order, collinearity epsilon 1e-12,
// lexicographic tie-breaking.
std::vector<int> convex_hull_2d(const std::vector<Eigen::Vector2d>& points);
double polygon_area(const std::vector<Eigen::Vector2d>& loop);

// 3D: triangulated hull facets (outward orientation).
std::vector<std::array<int, 3>> convex_hull_3d(const std::vector<Vec3>& points);

}  // namespace hbm
