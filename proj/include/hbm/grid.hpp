#pragma once

#include <Eigen/Core>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "hbm/common.hpp"

namespace hbm {

using Vec3 = Eigen::Vector3d;

// Discretization of S^1 (offset periodic grid) or S^2 (icosphere mesh) with
// quadrature weights, antipodal pairing and per-node tangent frames.
//
// n = 2: nodes at angles phi_j = 2*pi*(j+1/2)/N, weights 2*pi/N,
//        antipode(j) = j + N/2 mod N.  tangent1 = d(theta)/d(phi).
// n = 3: icosahedron subdivided `level` times, vertices normalized, mesh
//        rotated by the fixed rotation Rz(0.3)*Ry(0.2)*Rx(0.1) so that no
//        vertex is axis aligned.  weights = 1/3 of incident flat-triangle
//        areas.
struct SphereGrid {
    int dim = 2;  // ambient dimension n
    std::vector<Vec3> nodes;
    std::vector<double> weights;
    std::vector<int> antipode;
    std::vector<Vec3> tangent1, tangent2;  // tangent2 empty for n=2

    // n=2 specifics
    std::vector<double> phi;
    double dphi = 0.0;

    // n=3 specifics
    std::vector<std::array<int, 3>> triangles;
    std::vector<double> tri_area;
    std::vector<Vec3> tri_centroid_dir;  // normalized flat centroid
    int level = -1;

    double min_axis_distance = 0.0;  // angular distance of nodes to coord axes

    int node_count() const { return int(nodes.size()); }
    double weight_total() const;
    std::string descriptor() const;  // "s1:N=256" / "s2:L=4"
};

using GridPtr = std::shared_ptr<const SphereGrid>;

// N even, >= 16.
GridPtr build_circle_grid(int n_nodes);

// 0 <= level <= 7.
GridPtr build_icosphere(int level);

GridPtr parse_grid(const std::string& descriptor);

// n=2 midpoint operators: node values -> values at the N dual midpoints
// phi_j + dphi/2.  The derivative is (z_{j+1}-z_j)/dphi.
Eigen::VectorXd midpoint_derivative(const SphereGrid& grid, const Eigen::VectorXd& z);
Eigen::VectorXd midpoint_average(const SphereGrid& grid, const Eigen::VectorXd& z);

// n=3: constant gradient of the piecewise-linear interpolant on triangle t,
// expressed as an ambient vector in the triangle plane.
Vec3 triangle_gradient(const SphereGrid& grid, const Eigen::VectorXd& z, int t);

// P z (theta) = (z(theta) + z(-theta)) / 2.
Eigen::VectorXd even_projection(const SphereGrid& grid, const Eigen::VectorXd& z);

// Quotient structure for the even restriction: representatives are nodes j
// with j < antipode(j); rep_of maps every node to its representative index.
struct EvenQuotient {
    std::vector<int> representative;  // size = node_count/2, node index
    std::vector<int> rep_of;          // size = node_count
};
EvenQuotient even_quotient(const SphereGrid& grid);

// Deterministic orthonormal tangent frame at a unit direction.
void tangent_frame(const Vec3& theta, Vec3& t1, Vec3& t2);

// Mesh dump: one vertex per line "x y z w", one triangle per line "i j k".
std::string dump_mesh(const SphereGrid& grid);

}  // namespace hbm
