#pragma once

#include <Eigen/Core>
#include <memory>

#include "hbm/body.hpp"
#include "hbm/grid.hpp"

namespace hbm {

// Per-node values of h, its tangential derivatives and the tangent-frame
// tensor D^2 h = Hess_{S^{n-1}} h + h*delta for a body on a grid.
// n=3 additionally carries one centroid sample per triangle (in the
// centroid's tangent frame); the bilinear forms quadrature there.
struct SupportField {
    GridPtr grid;
    Eigen::VectorXd h;

    // tangential gradient per node: n=2 stores h' in grad1; n=3 the two
    // frame components <grad h, t1>, <grad h, t2>
    Eigen::VectorXd grad1, grad2;

    // D2h per node: n=2 scalar (h''+h) in d2_a; n=3 symmetric [a b; b c]
    Eigen::VectorXd d2_a, d2_b, d2_c;

    // n=3 quadrature data per triangle (centroid direction frame)
    Eigen::VectorXd tri_h, tri_d2a, tri_d2b, tri_d2c;

    enum class Source { analytic, finite_difference };
    Source source = Source::analytic;
    double fd_step = 0.0;
    double min_d2h_eigenvalue = 0.0;

    int node_count() const { return int(h.size()); }
    int dim() const { return grid->dim; }
};

// Evaluates the body at every node (and triangle centroid), then validates
// the field invariants: h > 0, D2h positive definite, antipodal evenness.
// Violations raise NumericError naming the worst node.
SupportField sample_field(const Body& body, GridPtr grid);

// Support functions add under Minkowski sum; all stored data is linear in h.
SupportField field_add(const SupportField& a, const SupportField& b);
SupportField field_scale(const SupportField& a, double c);

// Nodewise ratio h_L / h_K (the test-function z of the spectral theory).
Eigen::VectorXd field_ratio(const SupportField& num, const SupportField& den);

}  // namespace hbm
