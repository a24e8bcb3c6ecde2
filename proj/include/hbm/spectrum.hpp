#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hbm/body.hpp"
#include "hbm/field.hpp"
#include "hbm/forms.hpp"
#include "hbm/wulff.hpp"

namespace hbm {

// Eigendata of -L_K on the grid (generalized problem stiffness vs mass).
struct SpectralReport {
    Eigen::VectorXd eigenvalues;  // ascending
    Eigen::MatrixXd eigenvectors; // node space (unfolded when even_restricted),
                                  // mass-normalized columns
    bool even_restricted = false;
    std::string grid_descriptor;
    std::string solver;  // "dense" | "lanczos"
    double residual = 0.0;
    int iterations = 0;

    double lambda0() const { return eigenvalues[0]; }
    // first eigenvalue above the constant mode
    double gap() const { return eigenvalues[1]; }
    // count of eigenvalues within tol of 1
    int lambda1_cluster(double tol) const;
    // first eigenvalue above the 1-cluster
    double lambda_above_cluster(double tol) const;
};

// k smallest generalized eigenpairs; even_only reduces to the antipodal
// quotient first. Dense below `dense_limit` unknowns, shift-invert block
// Lanczos above.
SpectralReport solve_spectrum(const OperatorForms& forms, int k, bool even_only,
                              int dense_limit = 2600);

double lambda_1e(const Body& body, GridPtr grid);
double p_star(const Body& body, GridPtr grid);  // n - (n-1) lambda_1e

// Max relative discrepancy of the first k eigenvalues between K and T(K),
// both sampled on the same grid construction.
double equivariance_check(const Body& body, const Eigen::MatrixXd& t, GridPtr grid, int k);

// V(zh;1)^2/V - (n-1)/(n-p) V(zh;2) - (1-p)/(n-p) V(z^2 h;1); >= 0 certifies
// the second L^p-Minkowski inequality for this z (projected even first).
double second_p_minkowski_margin(const SupportField& K, const Eigen::VectorXd& z, double p);
double second_p_minkowski_margin(const OperatorForms& forms, const SupportField& K,
                                 const Eigen::VectorXd& z, double p);

// Discrete concavity check of lambda -> (1/p) V(K_lambda)^{p/n} (log V at
// p=0) along the p-Minkowski interpolation, with per-lambda Wulff support
// flags.
struct GeodesicRow {
    double lambda;
    double vol;
    double g;
    bool wulff_is_support_flag;
    double support_gap;
};
struct GeodesicReport {
    std::vector<GeodesicRow> rows;
    double max_second_difference;  // concave iff <= tol
    double min_second_difference;
    double tol;
    bool concave;
};
GeodesicReport geodesic_concavity(const Body& k0, const Body& k1, double p, int m_lambda,
                                  GridPtr grid);

}  // namespace hbm
