#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <string>

#include "hbm/field.hpp"

namespace hbm {

// Quadratic forms of the spectral problem on node vectors:
//   stiffness(z,z) = int (-L_K z) z dV_K
//                  = 1/(n(n-1)) int h^2 <adj(D2h) grad z, grad z> dtheta
//   mass(z,z)      = int z^2 dV_K,  dV_K = (1/n) h det(D2h) dtheta
// n=2 uses quadratic elements on node pairs with 3-point Gauss quadrature
// and the consistent mass; n=3 uses P1 triangle gradients with centroid
// coefficients and the lumped (diagonal) vertex mass.
struct OperatorForms {
    GridPtr grid;
    int n = 2;  // ambient dimension
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> mass;
    bool mass_diagonal = false;
    double volume = 0.0;  // 1' M 1 = V(K)
    std::string body_tag;
};

OperatorForms assemble(const SupportField& field);

double dirichlet_form(const OperatorForms& f, const Eigen::VectorXd& z);
double mass_bilinear(const OperatorForms& f, const Eigen::VectorXd& z1,
                     const Eigen::VectorXd& z2);
double mass_integral(const OperatorForms& f, const Eigen::VectorXd& z);  // int z dV_K

// Restriction of both forms to the antipodally-even subspace by node
// identification (representatives j < antipode(j)).
struct FoldedForms {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> mass;
    EvenQuotient quotient;
};
FoldedForms fold_even(const OperatorForms& f);

}  // namespace hbm
