#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hbm/field.hpp"
#include "hbm/forms.hpp"

namespace hbm {

// Nodewise density of a Borel measure on the sphere.
struct MeasureField {
    GridPtr grid;
    Eigen::VectorXd density;
    std::string kind;  // "surface_area" | "cone" | "lp_surface(p)"
    double total = 0.0;
};

// dS_K = det(D2h) dtheta
MeasureField surface_density(const SupportField& K);
// dV_K = (1/n) h dS_K; total mass = V(K)
MeasureField cone_density(const SupportField& K);
// dS_{K,p} = h^{1-p} dS_K
MeasureField lp_surface_density(const SupportField& K, double p);

// Mixed discriminant D_m for m in {1,2}: 1x1 inputs give the entry itself,
// 2x2 inputs give (tr A tr B - tr(AB)) / 2.
double mixed_discriminant(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// V(h_1,...,h_n) = (1/n) int h_n S(h_1,...,h_{n-1}) dtheta, quadratured with
// the same nodal rule as the cone mass (Simpson pattern on S^1, lumped
// vertex weights on S^2).
double mixed_volume(const std::vector<const SupportField*>& fields);
double volume(const SupportField& K);

// anisotropic perimeter P_L(K) = n V(L,K,...,K) = int h_L dS_K
double perimeter_aniso(const SupportField& K, const SupportField& L);

// V(w; m) = V(w,...,w, h_K,...,h_K) with w repeated m times, evaluated
// through the operator forms with z = w / h_K:
//   m=1: int z dV_K,   m=2: int z^2 dV_K - stiffness(z,z).
double v_w_m(const Eigen::VectorXd& w, int m, const SupportField& K);
double v_w_m(const OperatorForms& K_forms, const SupportField& K, const Eigen::VectorXd& w,
             int m);

}  // namespace hbm
