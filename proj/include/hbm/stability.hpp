#pragma once

#include <Eigen/Core>
#include <vector>

#include "hbm/field.hpp"
#include "hbm/forms.hpp"

namespace hbm {

// R_K(L) = int (-L_K z) z dV_K with z = h_L/h_K; identically the assembled
// stiffness form applied to z.
double rkl(const SupportField& K, const SupportField& L);
double rkl(const OperatorForms& k_forms, const SupportField& K, const SupportField& L);

double variance_ratio(const OperatorForms& k_forms, const SupportField& K,
                      const SupportField& L);  // Var_{dV_K}(h_L/h_K)

// Stability margins (>= 0 certifies the inequality):
//   minkowski2: V(L,K,..)^2/V(K) - V(L,L,K,..) - (1-p)/(n-p) R_K(L)
//               and the weaker variance form with (1-p)/(n-1) Var.
//   isoperimetric: P_L(K)^2 - (n V(L)^{1/n} V(K)^{(n-1)/n})^2
//                  - n^2 (1-p)/(n-p) V(K) R_K(L)
//   bm: V(K+L)^{1/n}/(V(K)^{1/n}+V(L)^{1/n}) - 1 - 2 (1-p)/(n-p) R_{K+L}(K)/V(K+L)
std::pair<double, double> minkowski2_margins(const SupportField& K, const SupportField& L,
                                             double p);
double isoperimetric_margin(const SupportField& K, const SupportField& L, double p);
double bm_margin(const SupportField& K, const SupportField& L, double p);

// planar polygon machinery
using Polygon = std::vector<Eigen::Vector2d>;
Polygon polygonize(const Body& body, int segments = 4096);
Polygon polygonize(const SupportField& field);
Polygon clip_convex(const Polygon& subject, const Polygon& clip);
Polygon minkowski_sum(const Polygon& a, const Polygon& b);
double polygon_support(const Polygon& poly, const Eigen::Vector2d& direction);

// delta, beta, A, sigma for a planar pair (A's translation search is a grid
// refine; the reported value is an upper bound on the infimum).
struct DeficitReport {
    double delta;
    double beta;
    double asymmetry;
    double sigma;
};
DeficitReport deficits(const Polygon& K, const Polygon& L);

struct BonnesenReport {
    double lhs;            // P_L(K)^2 / V(K)
    double rhs_classical;  // 4V(L) + V(L)^2/V(K) (R-r)^2
    double rhs_local;      // 4V(L) + 2(1-p)/(2-p) max(8/V(K°)(1/r-1/R)^2, 8/V(L°) log^2(R/r))
    double inradius, outradius;  // r, R with rL ⊆ K ⊆ RL
    double polar_area_k, polar_area_l;
    bool local_bound_larger;
};
BonnesenReport bonnesen_compare(const SupportField& K, const SupportField& L, double p = 0.0);

// full per-pair report for the CLI
struct StabilityReport {
    double vol_k, vol_l;
    double v_lk, v_llk;
    double r_kl, variance;
    double p_used;
    double margin_minkowski2_r, margin_minkowski2_var;
    double margin_isoperimetric, margin_bm;
    DeficitReport def;
    BonnesenReport bon;
};
StabilityReport stability_report(const SupportField& K, const SupportField& L, double p);

}  // namespace hbm
