#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hbm/field.hpp"

namespace hbm {

// dense bivariate polynomial, coeff(i,j) * x^i y^j
class Poly2 {
  public:
    Poly2() : c_(Eigen::MatrixXd::Zero(1, 1)) {}
    explicit Poly2(Eigen::MatrixXd coeffs) : c_(std::move(coeffs)) {}
    static Poly2 monomial(int i, int j, double v = 1.0);

    int degree() const { return int(c_.rows() + c_.cols()) - 2; }
    double eval(double x, double y) const;
    Poly2 dx() const;
    Poly2 dy() const;
    Poly2 operator*(const Poly2& o) const;
    Poly2 operator+(const Poly2& o) const;
    Poly2 operator-(const Poly2& o) const;
    Poly2 scaled(double s) const;
    const Eigen::MatrixXd& coeffs() const { return c_; }
    bool is_harmonic(double tol = 1e-12) const;

  private:
    Eigen::MatrixXd c_;
};

// Re z^k / Im z^k for k = 1..max_degree, filtered by parity:
//   even          -> k even, both parts
//   all           -> every k, both parts
//   unconditional -> k even, real parts only (invariant under both axis flips)
enum class BasisParity { even, all, unconditional };
std::vector<Poly2> harmonic_basis(int max_degree, BasisParity parity);

// Planar boundary: convex polygon loop (CCW) or smooth body via the
// Weingarten parametrization x(phi) = h theta + h' theta_perp.
struct PlanarBoundary {
    bool smooth = false;
    std::vector<Eigen::Vector2d> polygon;  // CCW loop (polygon mode)
    // smooth mode samples
    Eigen::VectorXd phi, h, hp, d2;  // d2 = h'' + h = 1/curvature

    static PlanarBoundary from_polygon(std::vector<Eigen::Vector2d> loop);
    static PlanarBoundary from_body(const Body& body, int samples = 2048);
    static PlanarBoundary disk_polygon(int samples, double radius = 1.0);
    static PlanarBoundary rectangle(double a, double b);  // [-a,a] x [-b,b]
};

// direction tags keep estimates honest: a report is never "the constant"
struct BoundReport {
    std::string quantity;
    std::string direction;  // "lower" | "upper" | "value"
    double value = 0.0;
    Eigen::VectorXd witness;  // basis coefficients when applicable
    std::string inputs;       // echoed parameters
};

// sup over the harmonic basis span of
//   [int_{dK} u_nu^2 / <x,nu> ds] / [int_K ||Hess u||^2 dx]
// = largest generalized eigenvalue of the two quadratic forms; a lower bound
// on B_H (or B_uncond with the unconditional filter).
BoundReport bh_planar_estimate(const PlanarBoundary& body, const std::vector<Poly2>& basis);

// closed-form quotients: u = |x|^2/2 on any symmetric planar body (exactly
// 1); u = x1^2/2 on the cube B_inf^n (1 + (n-1)/3, any n); quadrature path
// for planar bodies.
BoundReport test_function_quotient_planar(const PlanarBoundary& body, const std::string& u);
BoundReport test_function_quotient_cube(int n, const std::string& u);

// second Steklov operator on the ball: S2|_{H_k} = 2(k+n-2) - (n-1) - (k+n-2)/k
double steklov_ball_eigenvalue(int n, int k);
double bh_ball(int n);  // 2/(n+2)

// explicit bound evaluators (Poincare constants are caller inputs)
double dk_upper_bound(double r, double big_r, double c_poin, int n);
double bh_upper_general(double c_poin, double r, double max_hess_w, double w_range);
double bh_upper_lq(double q, int n, double c_poin, double r = 1.0);
struct QkwReport {
    double value;
    bool less_than_one;
};
QkwReport q_kw(double c_poin, double max_hess_w, double w_range);

// | int (Lap u)^2 - RHS | of the generalized Reilly formula with V = 0 on
// the unit disk or the square [-1,1]^2 (corner second-fundamental-form
// terms included for the square).
enum class ReillyDomain { disk, square };
double reilly_residual(ReillyDomain domain, const Poly2& u);

// boundary form of local p-BM for mean-zero even Psi on a smooth planar body:
//   int <II^{-1} grad_t Psi, grad_t Psi> - int H Psi^2 - (1-p) int Psi^2/<x,nu>
// Mean-zero is enforced by subtracting the multiple of <x,nu(x)> with
// matching boundary integral (the inequality's invariance direction).
double pbm_boundary_form_margin(const SupportField& K, const Eigen::VectorXd& psi, double p);

}  // namespace hbm
