#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "hbm/common.hpp"
#include "hbm/grid.hpp"

namespace hbm {

using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

// An origin-symmetric convex body described through its support function
// h(x) = max_{y in K} <x,y>, handled as a 1-homogeneous function on R^n.
// support_hessian returns the ambient Hessian of that extension ((-1)-
// homogeneous); bodies without a closed form fall back to 4th-order central
// differences with step 1e-4*|x|.
class Body {
  public:
    virtual ~Body() = default;
    virtual int dim() const = 0;
    virtual double support(const Vec3& x) const = 0;
    virtual Vec3 support_gradient(const Vec3& x) const;
    virtual Mat3 support_hessian(const Vec3& x) const;
    virtual bool analytic() const { return true; }
    virtual std::string describe() const = 0;
    // smallest admissible angular distance to a coordinate axis (0 = none)
    virtual double singular_axis_clearance() const { return 0.0; }
    // bodies whose curvature has integrable singularities (l_q, q != 2) are
    // sampled through per-cell curvature averages on S^1, realizing a
    // C-approximating regularization that keeps the spike mass
    virtual bool curvature_cell_average() const { return false; }
};

using BodyPtr = std::shared_ptr<const Body>;

BodyPtr make_ball(int dim, double radius = 1.0);
BodyPtr make_ellipsoid(const std::vector<double>& semi_axes);
BodyPtr make_lq(int dim, double q);
BodyPtr make_linear_image(BodyPtr base, const Eigen::MatrixXd& matrix);
// Even cosine-series support h(phi) = c0 + sum_k [a_k cos(2k phi) + b_k sin(2k phi)]
// composed with an ellipse part; used by the random planar corpus.
BodyPtr make_trig_body(double a, double b, double rotation,
                       const std::vector<double>& cos_coeff,
                       const std::vector<double>& sin_coeff);
// Per-node support samples on a declared grid (from "support:<path>" files).
BodyPtr make_sampled(GridPtr grid, const Eigen::VectorXd& h_values);
// Polytope given by its vertex list; h(x) = max_v <x,v>.
BodyPtr make_polytope(int dim, std::vector<Vec3> vertices);

// Body DSL:
//   ball[:r=<f>] | ellipsoid:a=<f>,b=<f>[,c=<f>] | lq:q=<f>
//   | linimg:(<body>):m=<f,f,...>   (row-major dim x dim)
//   | support:<path>                (one "<node-index>,<h>" pair per line)
// Parse errors carry byte offsets. `dim` disambiguates dimension-agnostic
// kinds (ball, lq); `grid` is required by support:<path>.
BodyPtr parse_body(const std::string& dsl, int dim, GridPtr grid = nullptr);

// theta must be unit up to 1e-12.
double eval_support(const Body& body, const Vec3& theta);

// Restriction of the ambient Hessian of the 1-homogeneous extension to the
// tangent space at theta, in the deterministic frame of tangent_frame()
// (n=2: the scalar h'' + h).
Mat2 eval_d2h(const Body& body, const Vec3& theta);

// 4th-order central-difference ambient Hessian of the 1-homogeneous
// extension; the independent cross-check for analytic Hessians.
Mat3 fd_support_hessian(const Body& body, const Vec3& x, double step_rel = 1e-4);

}  // namespace hbm
