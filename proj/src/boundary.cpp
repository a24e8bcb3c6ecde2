#include "hbm/boundary.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace hbm {

// ---------------------------------------------------------------------------
// Poly2

Poly2 Poly2::monomial(int i, int j, double v) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(i + 1, j + 1);
    c(i, j) = v;
    return Poly2(c);
}

double Poly2::eval(double x, double y) const {
    double acc = 0.0;
    for (int i = int(c_.rows()) - 1; i >= 0; --i) {
        double row = 0.0;
        for (int j = int(c_.cols()) - 1; j >= 0; --j) row = row * y + c_(i, j);
        acc = acc * x + row;
    }
    return acc;
}

Poly2 Poly2::dx() const {
    if (c_.rows() <= 1) return Poly2();
    Eigen::MatrixXd d(c_.rows() - 1, c_.cols());
    for (int i = 1; i < c_.rows(); ++i) d.row(i - 1) = double(i) * c_.row(i);
    return Poly2(d);
}

Poly2 Poly2::dy() const {
    if (c_.cols() <= 1) return Poly2();
    Eigen::MatrixXd d(c_.rows(), c_.cols() - 1);
    for (int j = 1; j < c_.cols(); ++j) d.col(j - 1) = double(j) * c_.col(j);
    return Poly2(d);
}

Poly2 Poly2::operator*(const Poly2& o) const {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(c_.rows() + o.c_.rows() - 1,
                                              c_.cols() + o.c_.cols() - 1);
    for (int i = 0; i < c_.rows(); ++i)
        for (int j = 0; j < c_.cols(); ++j) {
            if (c_(i, j) == 0.0) continue;
            for (int k = 0; k < o.c_.rows(); ++k)
                for (int l = 0; l < o.c_.cols(); ++l)
                    p(i + k, j + l) += c_(i, j) * o.c_(k, l);
        }
    return Poly2(p);
}

namespace {
Eigen::MatrixXd padded_sum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double sb) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(std::max(a.rows(), b.rows()),
                                                std::max(a.cols(), b.cols()));
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.topLeftCorner(b.rows(), b.cols()) += sb * b;
    return out;
}
}  // namespace

Poly2 Poly2::operator+(const Poly2& o) const { return Poly2(padded_sum(c_, o.c_, 1.0)); }
Poly2 Poly2::operator-(const Poly2& o) const { return Poly2(padded_sum(c_, o.c_, -1.0)); }
Poly2 Poly2::scaled(double s) const { return Poly2(s * c_); }

bool Poly2::is_harmonic(double tol) const {
    Poly2 lap = dx().dx() + dy().dy();
    return lap.coeffs().cwiseAbs().maxCoeff() <= tol;
}

std::vector<Poly2> harmonic_basis(int max_degree, BasisParity parity) {
    if (max_degree < 1) throw InputError("harmonic_basis: degree must be >= 1");
    std::vector<Poly2> out;
    Poly2 re = Poly2::monomial(1, 0);  // Re z
    Poly2 im = Poly2::monomial(0, 1);  // Im z
    Poly2 x = re, y = im;
    for (int k = 1; k <= max_degree; ++k) {
        if (k > 1) {
            Poly2 re_next = x * re - y * im;
            Poly2 im_next = x * im + y * re;
            re = re_next;
            im = im_next;
        }
        bool keep = (parity == BasisParity::all) || (k % 2 == 0);
        if (!keep) continue;
        out.push_back(re);
        if (parity != BasisParity::unconditional) out.push_back(im);
    }
    if (out.empty()) throw InputError("harmonic_basis: empty basis for this parity/degree");
    return out;
}

// ---------------------------------------------------------------------------
// quadrature tables

namespace {

constexpr double kG8x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                            0.7966664774136267,  0.9602898564975363};
constexpr double kG8w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                            0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                            0.2223810344533745, 0.1012285362903763};

constexpr double kG12x[12] = {-0.9815606342467192, -0.9041172563704749, -0.7699026741943047,
                              -0.5873179542866175, -0.3678314989981802, -0.1252334085114689,
                              0.1252334085114689,  0.3678314989981802,  0.5873179542866175,
                              0.7699026741943047,  0.9041172563704749,  0.9815606342467192};
constexpr double kG12w[12] = {0.0471753363865118, 0.1069393259953184, 0.1600783285433462,
                              0.2031674267230659, 0.2334925365383548, 0.2491470458134028,
                              0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
                              0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

double double_factorial(int n) {
    double acc = 1.0;
    for (int k = n; k > 1; k -= 2) acc *= k;
    return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// PlanarBoundary

PlanarBoundary PlanarBoundary::from_polygon(std::vector<Eigen::Vector2d> loop) {
    if (loop.size() < 3) throw InputError("PlanarBoundary: polygon needs >= 3 vertices");
    double area2 = 0.0;
    const int m = int(loop.size());
    for (int i = 0; i < m; ++i) {
        const auto &a = loop[i], &b = loop[(i + 1) % m];
        area2 += a.x() * b.y() - a.y() * b.x();
    }
    if (area2 < 0) std::reverse(loop.begin(), loop.end());
    for (int i = 0; i < m; ++i) {
        Eigen::Vector2d e1 = loop[(i + 1) % m] - loop[i];
        Eigen::Vector2d e2 = loop[(i + 2) % m] - loop[(i + 1) % m];
        if (e1.x() * e2.y() - e1.y() * e2.x() < -1e-12 * e1.norm() * e2.norm())
            throw InputError("PlanarBoundary: polygon is not convex");
        Eigen::Vector2d nu(e1.y(), -e1.x());
        if (loop[i].dot(nu) <= 0)
            throw InputError("PlanarBoundary: origin not interior (<x,nu> <= 0 on an edge)");
    }
    PlanarBoundary b;
    b.smooth = false;
    b.polygon = std::move(loop);
    return b;
}

PlanarBoundary PlanarBoundary::from_body(const Body& body, int samples) {
    if (body.dim() != 2) throw InputError("PlanarBoundary: planar bodies only");
    PlanarBoundary b;
    b.smooth = true;
    b.phi.resize(samples);
    b.h.resize(samples);
    b.hp.resize(samples);
    b.d2.resize(samples);
    for (int j = 0; j < samples; ++j) {
        double phi = 2.0 * M_PI * (j + 0.5) / samples;
        Vec3 theta(std::cos(phi), std::sin(phi), 0.0);
        Vec3 tang(-std::sin(phi), std::cos(phi), 0.0);
        b.phi[j] = phi;
        b.h[j] = body.support(theta);
        b.hp[j] = body.support_gradient(theta).dot(tang);
        b.d2[j] = eval_d2h(body, theta)(0, 0);
        if (!(b.d2[j] > 0))
            throw NumericError("PlanarBoundary: h''+h <= 0 at sample " + std::to_string(j));
    }
    return b;
}

PlanarBoundary PlanarBoundary::disk_polygon(int samples, double radius) {
    std::vector<Eigen::Vector2d> loop(samples);
    for (int j = 0; j < samples; ++j) {
        double phi = 2.0 * M_PI * j / samples;
        loop[j] = radius * Eigen::Vector2d(std::cos(phi), std::sin(phi));
    }
    return from_polygon(std::move(loop));
}

PlanarBoundary PlanarBoundary::rectangle(double a, double b) {
    return from_polygon({{a, -b}, {a, b}, {-a, b}, {-a, -b}});
}

// ---------------------------------------------------------------------------
// interior monomial moments

namespace {

// moments(i,j) = int_K x^i y^j dA for i+j <= deg, via the Green identity
// int x^i y^j dA = (1/(i+1)) oint x^{i+1} y^j dy
Eigen::MatrixXd polygon_moments(const std::vector<Eigen::Vector2d>& loop, int deg) {
    Eigen::MatrixXd mom = Eigen::MatrixXd::Zero(deg + 1, deg + 1);
    const int m = int(loop.size());
    for (int e = 0; e < m; ++e) {
        const auto &p = loop[e], &q = loop[(e + 1) % m];
        double dy = q.y() - p.y();
        if (dy == 0.0) continue;
        for (int g = 0; g < 12; ++g) {
            double t = 0.5 * (kG12x[g] + 1.0);
            double w = 0.5 * kG12w[g] * dy;
            double x = p.x() + t * (q.x() - p.x());
            double y = p.y() + t * (q.y() - p.y());
            double xp = x;  // x^{i+1}
            for (int i = 0; i <= deg; ++i) {
                double yp = 1.0;
                for (int j = 0; i + j <= deg; ++j) {
                    mom(i, j) += w * xp * yp / double(i + 1);
                    yp *= y;
                }
                xp *= x;
            }
        }
    }
    return mom;
}

Eigen::MatrixXd smooth_moments(const PlanarBoundary& b, int deg) {
    Eigen::MatrixXd mom = Eigen::MatrixXd::Zero(deg + 1, deg + 1);
    const int m = int(b.phi.size());
    const double dphi = 2.0 * M_PI / m;
    for (int s = 0; s < m; ++s) {
        double c = std::cos(b.phi[s]), sn = std::sin(b.phi[s]);
        double x = b.h[s] * c - b.hp[s] * sn;
        double y = b.h[s] * sn + b.hp[s] * c;
        double w = dphi * b.d2[s] * c;  // dy = (h''+h) cos(phi) dphi
        double xp = x;
        for (int i = 0; i <= deg; ++i) {
            double yp = 1.0;
            for (int j = 0; i + j <= deg; ++j) {
                mom(i, j) += w * xp * yp / double(i + 1);
                yp *= y;
            }
            xp *= x;
        }
    }
    return mom;
}

double disk_moment(int a, int b) {
    if (a % 2 || b % 2) return 0.0;
    return 2.0 * M_PI * double_factorial(a - 1) * double_factorial(b - 1) /
           double_factorial(a + b) / double(a + b + 2);
}

double square_moment(int a, int b) {
    if (a % 2 || b % 2) return 0.0;
    return 4.0 / double((a + 1) * (b + 1));
}

double apply_moments(const Poly2& p, const Eigen::MatrixXd& mom) {
    const auto& c = p.coeffs();
    double acc = 0.0;
    for (int i = 0; i < c.rows(); ++i)
        for (int j = 0; j < c.cols(); ++j)
            if (c(i, j) != 0.0) acc += c(i, j) * mom(i, j);
    return acc;
}

double hessian_dot(const Poly2& a, const Poly2& b, const Eigen::MatrixXd& mom) {
    Poly2 prod = a.dx().dx() * b.dx().dx() + a.dy().dy() * b.dy().dy() +
                 (a.dx().dy() * b.dx().dy()).scaled(2.0);
    return apply_moments(prod, mom);
}

// int_{dK} (grad_ua . nu)(grad_ub . nu) / <x,nu> ds
double boundary_pair(const PlanarBoundary& body, const Poly2& ua, const Poly2& ub) {
    Poly2 uax = ua.dx(), uay = ua.dy(), ubx = ub.dx(), uby = ub.dy();
    double acc = 0.0;
    if (!body.smooth) {
        const int m = int(body.polygon.size());
        for (int e = 0; e < m; ++e) {
            const auto &p = body.polygon[e], &q = body.polygon[(e + 1) % m];
            Eigen::Vector2d edge = q - p;
            double len = edge.norm();
            Eigen::Vector2d nu(edge.y() / len, -edge.x() / len);
            double xnu = p.dot(nu);
            for (int g = 0; g < 8; ++g) {
                double t = 0.5 * (kG8x[g] + 1.0);
                double w = 0.5 * kG8w[g] * len;
                double x = p.x() + t * edge.x(), y = p.y() + t * edge.y();
                double da = uax.eval(x, y) * nu.x() + uay.eval(x, y) * nu.y();
                double db = ubx.eval(x, y) * nu.x() + uby.eval(x, y) * nu.y();
                acc += w * da * db / xnu;
            }
        }
    } else {
        const int m = int(body.phi.size());
        const double dphi = 2.0 * M_PI / m;
        for (int s = 0; s < m; ++s) {
            double c = std::cos(body.phi[s]), sn = std::sin(body.phi[s]);
            double x = body.h[s] * c - body.hp[s] * sn;
            double y = body.h[s] * sn + body.hp[s] * c;
            double da = uax.eval(x, y) * c + uay.eval(x, y) * sn;
            double db = ubx.eval(x, y) * c + uby.eval(x, y) * sn;
            acc += dphi * body.d2[s] * da * db / body.h[s];
        }
    }
    return acc;
}

Eigen::MatrixXd interior_moments(const PlanarBoundary& body, int deg) {
    return body.smooth ? smooth_moments(body, deg) : polygon_moments(body.polygon, deg);
}

}  // namespace

BoundReport bh_planar_estimate(const PlanarBoundary& body, const std::vector<Poly2>& basis) {
    const int k = int(basis.size());
    int deg = 0;
    for (const auto& p : basis) {
        if (!p.is_harmonic())
            throw InputError("bh_planar_estimate: basis member is not harmonic");
        deg = std::max(deg, p.degree());
    }
    Eigen::MatrixXd mom = interior_moments(body, std::max(0, 2 * deg - 4));
    Eigen::MatrixXd a(k, k), b(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            a(i, j) = a(j, i) = hessian_dot(basis[i], basis[j], mom);
            b(i, j) = b(j, i) = boundary_pair(body, basis[i], basis[j]);
        }
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success || a.trace() <= 0)
        throw NumericError("bh_planar_estimate: interior form singular (degenerate basis)");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(b, a);
    if (es.info() != Eigen::Success)
        throw NumericError("bh_planar_estimate: generalized eigensolve failed");
    BoundReport rep;
    rep.quantity = "B_H lower estimate";
    rep.direction = "lower";
    rep.value = es.eigenvalues().maxCoeff();
    rep.witness = es.eigenvectors().col(k - 1);
    std::ostringstream os;
    os << "basis=" << k << ",deg=" << deg;
    rep.inputs = os.str();
    return rep;
}

BoundReport test_function_quotient_planar(const PlanarBoundary& body, const std::string& u) {
    Poly2 poly;
    if (u == "half_norm_sq")
        poly = Poly2::monomial(2, 0, 0.5) + Poly2::monomial(0, 2, 0.5);
    else if (u == "half_x1_sq")
        poly = Poly2::monomial(2, 0, 0.5);
    else
        throw InputError("test_function_quotient: unknown test function '" + u + "'");
    Eigen::MatrixXd mom = interior_moments(body, 2);
    double denom = hessian_dot(poly, poly, mom);
    double numer = boundary_pair(body, poly, poly);
    BoundReport rep;
    rep.quantity = "D/B test-function quotient";
    rep.direction = "lower";
    rep.value = numer / denom;
    rep.inputs = "u=" + u;
    return rep;
}

BoundReport test_function_quotient_cube(int n, const std::string& u) {
    BoundReport rep;
    rep.quantity = "D/B test-function quotient";
    rep.direction = "lower";
    rep.inputs = "u=" + u + ",cube n=" + std::to_string(n);
    if (n < 2) throw InputError("test_function_quotient: n >= 2");
    if (u == "half_norm_sq")
        rep.value = 1.0;
    else if (u == "half_x1_sq")
        rep.value = 1.0 + double(n - 1) / 3.0;
    else
        throw InputError("test_function_quotient: unknown test function '" + u + "'");
    return rep;
}

double steklov_ball_eigenvalue(int n, int k) {
    if (n < 2) throw InputError("steklov_ball_eigenvalue: n >= 2");
    if (k < 1) throw InputError("steklov_ball_eigenvalue: k >= 1 (constants are excluded)");
    double kk = k, nn = n;
    return 2.0 * (kk + nn - 2.0) - (nn - 1.0) - (kk + nn - 2.0) / kk;
}

double bh_ball(int n) {
    if (n < 2) throw InputError("bh_ball: n >= 2");
    return 2.0 / double(n + 2);
}

double dk_upper_bound(double r, double big_r, double c_poin, int n) {
    if (r <= 0 || big_r <= 0 || c_poin <= 0) throw InputError("dk_upper_bound: positive inputs");
    return (c_poin * c_poin * n + 2.0 * c_poin * big_r) / (r * r);
}

double bh_upper_general(double c_poin, double r, double max_hess_w, double w_range) {
    if (r <= 0 || c_poin < 0 || max_hess_w < 0 || w_range <= 0)
        throw InputError("bh_upper_general: bad inputs");
    return c_poin / r + c_poin * c_poin * max_hess_w;
}

double bh_upper_lq(double q, int n, double c_poin, double r) {
    if (q < 2) throw InputError("bh_upper_lq: q >= 2 (W(x) = |x|_q^q/q needs q >= 2)");
    (void)n;
    return bh_upper_general(c_poin, r, q - 1.0, 1.0);
}

QkwReport q_kw(double c_poin, double max_hess_w, double w_range) {
    if (c_poin < 0 || max_hess_w < 0 || w_range <= 0) throw InputError("q_kw: bad inputs");
    double v = max_hess_w * w_range * c_poin * c_poin;
    return {v, v < 1.0};
}

// ---------------------------------------------------------------------------
// Reilly identity

double reilly_residual(ReillyDomain domain, const Poly2& u) {
    if (u.degree() > 10) throw InputError("reilly_residual: degree must be <= 10");
    Poly2 ux = u.dx(), uy = u.dy();
    Poly2 uxx = ux.dx(), uxy = ux.dy(), uyy = uy.dy();
    Poly2 lap = uxx + uyy;

    const int mdeg = 2 * u.degree();
    double lhs = 0.0, hess = 0.0;
    auto accumulate_interior = [&](auto&& moment) {
        const Poly2 lap2 = lap * lap;
        const Poly2 h2 = uxx * uxx + uyy * uyy + (uxy * uxy).scaled(2.0);
        for (int i = 0; i <= mdeg; ++i)
            for (int j = 0; i + j <= mdeg; ++j) {
                double m = moment(i, j);
                if (i < lap2.coeffs().rows() && j < lap2.coeffs().cols())
                    lhs += lap2.coeffs()(i, j) * m;
                if (i < h2.coeffs().rows() && j < h2.coeffs().cols())
                    hess += h2.coeffs()(i, j) * m;
            }
    };

    double boundary = 0.0;
    if (domain == ReillyDomain::disk) {
        accumulate_interior(disk_moment);
        const int m = 512;  // trapezoid is exact for these trig polynomials
        const double dphi = 2.0 * M_PI / m;
        for (int s = 0; s < m; ++s) {
            double phi = dphi * (s + 0.5);
            double c = std::cos(phi), sn = std::sin(phi);
            double gx = ux.eval(c, sn), gy = uy.eval(c, sn);
            double hxx = uxx.eval(c, sn), hxy = uxy.eval(c, sn), hyy = uyy.eval(c, sn);
            double unu = gx * c + gy * sn;
            double ut = -gx * sn + gy * c;
            // d/ds u_nu = <Hess t, nu> + II <grad u, t>, II = 1
            double utnu = (hxx * (-sn) + hxy * c) * c + (hxy * (-sn) + hyy * c) * sn + ut;
            boundary += dphi * (unu * unu + ut * ut - 2.0 * utnu * ut);
        }
    } else {
        accumulate_interior(square_moment);
        const Eigen::Vector2d corners[4] = {{1, -1}, {1, 1}, {-1, 1}, {-1, -1}};
        const double nu_angle[4] = {0.0, M_PI / 2, M_PI, 3 * M_PI / 2};  // normal after corner
        for (int e = 0; e < 4; ++e) {
            Eigen::Vector2d p = corners[e], q = corners[(e + 1) % 4];
            Eigen::Vector2d edge = q - p;
            double len = edge.norm();
            Eigen::Vector2d nu(edge.y() / len, -edge.x() / len);
            Eigen::Vector2d tg = edge / len;
            for (int g = 0; g < 12; ++g) {
                double t = 0.5 * (kG12x[g] + 1.0);
                double w = 0.5 * kG12w[g] * len;
                double x = p.x() + t * edge.x(), y = p.y() + t * edge.y();
                double gx = ux.eval(x, y), gy = uy.eval(x, y);
                double hxx = uxx.eval(x, y), hxy = uxy.eval(x, y), hyy = uyy.eval(x, y);
                double ut = gx * tg.x() + gy * tg.y();
                // flat faces: H = II = 0, d(nu)/ds = 0
                double utnu = (hxx * tg.x() + hxy * tg.y()) * nu.x() +
                              (hxy * tg.x() + hyy * tg.y()) * nu.y();
                boundary += w * (-2.0 * utnu * ut);
            }
        }
        // corner contributions: the second fundamental form concentrates on
        // the normal fan; int (|<g,nu>|^2 - |<g,t>|^2) dpsi in closed form
        for (int cidx = 0; cidx < 4; ++cidx) {
            const Eigen::Vector2d& corner = corners[(cidx + 1) % 4];
            double gx = ux.eval(corner.x(), corner.y());
            double gy = uy.eval(corner.x(), corner.y());
            double a2 = gx * gx + gy * gy;
            if (a2 == 0.0) continue;
            double phi_g = std::atan2(gy, gx);
            double psi1 = nu_angle[cidx];  // normal of the incoming edge
            double psi2 = psi1 + M_PI / 2;
            boundary += 0.5 * a2 *
                        (std::sin(2.0 * (psi2 - phi_g)) - std::sin(2.0 * (psi1 - phi_g)));
        }
    }
    return std::abs(lhs - (hess + boundary));
}

// ---------------------------------------------------------------------------
// boundary form of local p-BM

double pbm_boundary_form_margin(const SupportField& K, const Eigen::VectorXd& psi, double p) {
    if (K.dim() != 2) throw InputError("pbm_boundary_form_margin: smooth planar bodies only");
    if (psi.size() != K.node_count())
        throw InputError("pbm_boundary_form_margin: sample count mismatch");
    const SphereGrid& grid = *K.grid;
    const int n = grid.node_count();
    const double dphi = grid.dphi;

    // center along the invariance direction Psi -> Psi + lambda <x,nu>
    double psi_ds = 0.0, xnu_ds = 0.0;
    for (int j = 0; j < n; ++j) {
        psi_ds += dphi * psi[j] * K.d2_a[j];
        xnu_ds += dphi * K.h[j] * K.d2_a[j];
    }
    Eigen::VectorXd centered = psi - (psi_ds / xnu_ds) * K.h;

    Eigen::VectorXd dcentered = midpoint_derivative(grid, centered);
    double term_grad = 0.0, term_h = 0.0, term_weight = 0.0;
    for (int j = 0; j < n; ++j) {
        term_grad += dphi * dcentered[j] * dcentered[j];
        term_h += dphi * centered[j] * centered[j];
        term_weight += dphi * centered[j] * centered[j] * K.d2_a[j] / K.h[j];
    }
    return term_grad - term_h - (1.0 - p) * term_weight;
}

}  // namespace hbm
