#include "hbm/body.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

namespace hbm {

Vec3 Body::support_gradient(const Vec3& x) const {
    // 4th-order central differences of the 1-homogeneous extension
    const double s = 1e-6 * x.norm();
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
        if (dim() == 2 && i == 2) {
            g[2] = 0.0;
            continue;
        }
        Vec3 e = Vec3::Zero();
        e[i] = 1.0;
        double f1 = support(x + s * e), f_1 = support(x - s * e);
        double f2 = support(x + 2 * s * e), f_2 = support(x - 2 * s * e);
        g[i] = (8 * (f1 - f_1) - (f2 - f_2)) / (12 * s);
    }
    return g;
}

Mat3 fd_support_hessian(const Body& body, const Vec3& x, double step_rel) {
    const double s = step_rel * x.norm();
    const int n = body.dim();
    auto f = [&](const Vec3& y) { return body.support(y); };
    Mat3 h = Mat3::Zero();
    // 4th-order second differences on the diagonal
    for (int i = 0; i < n; ++i) {
        Vec3 e = Vec3::Zero();
        e[i] = s;
        double d2 = (-f(x + 2 * e) + 16 * f(x + e) - 30 * f(x) + 16 * f(x - e) - f(x - 2 * e)) /
                    (12 * s * s);
        h(i, i) = d2;
    }
    // 4th-order mixed second differences
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Vec3 ei = Vec3::Zero(), ej = Vec3::Zero();
            ei[i] = s;
            ej[j] = s;
            auto g = [&](int a, int b) { return f(x + double(a) * ei + double(b) * ej); };
            double d =
                (8 * (g(1, -2) + g(2, -1) + g(-2, 1) + g(-1, 2)) -
                 8 * (g(-1, -2) + g(-2, -1) + g(1, 2) + g(2, 1)) -
                 (g(2, -2) + g(-2, 2) - g(-2, -2) - g(2, 2)) + 64 * (g(1, 1) + g(-1, -1)) -
                 64 * (g(1, -1) + g(-1, 1))) /
                (144 * s * s);
            h(i, j) = h(j, i) = d;
        }
    return h;
}

Mat3 Body::support_hessian(const Vec3& x) const { return fd_support_hessian(*this, x); }

namespace {

class BallBody final : public Body {
  public:
    BallBody(int dim, double r) : dim_(dim), r_(r) {
        if (r <= 0) throw InputError("ball: radius must be positive");
    }
    int dim() const override { return dim_; }
    double support(const Vec3& x) const override { return r_ * x.norm(); }
    Vec3 support_gradient(const Vec3& x) const override { return r_ * x.normalized(); }
    Mat3 support_hessian(const Vec3& x) const override {
        double nrm = x.norm();
        Vec3 u = x / nrm;
        Mat3 h = (r_ / nrm) * (Mat3::Identity() - u * u.transpose());
        if (dim_ == 2) h.row(2).setZero(), h.col(2).setZero();
        return h;
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "ball:r=" << r_;
        return os.str();
    }

  private:
    int dim_;
    double r_;
};

class EllipsoidBody final : public Body {
  public:
    explicit EllipsoidBody(const std::vector<double>& axes) : dim_(int(axes.size())) {
        a_.setZero();
        for (int i = 0; i < dim_; ++i) {
            if (axes[i] <= 0) throw InputError("ellipsoid: semi-axes must be positive");
            a_[i] = axes[i];
        }
    }
    int dim() const override { return dim_; }
    // h(x) = |A x| with A = diag(a)
    double support(const Vec3& x) const override { return (a_.asDiagonal() * x).norm(); }
    Vec3 support_gradient(const Vec3& x) const override {
        Vec3 a2x = a_.cwiseProduct(a_).cwiseProduct(x);
        return a2x / support(x);
    }
    Mat3 support_hessian(const Vec3& x) const override {
        double h = support(x);
        Vec3 a2x = a_.cwiseProduct(a_).cwiseProduct(x);
        Mat3 m = a_.cwiseProduct(a_).asDiagonal();
        m -= (a2x * a2x.transpose()) / (h * h);
        m /= h;
        if (dim_ == 2) m.row(2).setZero(), m.col(2).setZero();
        return m;
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "ellipsoid:a=" << a_[0] << ",b=" << a_[1];
        if (dim_ == 3) os << ",c=" << a_[2];
        return os.str();
    }

  private:
    int dim_;
    Vec3 a_;
};

// Unit ball of l_q: h is the dual-norm value |theta|_{q*}, 1/q + 1/q* = 1.
class LqBody final : public Body {
  public:
    LqBody(int dim, double q) : dim_(dim), q_(q) {
        if (q < 1) throw InputError("lq: q must be >= 1");
        if (std::isinf(q))
            s_ = 1.0;
        else if (q == 1.0)
            s_ = std::numeric_limits<double>::infinity();
        else
            s_ = q / (q - 1.0);
    }
    int dim() const override { return dim_; }
    double dual_exponent() const { return s_; }
    double support(const Vec3& x) const override {
        if (std::isinf(s_)) return x.cwiseAbs().maxCoeff();
        if (s_ == 1.0) return x.cwiseAbs().sum();
        double m = x.cwiseAbs().maxCoeff();
        if (m == 0) return 0;
        double acc = 0;
        for (int i = 0; i < dim_; ++i) acc += std::pow(std::abs(x[i]) / m, s_);
        return m * std::pow(acc, 1.0 / s_);
    }
    Vec3 support_gradient(const Vec3& x) const override {
        if (std::isinf(s_) || s_ == 1.0)
            throw NumericError("lq: q in {1, inf} has no smooth support derivatives");
        // |x_i|^{s-1}/f^{s-1} is continuous through the axes for s > 1
        double f = support(x);
        Vec3 g = Vec3::Zero();
        for (int i = 0; i < dim_; ++i)
            g[i] = sign(x[i]) * std::pow(std::abs(x[i]) / f, s_ - 1.0);
        return g;
    }
    Mat3 support_hessian(const Vec3& x) const override {
        guard(x, clearance());
        double f = support(x);
        Vec3 u = Vec3::Zero(), d = Vec3::Zero();
        for (int i = 0; i < dim_; ++i) {
            double ax = std::abs(x[i]);
            u[i] = sign(x[i]) * std::pow(ax, s_ - 1.0);
            d[i] = std::pow(ax, s_ - 2.0);
        }
        Mat3 h = d.asDiagonal();
        h -= (u * u.transpose()) / std::pow(f, s_);
        h *= (s_ - 1.0) / std::pow(f, s_ - 1.0);
        if (dim_ == 2) h.row(2).setZero(), h.col(2).setZero();
        return h;
    }
    double singular_axis_clearance() const override { return clearance(); }
    bool curvature_cell_average() const override {
        return std::isfinite(s_) && s_ != 2.0 && s_ != 1.0;
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "lq:q=" << q_;
        return os.str();
    }

  private:
    static double sign(double t) { return t < 0 ? -1.0 : (t > 0 ? 1.0 : 0.0); }
    double clearance() const {
        if (s_ == 2.0) return 0.0;
        return s_ < 2.0 ? 1e-3 : 1e-9;  // D^2 h blows up near axes when q* < 2
    }
    void guard(const Vec3& x, double clear) const {
        if (s_ == 2.0 || clear == 0.0) return;
        if (std::isinf(s_) || s_ == 1.0)
            throw NumericError("lq: q in {1, inf} has no smooth support derivatives");
        double nrm = x.norm();
        for (int i = 0; i < dim_; ++i) {
            // angular distance to the axis plane {x_i = 0}
            double dist = std::asin(std::min(1.0, std::abs(x[i]) / nrm));
            if (dist < clear)
                throw NumericError("lq: singular direction, node within " +
                                   std::to_string(clear) + " of coordinate axis");
        }
    }
    int dim_;
    double q_, s_;
};

class LinearImageBody final : public Body {
  public:
    LinearImageBody(BodyPtr base, const Eigen::MatrixXd& m) : base_(std::move(base)) {
        const int n = base_->dim();
        if (m.rows() != n || m.cols() != n)
            throw InputError("linimg: matrix must be dim x dim");
        t_.setIdentity();
        t_.topLeftCorner(n, n) = m;
        if (std::abs(t_.determinant()) < 1e-14)
            throw InputError("linimg: matrix must be invertible");
    }
    int dim() const override { return base_->dim(); }
    // h_{T(K)}(x) = h_K(T^t x)
    double support(const Vec3& x) const override { return base_->support(t_.transpose() * x); }
    Vec3 support_gradient(const Vec3& x) const override {
        return t_ * base_->support_gradient(t_.transpose() * x);
    }
    Mat3 support_hessian(const Vec3& x) const override {
        return t_ * base_->support_hessian(t_.transpose() * x) * t_.transpose();
    }
    bool analytic() const override { return base_->analytic(); }
    double singular_axis_clearance() const override {
        // conservative: the base clearance pulled back through T is not a
        // plain axis distance; keep the base guard via composed evaluation
        return 0.0;
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "linimg:(" << base_->describe() << "):m=";
        const int n = dim();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) os << t_(i, j) << (i == n - 1 && j == n - 1 ? "" : ",");
        return os.str();
    }

  private:
    BodyPtr base_;
    Mat3 t_;
};

// planar only: ellipse (a, b, rotated by `rot`) plus an even cosine series
class TrigBody final : public Body {
  public:
    TrigBody(double a, double b, double rot, std::vector<double> ck, std::vector<double> sk)
        : a_(a), b_(b), rot_(rot), ck_(std::move(ck)), sk_(std::move(sk)) {
        if (a <= 0 || b <= 0) throw InputError("trig body: ellipse axes must be positive");
    }
    int dim() const override { return 2; }
    double support(const Vec3& x) const override {
        double r = std::hypot(x.x(), x.y());
        return r * value(std::atan2(x.y(), x.x()));
    }
    Vec3 support_gradient(const Vec3& x) const override {
        double r = std::hypot(x.x(), x.y());
        double phi = std::atan2(x.y(), x.x());
        double h = value(phi), hp = dvalue(phi);
        // grad of r*h(phi): h * e_r + h' * e_phi
        Vec3 er(x.x() / r, x.y() / r, 0), ep(-x.y() / r, x.x() / r, 0);
        return h * er + hp * ep;
    }
    Mat3 support_hessian(const Vec3& x) const override {
        double r = std::hypot(x.x(), x.y());
        double phi = std::atan2(x.y(), x.x());
        double curv = (d2value(phi) + value(phi)) / r;  // (h'' + h)/r in e_phi direction
        Vec3 ep(-x.y() / r, x.x() / r, 0);
        Mat3 m = curv * (ep * ep.transpose());
        return m;
    }
    std::string describe() const override {
        std::ostringstream os;
        os << "trig:a=" << a_ << ",b=" << b_ << ",rot=" << rot_ << ",k=" << ck_.size();
        return os.str();
    }
    double value(double phi) const {
        double p = phi - rot_;
        double h = std::sqrt(a_ * a_ * std::cos(p) * std::cos(p) +
                             b_ * b_ * std::sin(p) * std::sin(p));
        for (std::size_t k = 0; k < ck_.size(); ++k) {
            double f = 2.0 * double(k + 1);
            h += ck_[k] * std::cos(f * phi) + sk_[k] * std::sin(f * phi);
        }
        return h;
    }
    double dvalue(double phi) const {
        double p = phi - rot_;
        double e2 = a_ * a_ * std::cos(p) * std::cos(p) + b_ * b_ * std::sin(p) * std::sin(p);
        double h = (b_ * b_ - a_ * a_) * std::sin(p) * std::cos(p) / std::sqrt(e2);
        for (std::size_t k = 0; k < ck_.size(); ++k) {
            double f = 2.0 * double(k + 1);
            h += f * (-ck_[k] * std::sin(f * phi) + sk_[k] * std::cos(f * phi));
        }
        return h;
    }
    double d2value(double phi) const {
        double p = phi - rot_;
        double c = std::cos(p), s = std::sin(p);
        double e2 = a_ * a_ * c * c + b_ * b_ * s * s;
        double d = (b_ * b_ - a_ * a_);
        double num = d * (c * c - s * s);
        double h2 = num / std::sqrt(e2) - d * d * s * s * c * c / std::pow(e2, 1.5);
        for (std::size_t k = 0; k < ck_.size(); ++k) {
            double f = 2.0 * double(k + 1);
            h2 -= f * f * (ck_[k] * std::cos(f * phi) + sk_[k] * std::sin(f * phi));
        }
        return h2;
    }

  private:
    double a_, b_, rot_;
    std::vector<double> ck_, sk_;
};

class SampledBody final : public Body {
  public:
    SampledBody(GridPtr grid, Eigen::VectorXd h) : grid_(std::move(grid)), h_(std::move(h)) {
        if (h_.size() != grid_->node_count())
            throw InputError("sampled body: value count does not match grid");
        for (int j = 0; j < h_.size(); ++j)
            if (!(h_[j] > 0))
                throw NumericError("sampled body: h must be positive, node " + std::to_string(j));
    }
    int dim() const override { return grid_->dim; }
    double support(const Vec3& x) const override {
        // only defined at grid nodes (values are samples, not a formula)
        double nrm = x.norm();
        for (int j = 0; j < grid_->node_count(); ++j)
            if ((grid_->nodes[j] - x / nrm).norm() < 1e-12) return nrm * h_[j];
        throw InputError("sampled body: evaluation away from grid nodes");
    }
    bool analytic() const override { return false; }
    std::string describe() const override { return "support:<sampled>"; }
    const Eigen::VectorXd& values() const { return h_; }
    GridPtr grid() const { return grid_; }

  private:
    GridPtr grid_;
    Eigen::VectorXd h_;
};

class PolytopeBody final : public Body {
  public:
    PolytopeBody(int dim, std::vector<Vec3> verts) : dim_(dim), verts_(std::move(verts)) {
        if (verts_.empty()) throw InputError("polytope: empty vertex list");
    }
    int dim() const override { return dim_; }
    double support(const Vec3& x) const override {
        double best = -std::numeric_limits<double>::infinity();
        for (const Vec3& v : verts_) best = std::max(best, v.dot(x));
        return best;
    }
    bool analytic() const override { return false; }
    std::string describe() const override {
        return "polytope:v=" + std::to_string(verts_.size());
    }

  private:
    int dim_;
    std::vector<Vec3> verts_;
};

}  // namespace

BodyPtr make_ball(int dim, double radius) { return std::make_shared<BallBody>(dim, radius); }
BodyPtr make_ellipsoid(const std::vector<double>& semi_axes) {
    if (semi_axes.size() != 2 && semi_axes.size() != 3)
        throw InputError("ellipsoid: need 2 or 3 semi-axes");
    return std::make_shared<EllipsoidBody>(semi_axes);
}
BodyPtr make_lq(int dim, double q) { return std::make_shared<LqBody>(dim, q); }
BodyPtr make_linear_image(BodyPtr base, const Eigen::MatrixXd& m) {
    return std::make_shared<LinearImageBody>(std::move(base), m);
}
BodyPtr make_trig_body(double a, double b, double rot, const std::vector<double>& ck,
                       const std::vector<double>& sk) {
    return std::make_shared<TrigBody>(a, b, rot, ck, sk);
}
BodyPtr make_sampled(GridPtr grid, const Eigen::VectorXd& h) {
    return std::make_shared<SampledBody>(std::move(grid), h);
}
BodyPtr make_polytope(int dim, std::vector<Vec3> vertices) {
    return std::make_shared<PolytopeBody>(dim, std::move(vertices));
}

namespace {

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;
    bool eat(char c) {
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c, const char* what) {
        if (!eat(c)) throw ParseError(std::string("body: expected '") + c + "' " + what, pos);
    }
    bool match(const char* kw) {
        std::size_t n = std::strlen(kw);
        if (s.compare(pos, n, kw) == 0) {
            pos += n;
            return true;
        }
        return false;
    }
    double number() {
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("body: expected a number", pos);
        pos += std::size_t(end - begin);
        return v;
    }
};

BodyPtr parse_body_at(Cursor& c, int dim, const GridPtr& grid);

BodyPtr parse_linimg(Cursor& c, int dim, const GridPtr& grid) {
    c.expect(':', "after 'linimg'");
    c.expect('(', "to open the base body");
    BodyPtr base = parse_body_at(c, dim, grid);
    c.expect(')', "to close the base body");
    c.expect(':', "before matrix");
    if (!c.match("m=")) throw ParseError("body: expected 'm=' matrix entries", c.pos);
    std::vector<double> entries;
    entries.push_back(c.number());
    while (c.eat(',')) entries.push_back(c.number());
    int n = base->dim();
    if (int(entries.size()) != n * n)
        throw ParseError("body: linimg matrix needs dim*dim entries", c.pos);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = entries[std::size_t(i * n + j)];
    return make_linear_image(base, m);
}

BodyPtr parse_body_at(Cursor& c, int dim, const GridPtr& grid) {
    if (c.match("ball")) {
        double r = 1.0;
        if (c.eat(':')) {
            if (!c.match("r=")) throw ParseError("body: expected 'r=' after 'ball:'", c.pos);
            r = c.number();
        }
        return make_ball(dim, r);
    }
    if (c.match("ellipsoid")) {
        c.expect(':', "after 'ellipsoid'");
        if (!c.match("a=")) throw ParseError("body: expected 'a='", c.pos);
        std::vector<double> axes{c.number()};
        c.expect(',', "between semi-axes");
        if (!c.match("b=")) throw ParseError("body: expected 'b='", c.pos);
        axes.push_back(c.number());
        if (c.eat(',')) {
            if (!c.match("c=")) throw ParseError("body: expected 'c='", c.pos);
            axes.push_back(c.number());
        }
        return make_ellipsoid(axes);
    }
    if (c.match("lq")) {
        c.expect(':', "after 'lq'");
        if (!c.match("q=")) throw ParseError("body: expected 'q='", c.pos);
        return make_lq(dim, c.number());
    }
    if (c.match("linimg")) return parse_linimg(c, dim, grid);
    if (c.match("support:")) {
        std::string path = c.s.substr(c.pos);
        std::size_t stop = path.find_first_of(");");
        if (stop != std::string::npos) path = path.substr(0, stop);
        c.pos += path.size();
        if (!grid) throw ParseError("body: support:<path> needs a declared grid", c.pos);
        std::ifstream in(path);
        if (!in) throw InputError("body: cannot open support file '" + path + "'");
        Eigen::VectorXd h = Eigen::VectorXd::Zero(grid->node_count());
        Eigen::VectorXd seen = Eigen::VectorXd::Zero(grid->node_count());
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            std::istringstream ls(line);
            int idx;
            char comma;
            double v;
            if (!(ls >> idx >> comma >> v) || comma != ',')
                throw InputError("body: support file '" + path + "' line " +
                                 std::to_string(lineno) + ": expected '<index>,<h>'");
            if (idx < 0 || idx >= grid->node_count())
                throw InputError("body: support file node index out of range: " +
                                 std::to_string(idx));
            h[idx] = v;
            seen[idx] = 1;
        }
        if (seen.sum() != grid->node_count())
            throw InputError("body: support file misses " +
                             std::to_string(grid->node_count() - int(seen.sum())) + " nodes");
        return make_sampled(grid, h);
    }
    throw ParseError("body: unknown kind", c.pos);
}

}  // namespace

BodyPtr parse_body(const std::string& dsl, int dim, GridPtr grid) {
    if (dim != 2 && dim != 3) throw InputError("body: dim must be 2 or 3");
    Cursor c{dsl};
    BodyPtr b = parse_body_at(c, dim, grid);
    if (c.pos != dsl.size()) throw ParseError("body: trailing characters", c.pos);
    if (b->dim() != dim)
        throw InputError("body: '" + dsl + "' has dimension " + std::to_string(b->dim()) +
                         ", expected " + std::to_string(dim));
    return b;
}

double eval_support(const Body& body, const Vec3& theta) {
    if (std::abs(theta.norm() - 1.0) > 1e-12)
        throw InputError("eval_support: theta must be a unit vector");
    return body.support(theta);
}

Mat2 eval_d2h(const Body& body, const Vec3& theta) {
    if (std::abs(theta.norm() - 1.0) > 1e-12)
        throw InputError("eval_d2h: theta must be a unit vector");
    Mat3 h = body.analytic() ? body.support_hessian(theta) : fd_support_hessian(body, theta);
    Mat2 out = Mat2::Zero();
    if (body.dim() == 2) {
        // for n=2 the restricted Hessian is the scalar h'' + h
        Vec3 t(-theta.y(), theta.x(), 0.0);
        out(0, 0) = t.dot(h * t);
    } else {
        Vec3 t1, t2;
        tangent_frame(theta, t1, t2);
        out(0, 0) = t1.dot(h * t1);
        out(0, 1) = out(1, 0) = t1.dot(h * t2);
        out(1, 1) = t2.dot(h * t2);
    }
    return out;
}

}  // namespace hbm
