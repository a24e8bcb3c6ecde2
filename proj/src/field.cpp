#include "hbm/field.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

namespace hbm {

namespace {

std::string node_tag(const SphereGrid& grid, int j) {
    std::ostringstream os;
    os << "node " << j << " theta=(" << grid.nodes[j].x() << ", " << grid.nodes[j].y();
    if (grid.dim == 3) os << ", " << grid.nodes[j].z();
    os << ")";
    return os.str();
}

}  // namespace

SupportField sample_field(const Body& body, GridPtr grid) {
    if (body.dim() != grid->dim)
        throw InputError("sample_field: body dimension " + std::to_string(body.dim()) +
                         " does not match grid dimension " + std::to_string(grid->dim));
    SupportField f;
    f.grid = grid;
    const int n = grid->node_count();
    f.h.resize(n);
    f.grad1.resize(n);
    f.grad2 = Eigen::VectorXd::Zero(n);
    f.d2_a.resize(n);
    f.d2_b = Eigen::VectorXd::Zero(n);
    f.d2_c = Eigen::VectorXd::Zero(n);
    f.source = body.analytic() ? SupportField::Source::analytic
                               : SupportField::Source::finite_difference;

    const bool node_only = !body.analytic() && grid->dim == 2 &&
                           body.describe().rfind("support:", 0) == 0;

    for (int j = 0; j < n; ++j) f.h[j] = body.support(grid->nodes[j]);

    if (node_only) {
        // sampled-from-file body: grid finite differences (4th order, periodic)
        f.fd_step = grid->dphi;
        const double dp = grid->dphi;
        for (int j = 0; j < n; ++j) {
            auto at = [&](int k) { return f.h[((j + k) % n + n) % n]; };
            f.grad1[j] = (8 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12 * dp);
            double h2 = (-at(2) + 16 * at(1) - 30 * at(0) + 16 * at(-1) - at(-2)) / (12 * dp * dp);
            f.d2_a[j] = h2 + f.h[j];
        }
    } else {
        if (!body.analytic()) f.fd_step = 1e-4;
        for (int j = 0; j < n; ++j) {
            const Vec3& theta = grid->nodes[j];
            Vec3 g = body.support_gradient(theta);
            Mat2 d2 = eval_d2h(body, theta);
            f.grad1[j] = g.dot(grid->tangent1[j]);
            if (grid->dim == 2) {
                f.d2_a[j] = d2(0, 0);
            } else {
                f.grad2[j] = g.dot(grid->tangent2[j]);
                f.d2_a[j] = d2(0, 0);
                f.d2_b[j] = d2(0, 1);
                f.d2_c[j] = d2(1, 1);
            }
        }
        if (grid->dim == 2 && body.curvature_cell_average()) {
            // integrable curvature spikes: replace pointwise h''+h by its
            // average over the Lobatto-weight cell, exact for the singular
            // part via int (h''+h) = [h'] + int h
            auto hprime = [&](double phi) {
                Vec3 th(std::cos(phi), std::sin(phi), 0.0);
                Vec3 tg(-std::sin(phi), std::cos(phi), 0.0);
                return body.support_gradient(th).dot(tg);
            };
            auto hval = [&](double phi) {
                return body.support(Vec3(std::cos(phi), std::sin(phi), 0.0));
            };
            const double g2 = 0.5773502691896257;  // 2-pt Gauss on [-1,1]
            for (int j = 0; j < n; ++j) {
                double half = (j % 2 == 0 ? 1.0 / 3.0 : 2.0 / 3.0) * grid->dphi;
                double a = grid->phi[j] - half, b = grid->phi[j] + half;
                double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
                double int_h = rad * (hval(mid - g2 * rad) + hval(mid + g2 * rad));
                f.d2_a[j] = (hprime(b) - hprime(a) + int_h) / (b - a);
            }
        }
    }

    if (grid->dim == 3) {
        const int nt = int(grid->triangles.size());
        f.tri_h.resize(nt);
        f.tri_d2a.resize(nt);
        f.tri_d2b.resize(nt);
        f.tri_d2c.resize(nt);
        for (int t = 0; t < nt; ++t) {
            const Vec3& c = grid->tri_centroid_dir[t];
            f.tri_h[t] = body.support(c);
            Mat2 d2 = eval_d2h(body, c);
            f.tri_d2a[t] = d2(0, 0);
            f.tri_d2b[t] = d2(0, 1);
            f.tri_d2c[t] = d2(1, 1);
        }
    }

    // invariants: positivity, convexity, evenness
    for (int j = 0; j < n; ++j)
        if (!(f.h[j] > 0))
            throw NumericError("sample_field: h <= 0 at " + node_tag(*grid, j));

    double min_eig = std::numeric_limits<double>::infinity();
    int worst = 0;
    for (int j = 0; j < n; ++j) {
        double eig;
        if (grid->dim == 2) {
            eig = f.d2_a[j];
        } else {
            double tr = f.d2_a[j] + f.d2_c[j];
            double det = f.d2_a[j] * f.d2_c[j] - f.d2_b[j] * f.d2_b[j];
            eig = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4 * det)));
        }
        if (eig < min_eig) {
            min_eig = eig;
            worst = j;
        }
    }
    f.min_d2h_eigenvalue = min_eig;
    if (!(min_eig > 0))
        throw NumericError("sample_field: D2h not positive definite (min eigenvalue " +
                           std::to_string(min_eig) + ") at " + node_tag(*grid, worst));

    for (int j = 0; j < n; ++j) {
        double diff = std::abs(f.h[j] - f.h[grid->antipode[j]]);
        if (diff > 1e-10 * std::max(1.0, std::abs(f.h[j])))
            throw NumericError("sample_field: evenness violated at " + node_tag(*grid, j));
    }
    return f;
}

namespace {

void require_same_grid(const SupportField& a, const SupportField& b, const char* who) {
    if (a.grid != b.grid && a.grid->descriptor() != b.grid->descriptor())
        throw InputError(std::string(who) + ": fields must share one grid");
}

void refresh_min_eig(SupportField& f) {
    double min_eig = std::numeric_limits<double>::infinity();
    for (int j = 0; j < f.node_count(); ++j) {
        double eig;
        if (f.dim() == 2) {
            eig = f.d2_a[j];
        } else {
            double tr = f.d2_a[j] + f.d2_c[j];
            double det = f.d2_a[j] * f.d2_c[j] - f.d2_b[j] * f.d2_b[j];
            eig = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4 * det)));
        }
        min_eig = std::min(min_eig, eig);
    }
    f.min_d2h_eigenvalue = min_eig;
}

}  // namespace

SupportField field_add(const SupportField& a, const SupportField& b) {
    require_same_grid(a, b, "field_add");
    SupportField f = a;
    f.h += b.h;
    f.grad1 += b.grad1;
    f.grad2 += b.grad2;
    f.d2_a += b.d2_a;
    f.d2_b += b.d2_b;
    f.d2_c += b.d2_c;
    if (f.dim() == 3) {
        f.tri_h += b.tri_h;
        f.tri_d2a += b.tri_d2a;
        f.tri_d2b += b.tri_d2b;
        f.tri_d2c += b.tri_d2c;
    }
    if (a.source == SupportField::Source::finite_difference ||
        b.source == SupportField::Source::finite_difference)
        f.source = SupportField::Source::finite_difference;
    refresh_min_eig(f);
    return f;
}

SupportField field_scale(const SupportField& a, double c) {
    if (!(c > 0)) throw InputError("field_scale: factor must be positive");
    SupportField f = a;
    f.h *= c;
    f.grad1 *= c;
    f.grad2 *= c;
    f.d2_a *= c;
    f.d2_b *= c;
    f.d2_c *= c;
    if (f.dim() == 3) {
        f.tri_h *= c;
        f.tri_d2a *= c;
        f.tri_d2b *= c;
        f.tri_d2c *= c;
    }
    f.min_d2h_eigenvalue *= c;
    return f;
}

Eigen::VectorXd field_ratio(const SupportField& num, const SupportField& den) {
    require_same_grid(num, den, "field_ratio");
    return num.h.cwiseQuotient(den.h);
}

}  // namespace hbm
