#include "hbm/forms.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace hbm {

namespace {

// Gauss-Lobatto points on [-1,1] coincide with the quadratic element nodes,
// so coefficients are sampled at grid nodes and the mass matrix is diagonal
// while eigenvalues stay 4th-order accurate.
constexpr double kLobattoW[3] = {1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0};
constexpr double kLobattoXi[3] = {-1.0, 0.0, 1.0};

double shape_d(int i, double xi) {
    switch (i) {
        case 0: return xi - 0.5;
        case 1: return -2.0 * xi;
        default: return xi + 0.5;
    }
}

void check_conditioning(double eig_min, double eig_max, int where) {
    if (eig_min < 1e-10 * eig_max)
        throw NumericError("assemble: D2h conditioning guard tripped at element " +
                           std::to_string(where) + " (min/max eigenvalue ratio " +
                           std::to_string(eig_min / eig_max) + ")");
}

}  // namespace

OperatorForms assemble(const SupportField& field) {
    OperatorForms f;
    f.grid = field.grid;
    f.n = field.dim();
    const int nn = field.node_count();

    std::vector<Eigen::Triplet<double>> ta, tm;
    f.mass_diagonal = true;

    if (f.n == 2) {
        const double jac = field.grid->dphi;  // dphi/dxi, element spans 2*dphi
        const int ne = nn / 2;
        for (int e = 0; e < ne; ++e) {
            int idx[3] = {2 * e, 2 * e + 1, (2 * e + 2) % nn};
            double ae[3][3] = {};
            for (int g = 0; g < 3; ++g) {
                double h = field.h[idx[g]];
                double d2 = field.d2_a[idx[g]];
                if (!(d2 > 0))
                    throw NumericError("assemble: D2h <= 0 at node " + std::to_string(idx[g]));
                double a_coef = 0.5 * h * h;   // 1/(n(n-1)) h^2
                double m_coef = 0.5 * h * d2;  // (1/n) h det(D2h)
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        ae[i][j] += kLobattoW[g] * a_coef * shape_d(i, kLobattoXi[g]) *
                                    shape_d(j, kLobattoXi[g]) / jac;
                tm.emplace_back(idx[g], idx[g], kLobattoW[g] * m_coef * jac);
            }
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) ta.emplace_back(idx[i], idx[j], ae[i][j]);
        }
    } else {
        const auto& grid = *field.grid;
        const int nt = int(grid.triangles.size());
        for (int t = 0; t < nt; ++t) {
            const auto& tri = grid.triangles[t];
            const Vec3 &pa = grid.nodes[tri[0]], &pb = grid.nodes[tri[1]],
                       &pc = grid.nodes[tri[2]];
            Vec3 nrm = (pb - pa).cross(pc - pa);
            double twice_area = nrm.norm();
            nrm /= twice_area;
            Vec3 gl[3] = {nrm.cross(pc - pb) / twice_area, nrm.cross(pa - pc) / twice_area,
                          nrm.cross(pb - pa) / twice_area};

            Vec3 t1, t2;
            tangent_frame(grid.tri_centroid_dir[t], t1, t2);
            Eigen::Matrix<double, 2, 3> b;
            for (int i = 0; i < 3; ++i) {
                b(0, i) = gl[i].dot(t1);
                b(1, i) = gl[i].dot(t2);
            }
            double a = field.tri_d2a[t], bb = field.tri_d2b[t], c = field.tri_d2c[t];
            double tr = a + c, det = a * c - bb * bb;
            double disc = std::sqrt(std::max(0.0, tr * tr - 4 * det));
            check_conditioning(0.5 * (tr - disc), 0.5 * (tr + disc), t);
            Eigen::Matrix2d adj;
            adj << c, -bb, -bb, a;
            double h = field.tri_h[t];
            Eigen::Matrix3d ae = (grid.tri_area[t] * h * h / 6.0) * (b.transpose() * adj * b);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) ta.emplace_back(tri[i], tri[j], ae(i, j));
        }
        for (int j = 0; j < nn; ++j) {
            double det = field.d2_a[j] * field.d2_c[j] - field.d2_b[j] * field.d2_b[j];
            tm.emplace_back(j, j, field.h[j] * det * grid.weights[j] / 3.0);
        }
    }

    f.stiffness.resize(nn, nn);
    f.stiffness.setFromTriplets(ta.begin(), ta.end());
    f.mass.resize(nn, nn);
    f.mass.setFromTriplets(tm.begin(), tm.end());
    f.volume = mass_integral(f, Eigen::VectorXd::Ones(nn));
    return f;
}

double dirichlet_form(const OperatorForms& f, const Eigen::VectorXd& z) {
    return z.dot(f.stiffness * z);
}

double mass_bilinear(const OperatorForms& f, const Eigen::VectorXd& z1,
                     const Eigen::VectorXd& z2) {
    return z1.dot(f.mass * z2);
}

double mass_integral(const OperatorForms& f, const Eigen::VectorXd& z) {
    return mass_bilinear(f, Eigen::VectorXd::Ones(z.size()), z);
}

FoldedForms fold_even(const OperatorForms& f) {
    if (f.n == 2 && f.grid->node_count() % 4 != 0)
        throw InputError("fold_even: the even restriction needs N divisible by 4");
    FoldedForms out;
    out.quotient = even_quotient(*f.grid);
    const auto& rep = out.quotient.rep_of;
    const int m = int(out.quotient.representative.size());
    std::vector<Eigen::Triplet<double>> ta, tm;
    for (int k = 0; k < f.stiffness.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(f.stiffness, k); it; ++it)
            ta.emplace_back(rep[it.row()], rep[it.col()], it.value());
    for (int k = 0; k < f.mass.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(f.mass, k); it; ++it)
            tm.emplace_back(rep[it.row()], rep[it.col()], it.value());
    out.stiffness.resize(m, m);
    out.stiffness.setFromTriplets(ta.begin(), ta.end());
    out.mass.resize(m, m);
    out.mass.setFromTriplets(tm.begin(), tm.end());
    return out;
}

}  // namespace hbm
