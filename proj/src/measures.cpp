#include "hbm/measures.hpp"

#include <cmath>

namespace hbm {

namespace {

// Composite Simpson weights matched to the quadratic-element layout: 4th
// order on the offset circle grid, so nodal mixed-volume quadratures carry
// the same accuracy as the bilinear forms.
Eigen::VectorXd nodal_quad_weights(const SphereGrid& grid) {
    const int n = grid.node_count();
    Eigen::VectorXd w(n);
    if (grid.dim == 2) {
        for (int j = 0; j < n; ++j) w[j] = grid.dphi * (j % 2 == 0 ? 2.0 / 3.0 : 4.0 / 3.0);
    } else {
        for (int j = 0; j < n; ++j) w[j] = grid.weights[j];
    }
    return w;
}

double det_d2h(const SupportField& f, int j) {
    if (f.dim() == 2) return f.d2_a[j];
    return f.d2_a[j] * f.d2_c[j] - f.d2_b[j] * f.d2_b[j];
}

void require_same_grid(const SupportField& a, const SupportField& b) {
    if (a.grid != b.grid && a.grid->descriptor() != b.grid->descriptor())
        throw InputError("mixed volume: fields must share one grid");
}

}  // namespace

MeasureField surface_density(const SupportField& K) {
    MeasureField m;
    m.grid = K.grid;
    m.kind = "surface_area";
    const int n = K.node_count();
    m.density.resize(n);
    for (int j = 0; j < n; ++j) m.density[j] = det_d2h(K, j);
    Eigen::VectorXd w = nodal_quad_weights(*K.grid);
    m.total = w.dot(m.density);
    return m;
}

MeasureField cone_density(const SupportField& K) {
    MeasureField m = surface_density(K);
    m.kind = "cone";
    m.density = m.density.cwiseProduct(K.h) / double(K.dim());
    Eigen::VectorXd w = nodal_quad_weights(*K.grid);
    m.total = w.dot(m.density);
    return m;
}

MeasureField lp_surface_density(const SupportField& K, double p) {
    MeasureField m = surface_density(K);
    m.kind = "lp_surface(" + std::to_string(p) + ")";
    for (int j = 0; j < K.node_count(); ++j)
        m.density[j] *= std::pow(K.h[j], 1.0 - p);
    Eigen::VectorXd w = nodal_quad_weights(*K.grid);
    m.total = w.dot(m.density);
    return m;
}

double mixed_discriminant(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != a.cols() || a.rows() != b.rows() || a.cols() != b.cols())
        throw InputError("mixed_discriminant: need square matrices of equal size");
    if (a.rows() == 1) return a(0, 0);
    if (a.rows() == 2)
        return 0.5 * (a.trace() * b.trace() - (a * b).trace());
    throw InputError("mixed_discriminant: only m <= 2 supported");
}

double mixed_volume(const std::vector<const SupportField*>& fields) {
    if (fields.empty()) throw InputError("mixed_volume: empty field list");
    const int n = fields[0]->dim();
    if (int(fields.size()) != n)
        throw InputError("mixed_volume: need exactly n = " + std::to_string(n) + " fields");
    for (const auto* f : fields) require_same_grid(*fields[0], *f);

    const SupportField& mult = *fields[n - 1];  // multiplies the mixed surface area
    const SphereGrid& grid = *fields[0]->grid;
    Eigen::VectorXd w = nodal_quad_weights(grid);
    double acc = 0.0;
    if (n == 2) {
        const SupportField& s = *fields[0];
        for (int j = 0; j < grid.node_count(); ++j) acc += w[j] * mult.h[j] * s.d2_a[j];
    } else {
        const SupportField &f1 = *fields[0], &f2 = *fields[1];
        for (int j = 0; j < grid.node_count(); ++j) {
            double d2 = 0.5 * ((f1.d2_a[j] + f1.d2_c[j]) * (f2.d2_a[j] + f2.d2_c[j]) -
                               (f1.d2_a[j] * f2.d2_a[j] + 2 * f1.d2_b[j] * f2.d2_b[j] +
                                f1.d2_c[j] * f2.d2_c[j]));
            acc += w[j] * mult.h[j] * d2;
        }
    }
    return acc / double(n);
}

double volume(const SupportField& K) {
    std::vector<const SupportField*> fs(std::size_t(K.dim()), &K);
    return mixed_volume(fs);
}

double perimeter_aniso(const SupportField& K, const SupportField& L) {
    require_same_grid(K, L);
    std::vector<const SupportField*> fs(std::size_t(K.dim()), &K);
    fs.back() = &L;  // h_L integrated against S(h_K,...,h_K) = dS_K
    return double(K.dim()) * mixed_volume(fs);
}

double v_w_m(const OperatorForms& forms, const SupportField& K, const Eigen::VectorXd& w,
             int m) {
    if (w.size() != K.node_count()) throw InputError("v_w_m: node count mismatch");
    Eigen::VectorXd z = w.cwiseQuotient(K.h);
    if (m == 1) return mass_integral(forms, z);
    if (m == 2) return mass_bilinear(forms, z, z) - dirichlet_form(forms, z);
    throw InputError("v_w_m: m must be 1 or 2");
}

double v_w_m(const Eigen::VectorXd& w, int m, const SupportField& K) {
    OperatorForms forms = assemble(K);
    return v_w_m(forms, K, w, m);
}

}  // namespace hbm
