#include "hbm/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

namespace hbm {

int SpectralReport::lambda1_cluster(double tol) const {
    int count = 0;
    for (int i = 0; i < eigenvalues.size(); ++i)
        if (std::abs(eigenvalues[i] - 1.0) <= tol) ++count;
    return count;
}

double SpectralReport::lambda_above_cluster(double tol) const {
    for (int i = 1; i < eigenvalues.size(); ++i)
        if (eigenvalues[i] > 1.0 + tol) return eigenvalues[i];
    throw NumericError("lambda_above_cluster: no eigenvalue above the 1-cluster in range");
}

namespace {

struct EigPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    double residual = 0.0;
    int iterations = 0;
};

EigPairs dense_solve(const Eigen::SparseMatrix<double>& a, const Eigen::SparseMatrix<double>& m,
                     int k) {
    Eigen::MatrixXd ad = Eigen::MatrixXd(a), md = Eigen::MatrixXd(m);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ad, md);
    if (es.info() != Eigen::Success)
        throw NumericError("solve_spectrum: dense generalized eigensolver failed");
    EigPairs out;
    out.values = es.eigenvalues().head(k);
    out.vectors = es.eigenvectors().leftCols(k);
    out.iterations = 1;
    return out;
}

// Shift-invert block Lanczos for the k smallest eigenpairs of A z = lambda M z
// with diagonal M: standard form S = D^{-1/2} A D^{-1/2}, factor S + sigma I,
// deterministic start block, full reorthogonalization.
EigPairs lanczos_solve(const Eigen::SparseMatrix<double>& a,
                       const Eigen::SparseMatrix<double>& m, int k) {
    const int n = int(a.rows());
    Eigen::VectorXd d = m.diagonal();
    if ((d.array() <= 0).any()) throw NumericError("solve_spectrum: mass not positive");
    Eigen::VectorXd dsqrt = d.cwiseSqrt();
    Eigen::VectorXd dinv = dsqrt.cwiseInverse();

    Eigen::SparseMatrix<double> s = dinv.asDiagonal() * a * dinv.asDiagonal();
    const double sigma = 0.4;
    Eigen::SparseMatrix<double> shifted = s;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += sigma;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(shifted);
    if (llt.info() != Eigen::Success)
        throw NumericError("solve_spectrum: factorization of shifted operator failed");

    const int block = 4;
    const int m_max = std::min(n, std::max(6 * k + 40, 120));
    Eigen::MatrixXd q(n, m_max);
    int cols = 0;

    // deterministic start: all-ones plus fixed trigonometric perturbations
    auto start_vec = [&](int s_idx) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i)
            v[i] = (s_idx == 0 ? 1.0 : std::cos((s_idx + 1.0) * (i + 0.37)))
                   + 1e-3 * std::sin(0.7 * i + s_idx);
        return v;
    };
    auto orthonormalize_into = [&](Eigen::VectorXd v) -> bool {
        for (int pass = 0; pass < 2; ++pass)
            if (cols > 0) v -= q.leftCols(cols) * (q.leftCols(cols).transpose() * v);
        double nrm = v.norm();
        if (nrm < 1e-12) return false;
        q.col(cols++) = v / nrm;
        return true;
    };
    for (int i = 0; i < block && cols < m_max; ++i) orthonormalize_into(start_vec(i));

    int blocks_done = 0;
    int prev_start = 0, prev_count = cols;
    while (cols < m_max && prev_count > 0) {
        int new_start = cols;
        for (int i = 0; i < prev_count && cols < m_max; ++i) {
            Eigen::VectorXd z = llt.solve(q.col(prev_start + i));
            orthonormalize_into(std::move(z));
        }
        prev_count = cols - new_start;
        prev_start = new_start;
        ++blocks_done;
    }

    Eigen::MatrixXd qk = q.leftCols(cols);
    Eigen::MatrixXd sq = Eigen::MatrixXd(s * qk);
    Eigen::MatrixXd h = qk.transpose() * sq;
    h = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericError("solve_spectrum: Ritz solve failed");

    if (cols < k) throw NumericError("solve_spectrum: Krylov space smaller than k");
    EigPairs out;
    out.values = es.eigenvalues().head(k);
    Eigen::MatrixXd y = qk * es.eigenvectors().leftCols(k);
    double res = 0.0;
    for (int i = 0; i < k; ++i)
        res = std::max(res, (sq * es.eigenvectors().col(i) - out.values[i] * y.col(i)).norm());
    out.residual = res;
    out.iterations = blocks_done;
    if (res > 1e-7 * std::max(1.0, out.values.cwiseAbs().maxCoeff()))
        throw NumericError("solve_spectrum: Lanczos residual " + std::to_string(res) +
                           " did not converge");
    out.vectors = dinv.asDiagonal() * y;  // back to node space, mass-normalized
    return out;
}

}  // namespace

SpectralReport solve_spectrum(const OperatorForms& forms, int k, bool even_only,
                              int dense_limit) {
    SpectralReport rep;
    rep.even_restricted = even_only;
    rep.grid_descriptor = forms.grid->descriptor();

    const int nn = forms.grid->node_count();
    EigPairs pairs;
    if (even_only) {
        FoldedForms folded = fold_even(forms);
        const int m = int(folded.stiffness.rows());
        if (k > m) throw InputError("solve_spectrum: k exceeds even subspace dimension");
        if (m <= dense_limit) {
            pairs = dense_solve(folded.stiffness, folded.mass, k);
            rep.solver = "dense";
        } else {
            pairs = lanczos_solve(folded.stiffness, folded.mass, k);
            rep.solver = "lanczos";
        }
        // unfold representatives back to full node vectors
        Eigen::MatrixXd full(nn, k);
        for (int j = 0; j < nn; ++j) full.row(j) = pairs.vectors.row(folded.quotient.rep_of[j]);
        // folded mass already sums antipodal weights, so columns stay normalized
        pairs.vectors = full;
    } else {
        if (k > nn) throw InputError("solve_spectrum: k exceeds node count");
        if (nn <= dense_limit) {
            pairs = dense_solve(forms.stiffness, forms.mass, k);
            rep.solver = "dense";
        } else {
            pairs = lanczos_solve(forms.stiffness, forms.mass, k);
            rep.solver = "lanczos";
        }
    }
    rep.eigenvalues = pairs.values;
    rep.eigenvectors = pairs.vectors;
    rep.residual = pairs.residual;
    rep.iterations = pairs.iterations;
    return rep;
}

double lambda_1e(const Body& body, GridPtr grid) {
    SupportField f = sample_field(body, grid);
    OperatorForms forms = assemble(f);
    SpectralReport rep = solve_spectrum(forms, 2, true);
    return rep.eigenvalues[1];
}

double p_star(const Body& body, GridPtr grid) {
    const int n = grid->dim;
    return double(n) - double(n - 1) * lambda_1e(body, grid);
}

double equivariance_check(const Body& body, const Eigen::MatrixXd& t, GridPtr grid, int k) {
    BodyPtr image = make_linear_image(BodyPtr(&body, [](const Body*) {}), t);
    OperatorForms fk = assemble(sample_field(body, grid));
    OperatorForms ft = assemble(sample_field(*image, grid));
    SpectralReport rk = solve_spectrum(fk, k, false);
    SpectralReport rt = solve_spectrum(ft, k, false);
    double worst = 0.0;
    for (int i = 0; i < k; ++i) {
        double a = rk.eigenvalues[i], b = rt.eigenvalues[i];
        worst = std::max(worst, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}));
    }
    return worst;
}

double second_p_minkowski_margin(const OperatorForms& forms, const SupportField& K,
                                 const Eigen::VectorXd& z_in, double p) {
    const int n = K.dim();
    if (p >= n) throw InputError("second_p_minkowski_margin: requires p < n");
    Eigen::VectorXd z = even_projection(*K.grid, z_in);
    double first = mass_integral(forms, z);                  // V(zh;1)
    double second_mass = mass_bilinear(forms, z, z);         // V(z^2 h;1)
    double second = second_mass - dirichlet_form(forms, z);  // V(zh;2)
    return first * first / forms.volume - double(n - 1) / (n - p) * second -
           (1.0 - p) / (n - p) * second_mass;
}

double second_p_minkowski_margin(const SupportField& K, const Eigen::VectorXd& z, double p) {
    OperatorForms forms = assemble(K);
    return second_p_minkowski_margin(forms, K, z, p);
}

GeodesicReport geodesic_concavity(const Body& k0, const Body& k1, double p, int m_lambda,
                                  GridPtr grid) {
    if (m_lambda < 5) throw InputError("geodesic_concavity: need at least 5 lambda samples");
    if (p > 1.0) throw InputError("geodesic_concavity: p must be <= 1");
    SupportField f0 = sample_field(k0, grid);
    SupportField f1 = sample_field(k1, grid);
    const int n = grid->dim;

    GeodesicReport rep;
    rep.rows.reserve(m_lambda);
    double gmax = 0.0;
    for (int i = 0; i < m_lambda; ++i) {
        double lambda = double(i) / (m_lambda - 1);
        Eigen::VectorXd w = p_combination(f0, f1, lambda, p);
        WulffResult body = wulff_body(grid, w);
        WulffSupportCheck chk = wulff_is_support(grid, w, 1e-6);
        double g = (p == 0.0) ? std::log(body.volume)
                              : std::pow(body.volume, p / n) / p;
        rep.rows.push_back({lambda, body.volume, g, chk.is_support, chk.max_rel_gap});
        gmax = std::max(gmax, std::abs(g));
    }
    rep.max_second_difference = -std::numeric_limits<double>::infinity();
    rep.min_second_difference = std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < m_lambda; ++i) {
        double d2 = rep.rows[i - 1].g - 2.0 * rep.rows[i].g + rep.rows[i + 1].g;
        rep.max_second_difference = std::max(rep.max_second_difference, d2);
        rep.min_second_difference = std::min(rep.min_second_difference, d2);
    }
    rep.tol = 1e-7 * std::max(1.0, gmax);
    rep.concave = rep.max_second_difference <= rep.tol;
    return rep;
}

}  // namespace hbm
