#include "hbm/stability.hpp"

#include <algorithm>
#include <cmath>

#include "hbm/measures.hpp"
#include "hbm/wulff.hpp"

namespace hbm {

double rkl(const OperatorForms& k_forms, const SupportField& K, const SupportField& L) {
    return dirichlet_form(k_forms, field_ratio(L, K));
}

double rkl(const SupportField& K, const SupportField& L) {
    OperatorForms forms = assemble(K);
    return rkl(forms, K, L);
}

double variance_ratio(const OperatorForms& k_forms, const SupportField& K,
                      const SupportField& L) {
    Eigen::VectorXd z = field_ratio(L, K);
    double mean_part = mass_integral(k_forms, z);
    return mass_bilinear(k_forms, z, z) - mean_part * mean_part / k_forms.volume;
}

std::pair<double, double> minkowski2_margins(const SupportField& K, const SupportField& L,
                                             double p) {
    if (p > 1.0) throw InputError("minkowski2_margins: requires p <= 1");
    const int n = K.dim();
    OperatorForms forms = assemble(K);
    Eigen::VectorXd z = field_ratio(L, K);
    double v_lk = mass_integral(forms, z);
    double zz = mass_bilinear(forms, z, z);
    double r = dirichlet_form(forms, z);
    double v_llk = zz - r;
    double var = zz - v_lk * v_lk / forms.volume;
    double base = v_lk * v_lk / forms.volume - v_llk;
    double m1 = base - (1.0 - p) / (n - p) * r;
    double m2 = base - (1.0 - p) / (n - 1) * var;
    if (r >= double(n - p) / (n - 1) * var && m1 > m2 + 1e-12)
        throw NumericError("minkowski2_margins: margin ordering violated");
    return {m1, m2};
}

double isoperimetric_margin(const SupportField& K, const SupportField& L, double p) {
    if (p > 1.0) throw InputError("isoperimetric_margin: requires p <= 1");
    const int n = K.dim();
    OperatorForms forms = assemble(K);
    Eigen::VectorXd z = field_ratio(L, K);
    double perim = double(n) * mass_integral(forms, z);  // n V(L,K,...,K)
    double vol_k = forms.volume;
    double vol_l = volume(L);
    double sharp = double(n) * std::pow(vol_l, 1.0 / n) * std::pow(vol_k, double(n - 1) / n);
    double r = dirichlet_form(forms, z);
    return perim * perim - sharp * sharp - double(n) * n * (1.0 - p) / (n - p) * vol_k * r;
}

double bm_margin(const SupportField& K, const SupportField& L, double p) {
    if (p > 1.0) throw InputError("bm_margin: requires p <= 1");
    const int n = K.dim();
    SupportField sum = field_add(K, L);
    OperatorForms forms = assemble(sum);
    double r = rkl(forms, sum, K);
    double vol_sum = forms.volume;
    double lhs = std::pow(vol_sum, 1.0 / n) /
                     (std::pow(volume(K), 1.0 / n) + std::pow(volume(L), 1.0 / n)) -
                 1.0;
    return lhs - 2.0 * (1.0 - p) / (n - p) * r / vol_sum;
}

// ---------------------------------------------------------------------------
// polygon machinery

Polygon polygonize(const Body& body, int segments) {
    if (body.dim() != 2) throw InputError("polygonize: planar bodies only");
    Polygon out(segments);
    for (int j = 0; j < segments; ++j) {
        double phi = 2.0 * M_PI * (j + 0.5) / segments;
        Vec3 theta(std::cos(phi), std::sin(phi), 0.0);
        Vec3 grad = body.support_gradient(theta);  // boundary point via Weingarten map
        out[j] = Eigen::Vector2d(grad.x(), grad.y());
    }
    return out;
}

Polygon polygonize(const SupportField& field) {
    if (field.dim() != 2) throw InputError("polygonize: planar fields only");
    const SphereGrid& grid = *field.grid;
    Polygon out(grid.node_count());
    for (int j = 0; j < grid.node_count(); ++j) {
        Eigen::Vector2d theta(grid.nodes[j].x(), grid.nodes[j].y());
        Eigen::Vector2d tang(-theta.y(), theta.x());
        out[j] = field.h[j] * theta + field.grad1[j] * tang;
    }
    return out;
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
    Polygon poly = subject;
    const int m = int(clip.size());
    for (int e = 0; e < m && !poly.empty(); ++e) {
        const Eigen::Vector2d& a = clip[e];
        const Eigen::Vector2d& b = clip[(e + 1) % m];
        Eigen::Vector2d edge = b - a;
        auto inside = [&](const Eigen::Vector2d& p) {
            return edge.x() * (p.y() - a.y()) - edge.y() * (p.x() - a.x()) >= 0.0;
        };
        Polygon next;
        next.reserve(poly.size() + 4);
        const int k = int(poly.size());
        for (int i = 0; i < k; ++i) {
            const Eigen::Vector2d& cur = poly[i];
            const Eigen::Vector2d& nxt = poly[(i + 1) % k];
            bool cin = inside(cur), nin = inside(nxt);
            if (cin) next.push_back(cur);
            if (cin != nin) {
                Eigen::Vector2d d = nxt - cur;
                double denom = edge.x() * d.y() - edge.y() * d.x();
                double t = (edge.y() * (cur.x() - a.x()) - edge.x() * (cur.y() - a.y())) / denom;
                next.push_back(cur + t * d);
            }
        }
        poly.swap(next);
    }
    return poly;
}

Polygon minkowski_sum(const Polygon& a, const Polygon& b) {
    // edge merge by angle; both loops CCW
    auto lowest = [](const Polygon& p) {
        int best = 0;
        for (int i = 1; i < int(p.size()); ++i)
            if (p[i].y() < p[best].y() || (p[i].y() == p[best].y() && p[i].x() < p[best].x()))
                best = i;
        return best;
    };
    const int na = int(a.size()), nb = int(b.size());
    int ia = lowest(a), ib = lowest(b);
    Polygon out;
    out.reserve(a.size() + b.size());
    int ca = 0, cb = 0;
    Eigen::Vector2d cur = a[ia] + b[ib];
    auto angle = [](const Eigen::Vector2d& v) {
        double t = std::atan2(v.y(), v.x());
        if (t < 0) t += 2.0 * M_PI;
        return t;
    };
    while (ca < na || cb < nb) {
        out.push_back(cur);
        Eigen::Vector2d ea = a[(ia + 1) % na] - a[ia % na];
        Eigen::Vector2d eb = b[(ib + 1) % nb] - b[ib % nb];
        bool take_a;
        if (ca >= na)
            take_a = false;
        else if (cb >= nb)
            take_a = true;
        else
            take_a = angle(ea) <= angle(eb);
        if (take_a) {
            cur += ea;
            ++ia;
            ++ca;
        } else {
            cur += eb;
            ++ib;
            ++cb;
        }
    }
    return out;
}

double polygon_support(const Polygon& poly, const Eigen::Vector2d& direction) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : poly) best = std::max(best, v.dot(direction));
    return best;
}

namespace {

double area(const Polygon& p) {
    if (p.size() < 3) return 0.0;
    double acc = 0.0;
    const int n = int(p.size());
    for (int i = 0; i < n; ++i) {
        const auto &u = p[i], &v = p[(i + 1) % n];
        acc += u.x() * v.y() - u.y() * v.x();
    }
    return 0.5 * std::abs(acc);
}

double aniso_perimeter(const Polygon& k, const Polygon& l) {
    // P_L(K) = sum over edges of |e| * h_L(nu_e)
    double acc = 0.0;
    const int n = int(k.size());
    for (int i = 0; i < n; ++i) {
        Eigen::Vector2d e = k[(i + 1) % n] - k[i];
        double len = e.norm();
        if (len == 0) continue;
        Eigen::Vector2d nu(e.y() / len, -e.x() / len);
        acc += len * polygon_support(l, nu);
    }
    return acc;
}

Polygon translate(const Polygon& p, const Eigen::Vector2d& t) {
    Polygon out = p;
    for (auto& v : out) v += t;
    return out;
}

}  // namespace

DeficitReport deficits(const Polygon& k, const Polygon& l) {
    if (k.size() < 3 || l.size() < 3) throw InputError("deficits: degenerate polygon");
    DeficitReport rep{};
    double vk = area(k), vl = area(l);
    if (vk <= 0 || vl <= 0) throw NumericError("deficits: degenerate polygonization");
    double perim = aniso_perimeter(k, l);
    rep.delta = perim / (2.0 * std::sqrt(vl) * std::sqrt(vk)) - 1.0;

    Polygon sum = minkowski_sum(k, l);
    rep.beta = std::sqrt(area(sum)) / (std::sqrt(vk) + std::sqrt(vl)) - 1.0;

    double r = std::sqrt(vk / vl);
    rep.sigma = std::max(r, 1.0 / r);

    Polygon rl;
    rl.reserve(l.size());
    for (const auto& v : l) rl.push_back(r * v);
    auto sym_diff_ratio = [&](const Eigen::Vector2d& shift) {
        double inter = area(clip_convex(k, translate(rl, shift)));
        return 2.0 * (vk - inter) / vk;
    };
    // x0 = 0 is optimal for origin-symmetric pairs; a 9-point refine search
    // otherwise (upper bound on the infimum)
    double best = sym_diff_ratio(Eigen::Vector2d::Zero());
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double step = 0.25 * std::sqrt(vk);
    for (int round = 0; round < 4; ++round) {
        Eigen::Vector2d improved = center;
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
                Eigen::Vector2d cand = center + step * Eigen::Vector2d(dx, dy);
                double v = sym_diff_ratio(cand);
                if (v < best) {
                    best = v;
                    improved = cand;
                }
            }
        center = improved;
        step *= 0.5;
    }
    rep.asymmetry = best;
    return rep;
}

BonnesenReport bonnesen_compare(const SupportField& K, const SupportField& L, double p) {
    if (K.dim() != 2) throw InputError("bonnesen_compare: planar pairs only");
    BonnesenReport rep{};
    Eigen::VectorXd ratio = K.h.cwiseQuotient(L.h);
    rep.inradius = ratio.minCoeff();
    rep.outradius = ratio.maxCoeff();

    OperatorForms forms = assemble(K);
    Eigen::VectorXd z = field_ratio(L, K);
    double perim = 2.0 * mass_integral(forms, z);
    double vol_k = forms.volume;
    double vol_l = volume(L);
    rep.lhs = perim * perim / vol_k;

    const SphereGrid& grid = *K.grid;
    double polar_k = 0.0, polar_l = 0.0;
    for (int j = 0; j < grid.node_count(); ++j) {
        polar_k += 0.5 * grid.weights[j] / (K.h[j] * K.h[j]);
        polar_l += 0.5 * grid.weights[j] / (L.h[j] * L.h[j]);
    }
    rep.polar_area_k = polar_k;
    rep.polar_area_l = polar_l;

    double dr = rep.outradius - rep.inradius;
    rep.rhs_classical = 4.0 * vol_l + vol_l * vol_l / vol_k * dr * dr;
    double inv_gap = 1.0 / rep.inradius - 1.0 / rep.outradius;
    double log_gap = std::log(rep.outradius / rep.inradius);
    double core = std::max(8.0 / polar_k * inv_gap * inv_gap, 8.0 / polar_l * log_gap * log_gap);
    rep.rhs_local = 4.0 * vol_l + 2.0 * (1.0 - p) / (2.0 - p) * core;
    rep.local_bound_larger = rep.rhs_local > rep.rhs_classical;
    return rep;
}

StabilityReport stability_report(const SupportField& K, const SupportField& L, double p) {
    StabilityReport rep{};
    OperatorForms forms = assemble(K);
    Eigen::VectorXd z = field_ratio(L, K);
    rep.vol_k = forms.volume;
    rep.vol_l = volume(L);
    rep.v_lk = mass_integral(forms, z);
    double zz = mass_bilinear(forms, z, z);
    rep.r_kl = dirichlet_form(forms, z);
    rep.v_llk = zz - rep.r_kl;
    rep.variance = zz - rep.v_lk * rep.v_lk / forms.volume;
    rep.p_used = p;
    auto m2 = minkowski2_margins(K, L, p);
    rep.margin_minkowski2_r = m2.first;
    rep.margin_minkowski2_var = m2.second;
    rep.margin_isoperimetric = isoperimetric_margin(K, L, p);
    rep.margin_bm = bm_margin(K, L, p);
    rep.def = deficits(polygonize(K), polygonize(L));
    rep.bon = bonnesen_compare(K, L, p);
    return rep;
}

}  // namespace hbm
