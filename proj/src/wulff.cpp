#include "hbm/wulff.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Dense>

namespace hbm {

namespace {
constexpr double kCollinearEps = 1e-12;
}

std::vector<int> convex_hull_2d(const std::vector<Eigen::Vector2d>& pts) {
    const int n = int(pts.size());
    if (n < 3) throw NumericError("convex_hull_2d: fewer than 3 points");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (pts[a].x() != pts[b].x()) return pts[a].x() < pts[b].x();
        return pts[a].y() < pts[b].y();
    });
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    const double eps = kCollinearEps * scale * scale;

    auto cross = [&](int o, int a, int b) {
        Eigen::Vector2d u = pts[a] - pts[o], v = pts[b] - pts[o];
        return u.x() * v.y() - u.y() * v.x();
    };
    std::vector<int> hull(2 * n);
    int k = 0;
    for (int ii = 0; ii < n; ++ii) {  // lower
        int i = order[ii];
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], i) <= eps) --k;
        hull[k++] = i;
    }
    for (int ii = n - 2, lower = k + 1; ii >= 0; --ii) {  // upper
        int i = order[ii];
        while (k >= lower && cross(hull[k - 2], hull[k - 1], i) <= eps) --k;
        hull[k++] = i;
    }
    hull.resize(k - 1);
    if (int(hull.size()) < 3) throw NumericError("convex_hull_2d: degenerate (collinear) hull");
    return hull;  // CCW
}

double polygon_area(const std::vector<Eigen::Vector2d>& loop) {
    double acc = 0.0;
    const int n = int(loop.size());
    for (int i = 0; i < n; ++i) {
        const auto& a = loop[i];
        const auto& b = loop[(i + 1) % n];
        acc += a.x() * b.y() - a.y() * b.x();
    }
    return 0.5 * acc;
}

// ---------------------------------------------------------------------------
// incremental 3D hull with conflict lists

namespace {

struct HullFace {
    std::array<int, 3> v;
    Vec3 normal;  // outward, unit
    double offset;
    bool alive = true;
    std::vector<int> conflicts;
};

double face_dist(const HullFace& f, const Vec3& p) { return f.normal.dot(p) - f.offset; }

}  // namespace

std::vector<std::array<int, 3>> convex_hull_3d(const std::vector<Vec3>& pts) {
    const int n = int(pts.size());
    if (n < 4) throw NumericError("convex_hull_3d: fewer than 4 points");
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    const double eps = 1e-12 * scale;

    // seed tetrahedron: extremes in x, then line, then plane
    int a = 0, b = 0;
    for (int i = 1; i < n; ++i) {
        if (pts[i].x() < pts[a].x()) a = i;
        if (pts[i].x() > pts[b].x()) b = i;
    }
    if ((pts[a] - pts[b]).norm() < eps) throw NumericError("convex_hull_3d: degenerate points");
    int c = -1;
    double best = eps;
    for (int i = 0; i < n; ++i) {
        double d = (pts[i] - pts[a]).cross(pts[b] - pts[a]).norm();
        if (d > best) {
            best = d;
            c = i;
        }
    }
    if (c < 0) throw NumericError("convex_hull_3d: all points collinear");
    Vec3 nrm = (pts[b] - pts[a]).cross(pts[c] - pts[a]).normalized();
    int d = -1;
    best = eps;
    for (int i = 0; i < n; ++i) {
        double t = std::abs(nrm.dot(pts[i] - pts[a]));
        if (t > best) {
            best = t;
            d = i;
        }
    }
    if (d < 0) throw NumericError("convex_hull_3d: all points coplanar");

    Vec3 centroid = (pts[a] + pts[b] + pts[c] + pts[d]) / 4.0;
    std::vector<HullFace> faces;
    auto add_face = [&](int i, int j, int k) {
        HullFace f;
        f.v = {i, j, k};
        Vec3 nn = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
        if (nn.norm() < eps * eps) nn = Vec3(0, 0, 1);
        nn.normalize();
        double off = nn.dot(pts[i]);
        if (nn.dot(centroid) - off > 0) {  // flip outward
            std::swap(f.v[1], f.v[2]);
            nn = -nn;
            off = -off;
        }
        f.normal = nn;
        f.offset = off;
        faces.push_back(std::move(f));
        return int(faces.size()) - 1;
    };
    add_face(a, b, c);
    add_face(a, b, d);
    add_face(a, c, d);
    add_face(b, c, d);

    for (auto& f : faces)
        for (int i = 0; i < n; ++i)
            if (face_dist(f, pts[i]) > eps) f.conflicts.push_back(i);

    for (;;) {
        // deterministic: first live face with conflicts, then its farthest point
        int fi = -1;
        for (int i = 0; i < int(faces.size()); ++i)
            if (faces[i].alive && !faces[i].conflicts.empty()) {
                fi = i;
                break;
            }
        if (fi < 0) break;
        int p = -1;
        double far = -1;
        for (int cand : faces[fi].conflicts) {
            double dd = face_dist(faces[fi], pts[cand]);
            if (dd > far + 1e-18 || (dd > far - 1e-18 && (p < 0 || cand < p))) {
                far = dd;
                p = cand;
            }
        }

        // visible faces and horizon
        std::vector<int> visible;
        for (int i = 0; i < int(faces.size()); ++i)
            if (faces[i].alive && face_dist(faces[i], pts[p]) > eps) visible.push_back(i);
        std::map<std::pair<int, int>, int> edge_count;
        for (int vi : visible)
            for (int e = 0; e < 3; ++e) {
                int u = faces[vi].v[e], w = faces[vi].v[(e + 1) % 3];
                auto key = std::minmax(u, w);
                edge_count[{key.first, key.second}]++;
            }
        std::vector<std::pair<int, int>> horizon;  // directed as in visible faces
        for (int vi : visible)
            for (int e = 0; e < 3; ++e) {
                int u = faces[vi].v[e], w = faces[vi].v[(e + 1) % 3];
                auto key = std::minmax(u, w);
                if (edge_count[{key.first, key.second}] == 1) horizon.push_back({u, w});
            }

        std::vector<int> pool;
        for (int vi : visible) {
            faces[vi].alive = false;
            for (int q : faces[vi].conflicts)
                if (q != p) pool.push_back(q);
        }
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

        for (const auto& [u, w] : horizon) {
            int nf = add_face(u, w, p);
            for (int q : pool)
                if (face_dist(faces[nf], pts[q]) > eps) faces[nf].conflicts.push_back(q);
        }
    }

    std::vector<std::array<int, 3>> out;
    for (const auto& f : faces)
        if (f.alive) out.push_back(f.v);
    if (out.size() < 4) throw NumericError("convex_hull_3d: degenerate hull");
    return out;
}

// ---------------------------------------------------------------------------

namespace {

double polytope_volume_3d(const std::vector<Vec3>& verts) {
    auto facets = convex_hull_3d(verts);
    double vol = 0.0;
    for (const auto& f : facets)
        vol += verts[f[0]].cross(verts[f[1]]).dot(verts[f[2]]) / 6.0;
    return vol;
}

}  // namespace

WulffResult wulff_body(GridPtr grid, const Eigen::VectorXd& w) {
    if (w.size() != grid->node_count()) throw InputError("wulff_body: value count mismatch");
    for (int j = 0; j < w.size(); ++j)
        if (!(w[j] > 0))
            throw NumericError("wulff_body: w must be positive, node " + std::to_string(j));

    WulffResult res;
    res.grid = grid;
    const int n = grid->node_count();

    if (grid->dim == 2) {
        std::vector<Eigen::Vector2d> pts(n);
        for (int j = 0; j < n; ++j)
            pts[j] = Eigen::Vector2d(grid->nodes[j].x(), grid->nodes[j].y()) / w[j];
        std::vector<int> hull = convex_hull_2d(pts);
        const int m = int(hull.size());
        std::vector<Eigen::Vector2d> poly;
        poly.reserve(m);
        for (int e = 0; e < m; ++e) {
            const auto& p = pts[hull[e]];
            const auto& q = pts[hull[(e + 1) % m]];
            double det = p.x() * q.y() - p.y() * q.x();
            if (std::abs(det) < 1e-300)
                throw NumericError("wulff_body: degenerate dual edge");
            // vertex of the polar polygon: <v,p> = <v,q> = 1
            poly.emplace_back((q.y() - p.y()) / det, (p.x() - q.x()) / det);
        }
        res.volume = std::abs(polygon_area(poly));
        res.vertices.reserve(m);
        for (const auto& v : poly) res.vertices.emplace_back(v.x(), v.y(), 0.0);
        res.h_resampled.resize(n);
        for (int j = 0; j < n; ++j) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& v : poly)
                best = std::max(best, v.x() * grid->nodes[j].x() + v.y() * grid->nodes[j].y());
            res.h_resampled[j] = best;
        }
    } else {
        std::vector<Vec3> pts(n);
        for (int j = 0; j < n; ++j) pts[j] = grid->nodes[j] / w[j];
        auto facets = convex_hull_3d(pts);
        std::vector<Vec3> polar;
        polar.reserve(facets.size());
        std::map<std::array<long long, 3>, bool> seen;
        for (const auto& f : facets) {
            Eigen::Matrix3d m;
            m.row(0) = pts[f[0]];
            m.row(1) = pts[f[1]];
            m.row(2) = pts[f[2]];
            Vec3 v = m.partialPivLu().solve(Vec3::Ones());
            std::array<long long, 3> key{llround(v.x() * 1e9), llround(v.y() * 1e9),
                                         llround(v.z() * 1e9)};
            if (!seen.emplace(key, true).second) continue;
            polar.push_back(v);
        }
        res.vertices = polar;
        res.volume = polytope_volume_3d(polar);
        res.h_resampled.resize(n);
        for (int j = 0; j < n; ++j) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& v : polar) best = std::max(best, v.dot(grid->nodes[j]));
            res.h_resampled[j] = best;
        }
    }
    return res;
}

Eigen::VectorXd p_combination(const SupportField& h0, const SupportField& h1, double lambda,
                              double p) {
    if (h0.grid != h1.grid && h0.grid->descriptor() != h1.grid->descriptor())
        throw InputError("p_combination: fields must share one grid");
    if (lambda < 0.0 || lambda > 1.0) throw InputError("p_combination: lambda must be in [0,1]");
    if (lambda == 0.0) return h0.h;
    if (lambda == 1.0) return h1.h;
    const int n = h0.node_count();
    Eigen::VectorXd w(n);
    if (p == 0.0) {
        for (int j = 0; j < n; ++j)
            w[j] = std::pow(h0.h[j], 1.0 - lambda) * std::pow(h1.h[j], lambda);
    } else {
        for (int j = 0; j < n; ++j) {
            double v = (1.0 - lambda) * std::pow(h0.h[j], p) + lambda * std::pow(h1.h[j], p);
            if (!(v > 0)) throw NumericError("p_combination: nonpositive Wulff value");
            w[j] = std::pow(v, 1.0 / p);
        }
    }
    return w;
}

WulffSupportCheck wulff_is_support(GridPtr grid, const Eigen::VectorXd& w, double tol) {
    WulffResult a = wulff_body(grid, w);
    WulffSupportCheck out{true, 0.0, 0};
    for (int j = 0; j < w.size(); ++j) {
        double gap = (w[j] - a.h_resampled[j]) / w[j];
        if (gap > out.max_rel_gap) {
            out.max_rel_gap = gap;
            out.worst_node = j;
        }
    }
    out.is_support = out.max_rel_gap <= tol;
    return out;
}

}  // namespace hbm
