#include "hbm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <Eigen/Geometry>

namespace hbm {

int worker_count() {
    if (const char* env = std::getenv("HBM_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(hc) : 1;
}

double SphereGrid::weight_total() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

std::string SphereGrid::descriptor() const {
    std::ostringstream os;
    if (dim == 2)
        os << "s1:N=" << node_count();
    else
        os << "s2:L=" << level;
    return os.str();
}

void tangent_frame(const Vec3& theta, Vec3& t1, Vec3& t2) {
    // pick the coordinate axis least aligned with theta; deterministic
    int axis = 0;
    double best = std::abs(theta[0]);
    for (int i = 1; i < 3; ++i)
        if (std::abs(theta[i]) < best) {
            best = std::abs(theta[i]);
            axis = i;
        }
    Vec3 e = Vec3::Zero();
    e[axis] = 1.0;
    t1 = e.cross(theta).normalized();
    t2 = theta.cross(t1);
}

static double axis_distance(const Vec3& v) {
    double best = M_PI;
    for (int i = 0; i < 3; ++i) {
        double c = std::clamp(std::abs(v[i]), 0.0, 1.0);
        best = std::min(best, std::acos(c));
    }
    return best;
}

GridPtr build_circle_grid(int n_nodes) {
    if (n_nodes < 16 || n_nodes % 2 != 0)
        throw InputError("build_circle_grid: N must be even and >= 16, got " +
                         std::to_string(n_nodes));
    auto g = std::make_shared<SphereGrid>();
    g->dim = 2;
    g->dphi = 2.0 * M_PI / n_nodes;
    g->nodes.resize(n_nodes);
    g->phi.resize(n_nodes);
    g->weights.assign(n_nodes, g->dphi);
    g->antipode.resize(n_nodes);
    g->tangent1.resize(n_nodes);
    double min_axis = M_PI;
    for (int j = 0; j < n_nodes; ++j) {
        double phi = 2.0 * M_PI * (j + 0.5) / n_nodes;
        g->phi[j] = phi;
        g->nodes[j] = Vec3(std::cos(phi), std::sin(phi), 0.0);
        g->tangent1[j] = Vec3(-std::sin(phi), std::cos(phi), 0.0);
        g->antipode[j] = (j + n_nodes / 2) % n_nodes;
        // distance to the four semi-axis directions in the plane
        double d = std::fmod(phi, M_PI / 2);
        min_axis = std::min(min_axis, std::min(d, M_PI / 2 - d));
    }
    g->min_axis_distance = min_axis;
    return g;
}

namespace {

struct IcoMesh {
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> tris;
};

IcoMesh icosahedron() {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    IcoMesh m;
    m.verts = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : m.verts) v.normalize();
    m.tris = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
              {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
              {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
              {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    return m;
}

IcoMesh subdivide(const IcoMesh& in) {
    IcoMesh out;
    out.verts = in.verts;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        Vec3 v = (in.verts[a] + in.verts[b]).normalized();
        int idx = int(out.verts.size());
        out.verts.push_back(v);
        midpoint.emplace(key, idx);
        return idx;
    };
    for (const auto& tri : in.tris) {
        int a = tri[0], b = tri[1], c = tri[2];
        int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
        out.tris.push_back({a, ab, ca});
        out.tris.push_back({b, bc, ab});
        out.tris.push_back({c, ca, bc});
        out.tris.push_back({ab, bc, ca});
    }
    return out;
}

}  // namespace

GridPtr build_icosphere(int level) {
    if (level < 0 || level > 7)
        throw InputError("build_icosphere: level must be in 0..7, got " + std::to_string(level));
    IcoMesh m = icosahedron();
    for (int l = 0; l < level; ++l) m = subdivide(m);

    // fixed rotation so no vertex is axis aligned
    Eigen::Matrix3d rot = (Eigen::AngleAxisd(0.3, Vec3::UnitZ()) *
                           Eigen::AngleAxisd(0.2, Vec3::UnitY()) *
                           Eigen::AngleAxisd(0.1, Vec3::UnitX()))
                              .toRotationMatrix();
    for (auto& v : m.verts) v = rot * v;

    auto g = std::make_shared<SphereGrid>();
    g->dim = 3;
    g->level = level;
    g->nodes = m.verts;
    g->triangles = m.tris;

    const int nv = g->node_count();
    g->weights.assign(nv, 0.0);
    g->tri_area.resize(m.tris.size());
    g->tri_centroid_dir.resize(m.tris.size());
    for (std::size_t t = 0; t < m.tris.size(); ++t) {
        const auto& tri = m.tris[t];
        const Vec3 &a = m.verts[tri[0]], &b = m.verts[tri[1]], &c = m.verts[tri[2]];
        double area = 0.5 * ((b - a).cross(c - a)).norm();
        g->tri_area[t] = area;
        g->tri_centroid_dir[t] = ((a + b + c) / 3.0).normalized();
        for (int i = 0; i < 3; ++i) g->weights[tri[i]] += area / 3.0;
    }

    // antipodal pairing; the subdivided icosahedron is centrally symmetric,
    // so -v must match a vertex essentially exactly
    g->antipode.assign(nv, -1);
    std::map<std::array<long long, 3>, int> index;
    auto key_of = [](const Vec3& v) {
        const double s = 1e12;
        return std::array<long long, 3>{llround(v.x() * s), llround(v.y() * s),
                                        llround(v.z() * s)};
    };
    for (int i = 0; i < nv; ++i) index[key_of(m.verts[i])] = i;
    for (int i = 0; i < nv; ++i) {
        auto it = index.find(key_of(-m.verts[i]));
        if (it == index.end() || it->second == i)
            throw NumericError("build_icosphere: antipodal pairing failed at vertex " +
                               std::to_string(i));
        g->antipode[i] = it->second;
    }

    g->tangent1.resize(nv);
    g->tangent2.resize(nv);
    double min_axis = M_PI;
    for (int i = 0; i < nv; ++i) {
        tangent_frame(g->nodes[i], g->tangent1[i], g->tangent2[i]);
        min_axis = std::min(min_axis, axis_distance(g->nodes[i]));
    }
    g->min_axis_distance = min_axis;
    return g;
}

GridPtr parse_grid(const std::string& s) {
    if (s.rfind("s1:N=", 0) == 0) {
        int n = std::atoi(s.c_str() + 5);
        if (n <= 0) throw ParseError("grid: bad node count in '" + s + "'", 5);
        return build_circle_grid(n);
    }
    if (s.rfind("s2:L=", 0) == 0) {
        int l = std::atoi(s.c_str() + 5);
        return build_icosphere(l);
    }
    throw ParseError("grid: expected 's1:N=<n>' or 's2:L=<l>', got '" + s + "'", 0);
}

Eigen::VectorXd midpoint_derivative(const SphereGrid& grid, const Eigen::VectorXd& z) {
    if (grid.dim != 2) throw InputError("midpoint_derivative: n=2 grids only");
    const int n = grid.node_count();
    Eigen::VectorXd out(n);
    for (int j = 0; j < n; ++j) out[j] = (z[(j + 1) % n] - z[j]) / grid.dphi;
    return out;
}

Eigen::VectorXd midpoint_average(const SphereGrid& grid, const Eigen::VectorXd& z) {
    if (grid.dim != 2) throw InputError("midpoint_average: n=2 grids only");
    const int n = grid.node_count();
    Eigen::VectorXd out(n);
    for (int j = 0; j < n; ++j) out[j] = 0.5 * (z[(j + 1) % n] + z[j]);
    return out;
}

Vec3 triangle_gradient(const SphereGrid& grid, const Eigen::VectorXd& z, int t) {
    const auto& tri = grid.triangles[t];
    const Vec3 &a = grid.nodes[tri[0]], &b = grid.nodes[tri[1]], &c = grid.nodes[tri[2]];
    Vec3 normal = (b - a).cross(c - a);
    double twice_area = normal.norm();
    normal /= twice_area;
    // grad lambda_i = n x e_i / (2A) with e_i the opposite edge
    Vec3 g0 = normal.cross(c - b) / twice_area;
    Vec3 g1 = normal.cross(a - c) / twice_area;
    Vec3 g2 = normal.cross(b - a) / twice_area;
    return z[tri[0]] * g0 + z[tri[1]] * g1 + z[tri[2]] * g2;
}

Eigen::VectorXd even_projection(const SphereGrid& grid, const Eigen::VectorXd& z) {
    Eigen::VectorXd out(z.size());
    for (int j = 0; j < grid.node_count(); ++j) out[j] = 0.5 * (z[j] + z[grid.antipode[j]]);
    return out;
}

EvenQuotient even_quotient(const SphereGrid& grid) {
    EvenQuotient q;
    const int n = grid.node_count();
    q.rep_of.assign(n, -1);
    for (int j = 0; j < n; ++j) {
        if (j < grid.antipode[j]) {
            q.rep_of[j] = int(q.representative.size());
            q.representative.push_back(j);
        }
    }
    for (int j = 0; j < n; ++j)
        if (q.rep_of[j] < 0) q.rep_of[j] = q.rep_of[grid.antipode[j]];
    return q;
}

std::string dump_mesh(const SphereGrid& grid) {
    std::ostringstream os;
    os.precision(17);
    for (int i = 0; i < grid.node_count(); ++i) {
        const Vec3& v = grid.nodes[i];
        os << v.x() << " " << v.y() << " " << v.z() << " " << grid.weights[i] << "\n";
    }
    for (const auto& t : grid.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
    return os.str();
}

}  // namespace hbm
