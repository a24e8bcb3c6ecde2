#include "hbm/corpus.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "hbm/common.hpp"

namespace hbm {

BodyPtr random_planar_body(std::uint64_t seed, std::uint64_t index) {
    CounterRng rng(seed, index);
    for (int attempt = 0; attempt < 64; ++attempt) {
        double a = rng.uniform(0.8, 2.0);
        double b = rng.uniform(0.8, 2.0);
        double rot = rng.uniform(0.0, M_PI);
        double budget = 0.10 * std::min(a, b);
        std::vector<double> ck(3), sk(3);
        for (int k = 0; k < 3; ++k) {
            ck[k] = rng.uniform(-budget, budget) / double(k + 1);
            sk[k] = rng.uniform(-budget, budget) / double(k + 1);
        }
        BodyPtr body = make_trig_body(a, b, rot, ck, sk);
        // rejection: strict convexity with a safety margin on a dense sweep
        bool ok = true;
        for (int j = 0; j < 720 && ok; ++j) {
            double phi = 2.0 * M_PI * (j + 0.5) / 720;
            Vec3 theta(std::cos(phi), std::sin(phi), 0.0);
            double d2 = eval_d2h(*body, theta)(0, 0);
            double h = body->support(theta);
            if (!(d2 > 0.05 * std::min(a, b)) || !(h > 0.1)) ok = false;
        }
        if (ok) return body;
    }
    throw NumericError("random_planar_body: rejection sampling failed");
}

Eigen::Matrix2d random_planar_matrix(std::uint64_t seed, std::uint64_t index, double max_cond) {
    CounterRng rng(seed, index + 1000);
    double cond = std::exp(rng.uniform(0.0, std::log(max_cond)));
    double alpha = rng.uniform(0.0, 2.0 * M_PI);
    double beta = rng.uniform(0.0, 2.0 * M_PI);
    double scale = rng.uniform(0.7, 1.4);
    Eigen::Rotation2Dd ra(alpha), rb(beta);
    Eigen::Matrix2d diag = Eigen::Vector2d(cond, 1.0).asDiagonal();
    return scale * (ra.toRotationMatrix() * diag * rb.toRotationMatrix());
}

Eigen::Matrix3d random_spatial_matrix(std::uint64_t seed, std::uint64_t index, double max_cond) {
    CounterRng rng(seed, index + 2000);
    double cond = std::exp(rng.uniform(0.0, std::log(max_cond)));
    double mid = std::exp(rng.uniform(0.0, std::log(cond)));
    auto rotation = [&]() {
        Eigen::Vector3d axis(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        if (axis.norm() < 1e-3) axis = Eigen::Vector3d::UnitX();
        return Eigen::AngleAxisd(rng.uniform(0.0, M_PI), axis.normalized()).toRotationMatrix();
    };
    Eigen::Matrix3d diag = Eigen::Vector3d(cond, mid, 1.0).asDiagonal();
    double scale = rng.uniform(0.7, 1.4);
    return scale * (rotation() * diag * rotation());
}

}  // namespace hbm
