#include "siopt/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace siopt {

NoiseShape noise_shape_from_string(const std::string& name) {
    if (name == "rank_one") return NoiseShape::RankOne;
    if (name == "entrywise") return NoiseShape::Entrywise;
    throw std::invalid_argument("unknown noise shape: " + name);
}

std::string to_string(NoiseShape shape) {
    return shape == NoiseShape::RankOne ? "rank_one" : "entrywise";
}

void NoiseModel::validate() const {
    if (!(p > 1.0 && p <= 2.0)) {
        throw std::invalid_argument("noise: p must lie in (1, 2]");
    }
    if (sigma0 < 0.0 || sigma1 < 0.0) {
        throw std::invalid_argument("noise: sigma0/sigma1 must be nonnegative");
    }
    if (!(tail_index > p && tail_index <= 2.0)) {
        throw std::invalid_argument("noise: tail_index must lie in (p, 2]");
    }
}

double pareto_scalar(double p, double sigma, double tail_index, Rng& rng) {
    if (tail_index <= p) {
        throw std::invalid_argument("pareto_scalar: tail_index must exceed p");
    }
    if (sigma < 0.0) throw std::invalid_argument("pareto_scalar: sigma must be >= 0");
    if (sigma == 0.0) {
        // keep draw counts identical to the nonzero path
        rng.uniform01();
        rng.fair_sign_positive();
        return 0.0;
    }
    const double a = tail_index;
    const double z0 = sigma * std::pow((a - p) / a, 1.0 / p);
    const double magnitude = z0 * std::pow(rng.uniform01(), -1.0 / a);
    return rng.fair_sign_positive() ? magnitude : -magnitude;
}

namespace {

Matrix entrywise_pareto(const NoiseModel& nm, int rows, int cols, Rng& rng) {
    Matrix z(rows, cols);
    for (auto& x : z.data()) x = pareto_scalar(nm.p, 1.0, nm.tail_index, rng);
    return z;
}

}  // namespace

NoiseDraw sample_noise(const NoiseModel& nm, const Geometry& g, double grad_dual, Rng& rng) {
    nm.validate();
    if (nm.shape == NoiseShape::RankOne) {
        // zeta * u v^T / ||u v^T||_*, so the dual norm is exactly |zeta|
        const double zeta0 = pareto_scalar(nm.p, nm.sigma0, nm.tail_index, rng);
        const double zeta1 = pareto_scalar(nm.p, nm.sigma1, nm.tail_index, rng);
        const double zeta = zeta0 + zeta1 * grad_dual;
        const auto u = random_unit_vector(g.d_out, rng);
        const auto v = random_unit_vector(g.d_in, rng);
        Matrix outer(g.d_out, g.d_in);
        for (int i = 0; i < g.d_out; ++i)
            for (int j = 0; j < g.d_in; ++j) outer(i, j) = u[i] * v[j];
        const double base_dual = dual_norm(g, outer);
        NoiseDraw draw;
        draw.noise = outer * (zeta / base_dual);
        draw.zeta_magnitude = std::fabs(zeta);
        return draw;
    }
    if (nm.entrywise_scale <= 0.0) {
        throw std::invalid_argument("sample_noise: entrywise model is uncalibrated");
    }
    const double total =
        std::pow(std::pow(nm.sigma0, nm.p) + std::pow(nm.sigma1 * grad_dual, nm.p), 1.0 / nm.p);
    NoiseDraw draw;
    draw.noise = entrywise_pareto(nm, g.d_out, g.d_in, rng) * (nm.entrywise_scale * total);
    draw.zeta_magnitude = 0.0;
    return draw;
}

NoiseModel calibrate_entrywise(NoiseModel nm, const Geometry& g, int trials, Rng& rng) {
    nm.validate();
    if (trials < 1) throw std::invalid_argument("calibrate_entrywise: trials must be >= 1");
    double moment = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Matrix z = entrywise_pareto(nm, g.d_out, g.d_in, rng);
        moment += std::pow(dual_norm(g, z), nm.p);
    }
    moment /= trials;
    nm.entrywise_scale = 1.0 / std::pow(moment, 1.0 / nm.p);
    return nm;
}

GradSample sample_batch_grad(const Objective& obj, const NoiseModel& nm, const Geometry& g,
                             const Matrix& x, int b, Rng& rng) {
    if (b < 1) throw std::invalid_argument("sample_batch_grad: batch must be >= 1");
    nm.validate();
    const Matrix grad = gradient(obj, x);
    GradSample sample;
    sample.batch = b;
    sample.oracle_calls = b;
    if (nm.sigma0 == 0.0 && nm.sigma1 == 0.0) {
        sample.mean_grad = grad;
        return sample;
    }
    const double grad_dual = nm.sigma1 > 0.0 ? dual_norm(g, grad) : 0.0;
    Matrix accum(g.d_out, g.d_in);
    for (int i = 0; i < b; ++i) {
        accum += sample_noise(nm, g, grad_dual, rng).noise;
    }
    sample.mean_grad = grad + accum * (1.0 / b);
    return sample;
}

}  // namespace siopt
