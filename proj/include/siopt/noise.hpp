#pragma once

#include <string>

#include "siopt/geometry.hpp"
#include "siopt/objective.hpp"

namespace siopt {

enum class NoiseShape { RankOne, Entrywise };

NoiseShape noise_shape_from_string(const std::string& name);
std::string to_string(NoiseShape shape);

// Heavy-tailed perturbation recipe: noise has conditional mean zero and
// E||noise||_*^p = sigma0^p + sigma1^p ||grad||_*^p (exact for RankOne,
// empirical to 5% for Entrywise). tail_index in (p, 2]; tail_index < 2
// means infinite variance.
struct NoiseModel {
    double p = 1.5;
    double sigma0 = 0.0;
    double sigma1 = 0.0;
    double tail_index = 1.75;  // default (p+2)/2
    NoiseShape shape = NoiseShape::RankOne;
    // unit-moment scale for Entrywise, filled by calibrate_entrywise
    double entrywise_scale = 0.0;

    void validate() const;
};

// Symmetric scalar with E|zeta|^p = sigma^p exactly:
// |zeta| = z0 * U^{-1/a}, z0 = sigma*((a-p)/a)^{1/p}, fair sign.
double pareto_scalar(double p, double sigma, double tail_index, Rng& rng);

struct NoiseDraw {
    Matrix noise;
    double zeta_magnitude = 0.0;  // RankOne only: exact ||noise||_* value
};

// One noise matrix for the gradient whose dual norm is grad_dual.
NoiseDraw sample_noise(const NoiseModel& nm, const Geometry& g, double grad_dual, Rng& rng);

// Fits entrywise_scale so a unit-sigma entrywise draw has empirical
// dual-norm p-th moment 1. Deterministic given the rng seed.
NoiseModel calibrate_entrywise(NoiseModel nm, const Geometry& g, int trials, Rng& rng);

struct GradSample {
    Matrix mean_grad;  // batch average of noisy gradients
    int batch = 0;
    long long oracle_calls = 0;  // contribution of this sample: exactly batch
};

GradSample sample_batch_grad(const Objective& obj, const NoiseModel& nm, const Geometry& g,
                             const Matrix& x, int b, Rng& rng);

}  // namespace siopt
