#pragma once

#include <string>

#include "siopt/geometry.hpp"
#include "siopt/matrix.hpp"

namespace siopt {

enum class ObjectiveKind { Quadratic, BoundedWell, FactorResidual };

ObjectiveKind objective_kind_from_string(const std::string& name);
std::string to_string(ObjectiveKind kind);

// Smoothness constants declared for the geometry the objective is run
// under. They are validated empirically by smoothness_probe, not trusted.
struct SmoothnessConstants {
    double l0 = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double f_star = 0.0;
};

// Synthetic objectives with exact gradients:
//   Quadratic:      1/2 ||x - target||_F^2
//   BoundedWell:    sum_ij phi(x_ij - target_ij),  phi(t) = t^2/(1+t^2)
//   FactorResidual: 1/4 ||x x^T - gram_target||_F^2
struct Objective {
    ObjectiveKind kind;
    Matrix target;  // gram_target for FactorResidual
    SmoothnessConstants constants;
};

double value(const Objective& obj, const Matrix& x);
Matrix gradient(const Objective& obj, const Matrix& x);
// exact Hessian-vector product, used by the Assumption-3 probe
Matrix hessian_apply(const Objective& obj, const Matrix& x, const Matrix& d);

// Norm-equivalence constants for a geometry:
//   ||s||_dual <= dual_vs_frobenius * ||s||_F
//   ||w||_F    <= frobenius_vs_primal * ||w||_primal
// A Euclidean gradient-Lipschitz constant stays valid in (primal, dual)
// after multiplying by dual_vs_frobenius * frobenius_vs_primal; a
// Euclidean Hessian constant needs dual_vs_frobenius * frobenius_vs_primal^2.
struct NormEquivalence {
    double dual_vs_frobenius;
    double frobenius_vs_primal;
};
NormEquivalence norm_equivalence(const Geometry& g);
double norm_pad_factor(const Geometry& g);  // product of the two

// Padded constants that smoothness_probe accepts for the probe's own
// sampling region; configs freeze these values.
SmoothnessConstants default_constants(ObjectiveKind kind, const Matrix& target,
                                      const Geometry& g);

struct ProbeReport {
    double max_ratio_first = 0.0;   // gradient-Lipschitz inequality
    double max_ratio_second = 0.0;  // Taylor-remainder inequality
    bool pass = false;
};

// Samples random (X, Y) with ||Y - X|| <= radius in the primal norm and
// reports the worst violation ratio of both smoothness inequalities
// against the declared constants. Pass means both ratios <= 1 + 1e-6.
ProbeReport smoothness_probe(const Objective& obj, const Geometry& g, int trials,
                             double radius, Rng& rng);

}  // namespace siopt
