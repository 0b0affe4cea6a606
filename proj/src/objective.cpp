#include "siopt/objective.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace siopt {

ObjectiveKind objective_kind_from_string(const std::string& name) {
    if (name == "quadratic") return ObjectiveKind::Quadratic;
    if (name == "bounded_well") return ObjectiveKind::BoundedWell;
    if (name == "factor_residual") return ObjectiveKind::FactorResidual;
    throw std::invalid_argument("unknown objective kind: " + name);
}

std::string to_string(ObjectiveKind kind) {
    switch (kind) {
        case ObjectiveKind::Quadratic: return "quadratic";
        case ObjectiveKind::BoundedWell: return "bounded_well";
        case ObjectiveKind::FactorResidual: return "factor_residual";
    }
    return "?";
}

namespace {

void require_shape(const Objective& obj, const Matrix& x) {
    if (obj.kind == ObjectiveKind::FactorResidual) {
        if (x.rows() != obj.target.rows() || obj.target.rows() != obj.target.cols()) {
            throw std::invalid_argument("objective: x rows must match square gram_target");
        }
        return;
    }
    require_same_shape(obj.target, x, "objective");
}

double phi(double t) { return t * t / (1.0 + t * t); }
double phi_prime(double t) {
    const double d = 1.0 + t * t;
    return 2.0 * t / (d * d);
}
double phi_second(double t) {
    const double d = 1.0 + t * t;
    return 2.0 * (1.0 - 3.0 * t * t) / (d * d * d);
}

}  // namespace

double value(const Objective& obj, const Matrix& x) {
    require_shape(obj, x);
    switch (obj.kind) {
        case ObjectiveKind::Quadratic: {
            const Matrix r = x - obj.target;
            const double f = frobenius_norm(r);
            return 0.5 * f * f;
        }
        case ObjectiveKind::BoundedWell: {
            double sum = 0.0;
            for (std::size_t k = 0; k < x.data().size(); ++k)
                sum += phi(x.data()[k] - obj.target.data()[k]);
            return sum;
        }
        case ObjectiveKind::FactorResidual: {
            const Matrix r = matmul(x, x.transpose()) - obj.target;
            const double f = frobenius_norm(r);
            return 0.25 * f * f;
        }
    }
    return 0.0;
}

Matrix gradient(const Objective& obj, const Matrix& x) {
    require_shape(obj, x);
    switch (obj.kind) {
        case ObjectiveKind::Quadratic:
            return x - obj.target;
        case ObjectiveKind::BoundedWell: {
            Matrix g(x.rows(), x.cols());
            for (std::size_t k = 0; k < x.data().size(); ++k)
                g.data()[k] = phi_prime(x.data()[k] - obj.target.data()[k]);
            return g;
        }
        case ObjectiveKind::FactorResidual: {
            const Matrix r = matmul(x, x.transpose()) - obj.target;
            return matmul(r, x);
        }
    }
    return x;
}

Matrix hessian_apply(const Objective& obj, const Matrix& x, const Matrix& d) {
    require_shape(obj, x);
    require_same_shape(x, d, "hessian_apply");
    switch (obj.kind) {
        case ObjectiveKind::Quadratic:
            return d;
        case ObjectiveKind::BoundedWell: {
            Matrix h(x.rows(), x.cols());
            for (std::size_t k = 0; k < x.data().size(); ++k)
                h.data()[k] = phi_second(x.data()[k] - obj.target.data()[k]) * d.data()[k];
            return h;
        }
        case ObjectiveKind::FactorResidual: {
            const Matrix xt = x.transpose();
            const Matrix r = matmul(x, xt) - obj.target;
            Matrix h = matmul(matmul(d, xt) + matmul(x, d.transpose()), x);
            h += matmul(r, d);
            return h;
        }
    }
    return d;
}

NormEquivalence norm_equivalence(const Geometry& g) {
    const double m = g.d_out;
    const double n = g.d_in;
    const double r = std::min(m, n);
    switch (g.kind) {
        case NormKind::Spectral:
            return {std::sqrt(r), std::sqrt(r)};
        case NormKind::RmsToRms:
            return {std::sqrt(m / n) * std::sqrt(r), std::sqrt(r) * std::sqrt(m / n)};
        case NormKind::OneToRms:
            return {std::sqrt(m * n), std::sqrt(m * n)};
        case NormKind::RmsToInf:
            return {std::sqrt(m / n), std::sqrt(m / n)};
        case NormKind::OneToInf:
            return {std::sqrt(m * n), std::sqrt(m * n)};
        case NormKind::Frobenius:
            return {1.0, 1.0};
    }
    return {1.0, 1.0};
}

double norm_pad_factor(const Geometry& g) {
    const auto eq = norm_equivalence(g);
    return eq.dual_vs_frobenius * eq.frobenius_vs_primal;
}

SmoothnessConstants default_constants(ObjectiveKind kind, const Matrix& target,
                                      const Geometry& g) {
    const auto eq = norm_equivalence(g);
    const double pad1 = eq.dual_vs_frobenius * eq.frobenius_vs_primal;
    const double pad2 = eq.dual_vs_frobenius * eq.frobenius_vs_primal * eq.frobenius_vs_primal;
    SmoothnessConstants c;
    switch (kind) {
        case ObjectiveKind::Quadratic:
            c.l0 = pad1;  // Euclidean constant 1
            c.l1 = 0.0;
            c.l2 = 0.0;   // gradient is affine
            break;
        case ObjectiveKind::BoundedWell:
            c.l0 = 2.0 * pad1;  // max |phi''| = 2 at the well bottom
            c.l1 = 0.0;
            c.l2 = 2.5 * pad2;  // max |phi'''| < 4.7, halved for the Taylor remainder
            break;
        case ObjectiveKind::FactorResidual: {
            // Region bound used by the probe: ||X||_F <= rho, steps up to 1.
            const double rho =
                1.5 * std::sqrt(static_cast<double>(g.d_out) * g.d_in) + 1.0;
            const double hess_bound = 3.0 * rho * rho + frobenius_norm(target);
            c.l0 = pad1 * hess_bound;
            c.l1 = 1.0;
            c.l2 = pad2 * (3.0 * rho + 1.0);
            break;
        }
    }
    c.f_star = 0.0;
    return c;
}

ProbeReport smoothness_probe(const Objective& obj, const Geometry& g, int trials,
                             double radius, Rng& rng) {
    if (trials < 1) throw std::invalid_argument("smoothness_probe: trials must be >= 1");
    if (obj.constants.l1 > 0.0 && radius > 1.0 / obj.constants.l1) {
        throw std::invalid_argument("smoothness_probe: radius exceeds 1/l1");
    }

    const int m = g.d_out;
    const int n = g.d_in;
    ProbeReport report;
    for (int trial = 0; trial < trials; ++trial) {
        Matrix x = (obj.kind == ObjectiveKind::FactorResidual)
                       ? Matrix::random_uniform(m, n, 1.5, rng)
                       : obj.target + Matrix::random_uniform(m, n, 2.0, rng);
        Matrix d = Matrix::random_uniform(m, n, 1.0, rng);
        const double d_primal = primal_norm(g, d);
        if (d_primal == 0.0) continue;
        d *= radius * rng.uniform01() / d_primal;
        const Matrix y = x + d;

        const Matrix gx = gradient(obj, x);
        const Matrix gy = gradient(obj, y);
        const double step = primal_norm(g, d);
        const double lhs1 = dual_norm(g, gy - gx);
        const double rhs1 = (obj.constants.l0 + obj.constants.l1 * dual_norm(g, gx)) * step;
        if (rhs1 > 0.0) report.max_ratio_first = std::max(report.max_ratio_first, lhs1 / rhs1);

        const double lhs2 = dual_norm(g, gy - gx - hessian_apply(obj, x, d));
        const double rhs2 = obj.constants.l2 * step * step;
        if (rhs2 > 0.0) {
            report.max_ratio_second = std::max(report.max_ratio_second, lhs2 / rhs2);
        } else if (lhs2 > 1e-9 * std::max(1.0, dual_norm(g, gx))) {
            report.max_ratio_second = std::numeric_limits<double>::infinity();
        }
    }
    report.pass = report.max_ratio_first <= 1.0 + 1e-6 && report.max_ratio_second <= 1.0 + 1e-6;
    return report;
}

}  // namespace siopt
