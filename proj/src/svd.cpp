#include "siopt/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace siopt {

namespace {

// One-sided Jacobi (Hestenes) for m >= n. Returns thin U (m x n),
// sigma (n, unsorted), V (n x n).
void jacobi_thin(const Matrix& a, Matrix& u, std::vector<double>& sigma, Matrix& v) {
    const int m = a.rows();
    const int n = a.cols();
    Matrix b = a;
    v = Matrix::identity(n);

    constexpr double kTol = 1e-15;
    constexpr int kMaxSweeps = 60;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (int i = 0; i < n - 1; ++i) {
            for (int j = i + 1; j < n; ++j) {
                double aa = 0.0, bb = 0.0, gg = 0.0;
                for (int k = 0; k < m; ++k) {
                    const double bi = b(k, i);
                    const double bj = b(k, j);
                    aa += bi * bi;
                    bb += bj * bj;
                    gg += bi * bj;
                }
                if (gg == 0.0) continue;
                if (std::fabs(gg) <= kTol * std::sqrt(aa * bb)) continue;
                rotated = true;
                const double zeta = (bb - aa) / (2.0 * gg);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (int k = 0; k < m; ++k) {
                    const double bi = b(k, i);
                    const double bj = b(k, j);
                    b(k, i) = c * bi - s * bj;
                    b(k, j) = s * bi + c * bj;
                }
                for (int k = 0; k < n; ++k) {
                    const double vi = v(k, i);
                    const double vj = v(k, j);
                    v(k, i) = c * vi - s * vj;
                    v(k, j) = s * vi + c * vj;
                }
            }
        }
        if (!rotated) break;
    }

    u = Matrix(m, n);
    sigma.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double norm_sq = 0.0;
        for (int k = 0; k < m; ++k) norm_sq += b(k, j) * b(k, j);
        const double norm = std::sqrt(norm_sq);
        sigma[j] = norm;
        if (norm > 0.0) {
            for (int k = 0; k < m; ++k) u(k, j) = b(k, j) / norm;
        }
    }
}

// Replace zero columns of u with unit vectors orthogonal to all others.
void complete_orthonormal(Matrix& u, const std::vector<double>& sigma) {
    const int m = u.rows();
    const int n = u.cols();
    for (int j = 0; j < n; ++j) {
        if (sigma[j] > 0.0) continue;
        for (int cand = 0; cand < m; ++cand) {
            std::vector<double> w(m, 0.0);
            w[cand] = 1.0;
            for (int c = 0; c < n; ++c) {
                // project only against populated columns: nonzero sigma,
                // or zero-sigma columns already filled in earlier passes
                const bool populated = sigma[c] > 0.0 || c < j;
                if (!populated || c == j) continue;
                double dot = 0.0;
                for (int k = 0; k < m; ++k) dot += u(k, c) * w[k];
                for (int k = 0; k < m; ++k) w[k] -= dot * u(k, c);
            }
            double norm_sq = 0.0;
            for (double x : w) norm_sq += x * x;
            if (norm_sq > 0.25) {
                const double inv = 1.0 / std::sqrt(norm_sq);
                for (int k = 0; k < m; ++k) u(k, j) = w[k] * inv;
                break;
            }
        }
    }
}

void apply_sign_convention(Matrix& u, Matrix& v) {
    const int k = u.cols();
    for (int j = 0; j < k; ++j) {
        int arg = 0;
        double best = 0.0;
        for (int i = 0; i < u.rows(); ++i) {
            const double mag = std::fabs(u(i, j));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (u(arg, j) < 0.0) {
            for (int i = 0; i < u.rows(); ++i) u(i, j) = -u(i, j);
            for (int i = 0; i < v.rows(); ++i) v(i, j) = -v(i, j);
        }
    }
}

}  // namespace

SvdResult svd(const Matrix& a) {
    if (a.empty()) throw std::invalid_argument("svd: empty matrix");

    const bool transposed = a.rows() < a.cols();
    const Matrix work = transposed ? a.transpose() : a;

    Matrix u, v;
    std::vector<double> sigma;
    jacobi_thin(work, u, sigma, v);

    // sort descending, stable in the original column order
    const int k = static_cast<int>(sigma.size());
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return sigma[x] > sigma[y]; });

    Matrix us(u.rows(), k), vs(v.rows(), k);
    std::vector<double> ss(k);
    for (int j = 0; j < k; ++j) {
        ss[j] = sigma[order[j]];
        for (int i = 0; i < u.rows(); ++i) us(i, j) = u(i, order[j]);
        for (int i = 0; i < v.rows(); ++i) vs(i, j) = v(i, order[j]);
    }
    complete_orthonormal(us, ss);

    SvdResult result;
    if (transposed) {
        result.u = std::move(vs);
        result.v = std::move(us);
    } else {
        result.u = std::move(us);
        result.v = std::move(vs);
    }
    result.sigma = std::move(ss);
    apply_sign_convention(result.u, result.v);
    return result;
}

double spectral_norm(const Matrix& a) {
    if (max_abs(a) == 0.0) return 0.0;
    return svd(a).sigma.front();
}

double nuclear_norm(const Matrix& a) {
    if (max_abs(a) == 0.0) return 0.0;
    const auto s = svd(a).sigma;
    double sum = 0.0;
    for (double x : s) sum += x;
    return sum;
}

Matrix newton_schulz_polar(const Matrix& a, const NewtonSchulzOptions& opts) {
    const double scale = frobenius_norm(a) + opts.eps_scale;
    Matrix x = a * (1.0 / scale);
    // iterate on the thin side so the Gram matrix is min(m,n) square
    const bool transposed = a.rows() < a.cols();
    if (transposed) x = x.transpose();
    for (int step = 0; step < opts.steps; ++step) {
        const auto& c = opts.coeffs.empty()
                            ? std::array<double, 3>{1.5, -0.5, 0.0}
                            : opts.coeffs[std::min<std::size_t>(step, opts.coeffs.size() - 1)];
        const Matrix gram = matmul(x.transpose(), x);
        const Matrix gram2 = matmul(gram, gram);
        Matrix next = x * c[0];
        next += matmul(x, gram) * c[1];
        next += matmul(x, gram2) * c[2];
        x = std::move(next);
    }
    return transposed ? x.transpose() : x;
}

PolarResult polar_factor(const Matrix& a, PolarMode mode, const NewtonSchulzOptions& opts) {
    if (max_abs(a) == 0.0) {
        throw std::invalid_argument("polar_factor: zero matrix has no polar factor");
    }
    const auto decomposition = svd(a);
    const Matrix exact = matmul(decomposition.u, decomposition.v.transpose());
    if (mode == PolarMode::ExactSvd) {
        return {exact, false};
    }
    Matrix approx = newton_schulz_polar(a, opts);
    const double k = static_cast<double>(std::min(a.rows(), a.cols()));
    const double tol = 1e-5 * std::sqrt(k);
    if (frobenius_norm(approx - exact) <= tol) {
        return {std::move(approx), false};
    }
    return {exact, true};
}

}  // namespace siopt
