#pragma once

#include <array>
#include <vector>

#include "siopt/matrix.hpp"

namespace siopt {

// Thin SVD: a = u * diag(sigma) * v^T with k = min(rows, cols).
// Sign convention: in each column of u the entry of largest absolute value
// is nonnegative (v compensates), so repeated calls on the same input and
// on positive rescalings of it are bitwise identical.
struct SvdResult {
    Matrix u;                   // rows x k, orthonormal columns
    std::vector<double> sigma;  // descending, nonnegative
    Matrix v;                   // cols x k, orthonormal columns
};

// One-sided Jacobi on the thinner side.
SvdResult svd(const Matrix& a);

double spectral_norm(const Matrix& a);
double nuclear_norm(const Matrix& a);

enum class PolarMode { ExactSvd, NewtonSchulz };

// Coefficient schedule for the quintic iteration
//   X <- c0*X + c1*X(X^T X) + c2*X(X^T X)^2
// applied to the input pre-scaled by 1/(||A||_F + eps_scale). The first
// rows push small singular values toward 1 quickly; the trailing rows are
// the contraction schedule that polishes to machine precision. Steps past
// the end of the table reuse the last row.
struct NewtonSchulzOptions {
    int steps = 8;
    double eps_scale = 1e-12;
    std::vector<std::array<double, 3>> coeffs = {
        {3.4445, -4.7750, 2.0315}, {3.4445, -4.7750, 2.0315},
        {3.4445, -4.7750, 2.0315}, {3.4445, -4.7750, 2.0315},
        {3.4445, -4.7750, 2.0315}, {1.875, -1.25, 0.375},
        {1.875, -1.25, 0.375},     {1.875, -1.25, 0.375},
    };
};

struct PolarResult {
    Matrix q;
    bool used_fallback = false;  // iterative mode missed tolerance, exact SVD used
};

// Polar factor u * v^T of a nonzero matrix. In iterative mode the result is
// cross-checked against the exact factor at tolerance 1e-5 * sqrt(min(m,n))
// in Frobenius norm and falls back to the exact route if it misses.
PolarResult polar_factor(const Matrix& a, PolarMode mode,
                         const NewtonSchulzOptions& opts = {});

// Raw Newton-Schulz iterate without the cross-check (used by the benchmark
// and by tests probing the approximation quality).
Matrix newton_schulz_polar(const Matrix& a, const NewtonSchulzOptions& opts = {});

}  // namespace siopt
