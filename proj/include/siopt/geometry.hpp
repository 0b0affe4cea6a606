#pragma once

#include <optional>
#include <string>

#include "siopt/matrix.hpp"
#include "siopt/svd.hpp"

namespace siopt {

// The six input-output norm families. d_out is the row count, d_in the
// column count of every matrix the geometry operates on.
enum class NormKind { Spectral, RmsToRms, OneToRms, RmsToInf, OneToInf, Frobenius };

NormKind norm_kind_from_string(const std::string& name);
std::string to_string(NormKind kind);

struct Geometry {
    NormKind kind;
    int d_out;
    int d_in;
};

struct LmoReport {
    Matrix direction;        // primal norm <= 1
    double dual_norm_value;  // ||s||_*
    double pairing;          // <s, direction> = -||s||_*
};

struct LmoOptions {
    // Spectral / RmsToRms only: approximate the polar factor by
    // Newton-Schulz instead of exact SVD. Every iterative result is
    // checked against the duality identity at relative tolerance 1e-4
    // and silently falls back to the exact route on a miss.
    bool use_newton_schulz = false;
    NewtonSchulzOptions ns;
};

double primal_norm(const Geometry& g, const Matrix& w);
double dual_norm(const Geometry& g, const Matrix& s);

// Minimizer of <s, x> over the unit primal ball. The direction is computed
// from s divided entrywise by max|s_ij|, so lmo(c*s) is bitwise equal to
// lmo(s) whenever the entries of c*s are exact scalings of those of s.
// sign(0) = 0, zero rows/columns map to zero, lmo(0) = 0.
LmoReport lmo(const Geometry& g, const Matrix& s, const LmoOptions& opts = {});

}  // namespace siopt
