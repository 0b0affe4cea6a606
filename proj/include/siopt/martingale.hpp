#pragma once

#include <string>
#include <vector>

#include "siopt/geometry.hpp"

namespace siopt {

enum class MartingaleKind { DiagSign, RankOneGaussian, EntrywiseSign };

MartingaleKind martingale_kind_from_string(const std::string& name);
std::string to_string(MartingaleKind kind);

// Explicit martingale difference families. Each term is an independent
// symmetric draw, so the conditional-mean-zero property holds by
// construction. DiagSign puts a fair sign on the k-th diagonal cell.
struct MartingaleFamily {
    MartingaleKind kind;
    int m = 0;
    int n = 0;
    int length = 0;  // number of terms T (clamped to min(m,n) for DiagSign)
};

// Exact ratio r^{1-1/p} of the diagonal-sign family under the nuclear
// norm; also draws one realization and verifies the almost-sure identity.
double diag_sign_ratio(int r, double p);

// Monte-Carlo estimate of E||sum Z_t||_* / E(sum ||Z_t||_*^p)^{1/p},
// a lower bound on the martingale factor. Trials run in parallel blocks
// with per-block seeds split from rng's seed, so the estimate does not
// depend on the thread count. Returns 0 when the denominator is 0.
double estimate_tau_lower(const MartingaleFamily& fam, const Geometry& g, double p,
                          int trials, Rng& rng);

// Least-squares slope of log(ratio) against log(r) over square r x r
// shapes. The geometry argument fixes the norm family; its dims are
// overridden per size.
double scaling_slope(double p, const std::vector<int>& sizes, NormKind norm,
                     MartingaleKind fam_kind, int trials, Rng& rng);

}  // namespace siopt
