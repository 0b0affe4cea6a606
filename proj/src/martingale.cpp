#include "siopt/martingale.hpp"

#include <cmath>
#include <stdexcept>

namespace siopt {

MartingaleKind martingale_kind_from_string(const std::string& name) {
    if (name == "diag_sign") return MartingaleKind::DiagSign;
    if (name == "rank_one_gaussian") return MartingaleKind::RankOneGaussian;
    if (name == "entrywise_sign") return MartingaleKind::EntrywiseSign;
    throw std::invalid_argument("unknown martingale family: " + name);
}

std::string to_string(MartingaleKind kind) {
    switch (kind) {
        case MartingaleKind::DiagSign: return "diag_sign";
        case MartingaleKind::RankOneGaussian: return "rank_one_gaussian";
        case MartingaleKind::EntrywiseSign: return "entrywise_sign";
    }
    return "?";
}

namespace {

Matrix draw_term(const MartingaleFamily& fam, int index, Rng& rng) {
    Matrix z(fam.m, fam.n);
    switch (fam.kind) {
        case MartingaleKind::DiagSign: {
            const int k = index % std::min(fam.m, fam.n);
            z(k, k) = rng.fair_sign_positive() ? 1.0 : -1.0;
            break;
        }
        case MartingaleKind::RankOneGaussian: {
            const double scalar = rng.normal();
            const auto u = random_unit_vector(fam.m, rng);
            const auto v = random_unit_vector(fam.n, rng);
            for (int i = 0; i < fam.m; ++i)
                for (int j = 0; j < fam.n; ++j) z(i, j) = scalar * u[i] * v[j];
            break;
        }
        case MartingaleKind::EntrywiseSign:
            for (auto& x : z.data()) x = rng.fair_sign_positive() ? 1.0 : -1.0;
            break;
    }
    return z;
}

int effective_length(const MartingaleFamily& fam) {
    if (fam.kind == MartingaleKind::DiagSign) {
        return std::min(fam.length, std::min(fam.m, fam.n));
    }
    return fam.length;
}

}  // namespace

double diag_sign_ratio(int r, double p) {
    if (r < 1) throw std::invalid_argument("diag_sign_ratio: r must be >= 1");
    if (!(p > 1.0 && p <= 2.0)) {
        throw std::invalid_argument("diag_sign_ratio: p must lie in (1, 2]");
    }
    // verify the almost-sure identity on one realization
    Rng rng(0x5eed00u + static_cast<std::uint64_t>(r));
    MartingaleFamily fam{MartingaleKind::DiagSign, r, r, r};
    Matrix sum(r, r);
    double moment = 0.0;
    for (int k = 0; k < r; ++k) {
        const Matrix z = draw_term(fam, k, rng);
        moment += std::pow(nuclear_norm(z), p);
        sum += z;
    }
    const double numer = nuclear_norm(sum);
    const double denom = std::pow(moment, 1.0 / p);
    if (std::fabs(numer - r) > 1e-9 * r ||
        std::fabs(denom - std::pow(r, 1.0 / p)) > 1e-9 * denom) {
        throw std::runtime_error("diag_sign_ratio: realization check failed");
    }
    return std::pow(static_cast<double>(r), 1.0 - 1.0 / p);
}

double estimate_tau_lower(const MartingaleFamily& fam, const Geometry& g, double p,
                          int trials, Rng& rng) {
    if (trials < 1) throw std::invalid_argument("estimate_tau_lower: trials must be >= 1");
    if (fam.m != g.d_out || fam.n != g.d_in) {
        throw std::invalid_argument("estimate_tau_lower: family shape does not match geometry");
    }
    const int length = effective_length(fam);
    if (length < 1) throw std::invalid_argument("estimate_tau_lower: length must be >= 1");

    constexpr int kBlock = 64;
    const int blocks = (trials + kBlock - 1) / kBlock;
    std::vector<double> numer_block(blocks, 0.0);
    std::vector<double> denom_block(blocks, 0.0);

#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < blocks; ++b) {
        Rng block_rng = rng.split(static_cast<std::uint64_t>(b));
        const int lo = b * kBlock;
        const int hi = std::min(trials, lo + kBlock);
        double numer = 0.0, denom = 0.0;
        for (int trial = lo; trial < hi; ++trial) {
            Matrix sum(fam.m, fam.n);
            double moment = 0.0;
            for (int t = 0; t < length; ++t) {
                const Matrix z = draw_term(fam, t, block_rng);
                moment += std::pow(dual_norm(g, z), p);
                sum += z;
            }
            numer += dual_norm(g, sum);
            denom += std::pow(moment, 1.0 / p);
        }
        numer_block[b] = numer;
        denom_block[b] = denom;
    }

    // fixed-order reduction keeps the result independent of scheduling
    double numer = 0.0, denom = 0.0;
    for (int b = 0; b < blocks; ++b) {
        numer += numer_block[b];
        denom += denom_block[b];
    }
    if (denom == 0.0) return 0.0;
    return numer / denom;
}

double scaling_slope(double p, const std::vector<int>& sizes, NormKind norm,
                     MartingaleKind fam_kind, int trials, Rng& rng) {
    if (sizes.size() < 3) {
        throw std::invalid_argument("scaling_slope: need at least 3 sizes");
    }
    for (int r : sizes) {
        if (r < 2) throw std::invalid_argument("scaling_slope: sizes must be >= 2");
    }
    std::vector<double> log_r, log_ratio;
    for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
        const int r = sizes[idx];
        double ratio;
        if (fam_kind == MartingaleKind::DiagSign && norm == NormKind::Spectral) {
            ratio = diag_sign_ratio(r, p);  // deterministic, skip Monte Carlo
        } else {
            MartingaleFamily fam{fam_kind, r, r, fam_kind == MartingaleKind::DiagSign ? r : 16};
            Geometry g{norm, r, r};
            Rng size_rng = rng.split(1000 + idx);
            ratio = estimate_tau_lower(fam, g, p, trials, size_rng);
        }
        if (ratio <= 0.0) throw std::runtime_error("scaling_slope: zero ratio estimate");
        log_r.push_back(std::log(static_cast<double>(r)));
        log_ratio.push_back(std::log(ratio));
    }
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < log_r.size(); ++i) {
        mean_x += log_r[i];
        mean_y += log_ratio[i];
    }
    mean_x /= log_r.size();
    mean_y /= log_r.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < log_r.size(); ++i) {
        sxy += (log_r[i] - mean_x) * (log_ratio[i] - mean_y);
        sxx += (log_r[i] - mean_x) * (log_r[i] - mean_x);
    }
    return sxy / sxx;
}

}  // namespace siopt
