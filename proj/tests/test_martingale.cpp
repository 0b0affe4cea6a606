#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "siopt/martingale.hpp"

using namespace siopt;

TEST_CASE("martingale kind string round trip") {
    for (MartingaleKind kind : {MartingaleKind::DiagSign, MartingaleKind::RankOneGaussian,
                                MartingaleKind::EntrywiseSign}) {
        CHECK(martingale_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(martingale_kind_from_string("brownian"), std::invalid_argument);
}

TEST_CASE("diag sign ratio closed values") {
    CHECK(diag_sign_ratio(1, 1.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(diag_sign_ratio(4, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(diag_sign_ratio(9, 1.5) == doctest::Approx(std::pow(9.0, 1.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("diag sign ratio validates its arguments") {
    CHECK_THROWS_AS(diag_sign_ratio(0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(diag_sign_ratio(4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(diag_sign_ratio(4, 2.5), std::invalid_argument);
}

TEST_CASE("single-term sequences have ratio one") {
    Rng rng(1);
    for (MartingaleKind kind : {MartingaleKind::DiagSign, MartingaleKind::RankOneGaussian,
                                MartingaleKind::EntrywiseSign}) {
        for (NormKind norm : {NormKind::Spectral, NormKind::Frobenius, NormKind::OneToInf}) {
            const MartingaleFamily fam{kind, 4, 4, 1};
            const Geometry g{norm, 4, 4};
            Rng r = rng.split(static_cast<std::uint64_t>(norm) * 10 + static_cast<int>(kind));
            CHECK(estimate_tau_lower(fam, g, 1.5, 500, r) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("monte carlo agrees with the exact diag sign ratio") {
    Rng rng(2);
    for (int r : {2, 5, 8}) {
        const MartingaleFamily fam{MartingaleKind::DiagSign, r, r, r};
        const Geometry g{NormKind::Spectral, r, r};
        Rng trial_rng = rng.split(static_cast<std::uint64_t>(r));
        const double est = estimate_tau_lower(fam, g, 1.5, 200, trial_rng);
        // the ratio is almost sure, so Monte Carlo error is zero
        CHECK(est == doctest::Approx(diag_sign_ratio(r, 1.5)).epsilon(1e-9));
    }
}

TEST_CASE("rank-one gaussian stays in the euclidean regime") {
    Rng rng(3);
    const MartingaleFamily fam{MartingaleKind::RankOneGaussian, 8, 8, 64};
    const Geometry g{NormKind::Frobenius, 8, 8};
    const double est = estimate_tau_lower(fam, g, 1.5, 10000, rng);
    CHECK(est > 0.0);
    CHECK(est <= 2.0 * std::sqrt(2.0) + 0.5);
}

TEST_CASE("estimates respect the universal cap and the lower bound") {
    Rng rng(4);
    for (MartingaleKind kind : {MartingaleKind::DiagSign, MartingaleKind::RankOneGaussian,
                                MartingaleKind::EntrywiseSign}) {
        for (NormKind norm : {NormKind::Spectral, NormKind::Frobenius}) {
            const int m = 6, n = 6;
            const MartingaleFamily fam{kind, m, n, 16};
            const Geometry g{norm, m, n};
            Rng r = rng.split(static_cast<std::uint64_t>(norm) * 10 + static_cast<int>(kind));
            const double est = estimate_tau_lower(fam, g, 1.5, 2000, r);
            CHECK(est <= 2.0 * std::sqrt(2.0 * m * n));
            // the >= 1 lower bound is a property of the nuclear-norm construction
            if (kind == MartingaleKind::DiagSign && norm == NormKind::Spectral)
                CHECK(est >= 1.0 - 0.05);
        }
    }
}

TEST_CASE("estimate is independent of the thread count by construction") {
    const MartingaleFamily fam{MartingaleKind::RankOneGaussian, 6, 6, 8};
    const Geometry g{NormKind::Frobenius, 6, 6};
    Rng ra(55), rb(55);
    CHECK(estimate_tau_lower(fam, g, 1.5, 1000, ra) == estimate_tau_lower(fam, g, 1.5, 1000, rb));
}

TEST_CASE("nuclear scaling slope matches one minus one over p") {
    Rng rng(5);
    const std::vector<int> sizes{2, 4, 8, 16, 32};
    const double slope15 =
        scaling_slope(1.5, sizes, NormKind::Spectral, MartingaleKind::DiagSign, 1, rng);
    CHECK(std::fabs(slope15 - 1.0 / 3.0) <= 0.02);
    const double slope2 =
        scaling_slope(2.0, sizes, NormKind::Spectral, MartingaleKind::DiagSign, 1, rng);
    CHECK(std::fabs(slope2 - 0.5) <= 0.02);
}

TEST_CASE("frobenius scaling slope is flat") {
    Rng rng(6);
    const std::vector<int> sizes{2, 4, 8, 16, 32};
    const double slope =
        scaling_slope(1.5, sizes, NormKind::Frobenius, MartingaleKind::RankOneGaussian, 2000, rng);
    CHECK(std::fabs(slope) <= 0.15);
}

TEST_CASE("scaling slope needs at least three sizes") {
    Rng rng(7);
    CHECK_THROWS_AS(
        scaling_slope(1.5, {2, 4}, NormKind::Spectral, MartingaleKind::DiagSign, 1, rng),
        std::invalid_argument);
    CHECK_THROWS_AS(
        scaling_slope(1.5, {1, 2, 4}, NormKind::Spectral, MartingaleKind::DiagSign, 1, rng),
        std::invalid_argument);
}
