// End-to-end acceptance gate. Each criterion prints a single pass/fail
// line; the process exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "siopt/harness.hpp"

using namespace siopt;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

const std::vector<NormKind> kAllKinds = {NormKind::Spectral, NormKind::RmsToRms,
                                         NormKind::OneToRms, NormKind::RmsToInf,
                                         NormKind::OneToInf, NormKind::Frobenius};
const std::vector<std::pair<int, int>> kShapes = {{2, 3}, {8, 8}, {16, 4}};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

bool report(int index, const char* name, bool pass, const std::string& detail = {}) {
    std::printf("criterion %2d %-22s %s%s%s\n", index, name, pass ? "PASS" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
    return pass;
}

bool criterion_duality() {
    const auto t0 = Clock::now();
    Rng rng(1001);
    bool ok = true;
    for (NormKind kind : kAllKinds) {
        for (auto [m, n] : kShapes) {
            const Geometry g{kind, m, n};
            for (int rep = 0; rep < 334; ++rep) {
                const Matrix s = Matrix::random_uniform(m, n, 1.0, rng);
                const auto rep_out = lmo(g, s);
                const double dual = dual_norm(g, s);
                if (std::fabs(rep_out.pairing + dual) > 1e-8 * std::max(1.0, dual)) ok = false;
                if (primal_norm(g, rep_out.direction) > 1.0 + 1e-8) ok = false;
            }
        }
    }
    const double secs = seconds_since(t0);
    if (secs >= 10.0) ok = false;
    char detail[64];
    std::snprintf(detail, sizeof(detail), "(%.1fs)", secs);
    return report(1, "lmo duality", ok, detail);
}

bool criterion_scale_invariance() {
    Rng rng(1002);
    int passed = 0, total = 0;
    for (NormKind kind : kAllKinds) {
        for (int rep = 0; rep < 100; ++rep) {
            const auto [m, n] = kShapes[rep % kShapes.size()];
            const Geometry g{kind, m, n};
            const Matrix s = quantize_entries(Matrix::random_uniform(m, n, 1.0, rng), 26);
            const Matrix base = lmo(g, s).direction;
            bool case_ok = true;
            for (double alpha : {0.5, 3.0, 1e6}) {
                if (!lmo(g, s * alpha).direction.bitwise_equal(base)) case_ok = false;
            }
            ++total;
            if (case_ok) ++passed;
        }
    }
    char detail[64];
    std::snprintf(detail, sizeof(detail), "(%d/%d cases)", passed, total);
    return report(2, "scale invariance", passed == total && total == 600, detail);
}

bool criterion_polar() {
    Rng rng(1003);
    int fallbacks = 0;
    bool ok = true;
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 8;
        const auto base = svd(Matrix::random_uniform(n, n, 1.0, rng));
        std::vector<double> sigma(n);
        for (auto& s : sigma) s = rng.uniform(0.05, 1.0);
        const Matrix a = matmul(matmul(base.u, Matrix::diag(sigma)), base.v.transpose());
        const auto ns = polar_factor(a, PolarMode::NewtonSchulz);
        if (ns.used_fallback) {
            ++fallbacks;
            continue;
        }
        const auto exact = polar_factor(a, PolarMode::ExactSvd);
        if (frobenius_norm(ns.q - exact.q) > 1e-5) ok = false;
    }
    if (fallbacks > 10) ok = false;
    char detail[64];
    std::snprintf(detail, sizeof(detail), "(fallbacks %d/200)", fallbacks);
    return report(3, "polar agreement", ok, detail);
}

bool criterion_lemma1_scaling() {
    const auto t0 = Clock::now();
    Rng rng(1004);
    const std::vector<int> sizes{2, 4, 8, 16, 32};
    const double s15 = scaling_slope(1.5, sizes, NormKind::Spectral, MartingaleKind::DiagSign, 1, rng);
    const double s2 = scaling_slope(2.0, sizes, NormKind::Spectral, MartingaleKind::DiagSign, 1, rng);
    const double sfree =
        scaling_slope(1.5, sizes, NormKind::Frobenius, MartingaleKind::RankOneGaussian, 10000, rng);
    const double secs = seconds_since(t0);
    const bool ok = std::fabs(s15 - 1.0 / 3.0) <= 0.02 && std::fabs(s2 - 0.5) <= 0.02 &&
                    std::fabs(sfree) <= 0.15 && secs < 60.0;
    char detail[96];
    std::snprintf(detail, sizeof(detail), "(slopes %.4f %.4f %.4f, %.1fs)", s15, s2, sfree, secs);
    return report(4, "lemma 1 scaling", ok, detail);
}

bool criterion_noise_calibration() {
    Rng rng(1005);
    NoiseModel nm;
    nm.p = 1.5;
    nm.sigma0 = 1.0;
    nm.tail_index = 2.0;
    const Geometry g{NormKind::Spectral, 4, 4};
    const int n = 1000000;
    double moment = 0.0, sq = 0.0;
    Matrix mean(4, 4);
    for (int i = 0; i < n; ++i) {
        const auto draw = sample_noise(nm, g, 0.0, rng);
        moment += std::pow(dual_norm(g, draw.noise), nm.p);
        mean += draw.noise;
        sq += frobenius_norm(draw.noise) * frobenius_norm(draw.noise);
    }
    moment /= n;
    mean *= 1.0 / n;
    const double se = std::sqrt(sq / n) / std::sqrt(static_cast<double>(n));
    const bool ok = moment >= 0.95 && moment <= 1.05 && frobenius_norm(mean) <= 5.0 * se;
    char detail[96];
    std::snprintf(detail, sizeof(detail), "(p-moment %.4f, |mean| %.2g <= %.2g)", moment,
                  frobenius_norm(mean), 5.0 * se);
    return report(5, "noise calibration", ok, detail);
}

struct DescentSetup {
    Objective obj;
    NoiseModel nm;
    Geometry g;
    Matrix x0;
    Schedule sched;
    long long t_total = 0;
};

DescentSetup make_criterion6() {
    DescentSetup s;
    Rng trng(2024);
    s.obj.kind = ObjectiveKind::Quadratic;
    s.obj.target = Matrix::random_uniform(32, 32, 1.0, trng);
    s.g = Geometry{NormKind::Spectral, 32, 32};
    s.obj.constants = default_constants(s.obj.kind, s.obj.target, s.g);
    s.x0 = Matrix(32, 32);
    s.t_total = 4096;
    TheoremConsts c;
    c.p = 1.5;
    c.l0 = s.obj.constants.l0;
    c.l1 = s.obj.constants.l1;
    s.sched = theorem_schedule(ScheduleKind::Theorem3, c, {.t_total = s.t_total});
    return s;
}

DescentSetup make_criterion7(long long t_total) {
    DescentSetup s;
    Rng trng(555);
    s.obj.kind = ObjectiveKind::BoundedWell;
    s.obj.target = Matrix::random_uniform(16, 16, 1.0, trng);
    s.g = Geometry{NormKind::Spectral, 16, 16};
    s.obj.constants = default_constants(s.obj.kind, s.obj.target, s.g);
    s.nm.p = 1.5;
    s.nm.sigma0 = 1.0;
    s.nm.tail_index = 1.75;
    s.x0 = Matrix::random_uniform(16, 16, 2.0, trng);
    s.t_total = t_total;
    TheoremConsts c;
    c.p = 1.5;
    c.l0 = s.obj.constants.l0;
    c.l1 = s.obj.constants.l1;
    s.sched = theorem_schedule(ScheduleKind::Theorem3, c, {.t_total = t_total});
    return s;
}

DescentSetup make_criterion8() {
    DescentSetup s;
    Rng trng(777);
    s.obj.kind = ObjectiveKind::BoundedWell;
    s.obj.target = Matrix::random_uniform(8, 8, 1.0, trng);
    s.g = Geometry{NormKind::Spectral, 8, 8};
    s.obj.constants = default_constants(s.obj.kind, s.obj.target, s.g);
    s.nm.p = 1.5;
    s.nm.sigma0 = 0.3;
    s.nm.tail_index = 1.75;
    s.x0 = Matrix::random_uniform(8, 8, 2.0, trng);
    s.t_total = 20000;
    s.sched.kind = ScheduleKind::Manual;
    s.sched.beta = 0.95;
    s.sched.eta = 0.002;
    s.sched.batch = 1;
    return s;
}

bool criterion_deterministic_descent() {
    const auto t0 = Clock::now();
    DescentSetup s = make_criterion6();
    StepContext ctx{&s.obj, &s.nm, &s.g, {}};
    Rng r(1);
    const RunResult res = run(AlgorithmKind::Buscg, s.sched, ctx, s.x0, s.t_total, r);
    const double initial = res.history.front().grad_dual_norm;
    const double final_grad = res.history.back().grad_dual_norm;
    const double secs = seconds_since(t0);
    const bool ok = final_grad <= 0.1 * initial && secs < 30.0;
    char detail[96];
    std::snprintf(detail, sizeof(detail), "(%.1f -> %.4f, %.1fs)", initial, final_grad, secs);
    return report(6, "deterministic descent", ok, detail);
}

bool criterion_heavy_tail_trend() {
    const auto t0 = Clock::now();
    std::vector<double> medians;
    for (long long t_total : {2500LL, 5000LL, 10000LL, 20000LL}) {
        DescentSetup s = make_criterion7(t_total);
        StepContext ctx{&s.obj, &s.nm, &s.g, {}};
        std::vector<double> mins(20);
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < 20; ++i) {
            Rng r(100 + i);
            const RunResult res = run(AlgorithmKind::Buscg, s.sched, ctx, s.x0, t_total, r);
            double mn = res.history.front().grad_dual_norm;
            for (const auto& h : res.history) mn = std::min(mn, h.grad_dual_norm);
            mins[i] = mn;
        }
        medians.push_back(median(mins));
    }
    const double secs = seconds_since(t0);
    bool ok = secs < 600.0;
    for (std::size_t i = 1; i < medians.size(); ++i) {
        if (!(medians[i] < medians[i - 1])) ok = false;
    }
    char detail[128];
    std::snprintf(detail, sizeof(detail), "(medians %.3f %.3f %.3f %.3f, %.0fs)", medians[0],
                  medians[1], medians[2], medians[3], secs);
    return report(7, "heavy-tail trend", ok, detail);
}

bool criterion_transport_benefit() {
    DescentSetup s = make_criterion8();
    StepContext ctx{&s.obj, &s.nm, &s.g, {}};
    std::vector<double> final_buscg(20), final_tuscg(20);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < 20; ++i) {
        Rng ra(200 + i), rb(200 + i);
        final_buscg[i] =
            run(AlgorithmKind::Buscg, s.sched, ctx, s.x0, s.t_total, ra).history.back().grad_dual_norm;
        final_tuscg[i] =
            run(AlgorithmKind::Tuscg, s.sched, ctx, s.x0, s.t_total, rb).history.back().grad_dual_norm;
    }
    const double mb = median(final_buscg);
    const double mt = median(final_tuscg);
    char detail[96];
    std::snprintf(detail, sizeof(detail), "(buscg %.4f, tuscg %.4f)", mb, mt);
    return report(8, "transport benefit", mt <= mb, detail);
}

// replays one seed of a setup step by step and checks that the momentum
// recursion residual is exactly the zero matrix at every logged step
bool replay_momentum_exact(const DescentSetup& s, AlgorithmKind algorithm, std::uint64_t seed) {
    StepContext ctx{&s.obj, &s.nm, &s.g, {}};
    Rng rng(seed);
    (void)rng.uniform_index(static_cast<std::uint64_t>(s.t_total));  // the output-index draw
    OptState state = init_state(ctx, s.sched, s.x0, rng);
    for (long long t = 1; t < s.t_total; ++t) {
        const Matrix m_old = state.momentum;
        Rng peek = rng;
        const Matrix probe_point =
            algorithm == AlgorithmKind::Tuscg
                ? state.x + (state.x - state.x_prev) * s.sched.transport_coefficient()
                : state.x;
        const auto sample = sample_batch_grad(s.obj, s.nm, s.g, probe_point, s.sched.batch, peek);
        switch (algorithm) {
            case AlgorithmKind::Buscg: buscg_step(state, s.sched, ctx, rng); break;
            case AlgorithmKind::Tuscg: tuscg_step(state, s.sched, ctx, rng); break;
            case AlgorithmKind::Nesterov: nesterov_lmo_step(state, s.sched, ctx, rng); break;
        }
        const Matrix expected = m_old * s.sched.beta + sample.mean_grad * (1.0 - s.sched.beta);
        const Matrix residual = state.momentum - expected;
        for (const double x : residual.data()) {
            if (x != 0.0) return false;
        }
    }
    return true;
}

bool criterion_exactness() {
    bool ok = replay_momentum_exact(make_criterion6(), AlgorithmKind::Buscg, 1);
    ok = ok && replay_momentum_exact(make_criterion7(20000), AlgorithmKind::Buscg, 100);
    {
        DescentSetup s = make_criterion8();
        ok = ok && replay_momentum_exact(s, AlgorithmKind::Buscg, 200);
        ok = ok && replay_momentum_exact(s, AlgorithmKind::Tuscg, 200);
    }
    // buscg and tuscg coincide bitwise at beta = 0 under a shared seed
    {
        DescentSetup s = make_criterion8();
        s.sched.beta = 0.0;
        s.t_total = 500;
        StepContext ctx{&s.obj, &s.nm, &s.g, {}};
        Rng ra(42), rb(42);
        const RunResult a = run(AlgorithmKind::Buscg, s.sched, ctx, s.x0, s.t_total, ra);
        const RunResult b = run(AlgorithmKind::Tuscg, s.sched, ctx, s.x0, s.t_total, rb);
        if (!a.tilde_x.bitwise_equal(b.tilde_x)) ok = false;
        if (a.history.size() != b.history.size()) ok = false;
        for (std::size_t i = 0; ok && i < a.history.size(); ++i) {
            if (a.history[i].f_value != b.history[i].f_value) ok = false;
            if (a.history[i].grad_dual_norm != b.history[i].grad_dual_norm) ok = false;
        }
    }
    return report(9, "exactness replays", ok);
}

bool criterion_gradient_checks() {
    Rng rng(1010);
    bool ok = true;
    double worst_overall = 0.0;
    for (ObjectiveKind kind : {ObjectiveKind::Quadratic, ObjectiveKind::BoundedWell,
                               ObjectiveKind::FactorResidual}) {
        const int m = 5, n = 4;
        Objective obj;
        obj.kind = kind;
        if (kind == ObjectiveKind::FactorResidual) {
            const Matrix b = Matrix::random_uniform(m, m, 1.0, rng);
            obj.target = (b + b.transpose()) * 0.5;
        } else {
            obj.target = Matrix::random_uniform(m, n, 1.0, rng);
        }
        for (int rep = 0; rep < 10; ++rep) {
            const Matrix x = Matrix::random_uniform(m, n, 1.0, rng);
            const Matrix grad = gradient(obj, x);
            const double h = 1e-5;
            double worst = 0.0;
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < n; ++j) {
                    Matrix xp = x, xm = x;
                    xp(i, j) += h;
                    xm(i, j) -= h;
                    const double fd = (value(obj, xp) - value(obj, xm)) / (2.0 * h);
                    worst = std::max(worst, std::fabs(fd - grad(i, j)));
                }
            }
            const double rel = worst / std::max(1.0, frobenius_norm(grad));
            worst_overall = std::max(worst_overall, rel);
            if (rel > 1e-5) ok = false;
        }
    }
    char detail[64];
    std::snprintf(detail, sizeof(detail), "(worst rel %.2g)", worst_overall);
    return report(10, "gradient checks", ok, detail);
}

bool criterion_determinism() {
    const char* config = R"json({
      "geometry": {"kind": "spectral", "d_out": 6, "d_in": 6},
      "objective": {"kind": "bounded_well", "target": {"kind": "random_uniform", "seed": 3}},
      "noise": {"p": 1.5, "sigma0": 0.5},
      "algorithm": "buscg",
      "schedule": {"kind": "theorem3"},
      "x0": {"kind": "random_uniform", "seed": 4, "scale": 2.0},
      "t_total": 200,
      "seeds": [11, 12, 13]
    })json";
    const RunConfig cfg = parse_config(config);
    const std::string a = to_csv(run_experiment(cfg));
    const std::string b = to_csv(run_experiment(cfg));
    return report(11, "csv determinism", !a.empty() && a == b);
}

}  // namespace

int main() {
    bool ok = true;
    ok &= criterion_duality();
    ok &= criterion_scale_invariance();
    ok &= criterion_polar();
    ok &= criterion_lemma1_scaling();
    ok &= criterion_noise_calibration();
    ok &= criterion_deterministic_descent();
    ok &= criterion_heavy_tail_trend();
    ok &= criterion_transport_benefit();
    ok &= criterion_exactness();
    ok &= criterion_gradient_checks();
    ok &= criterion_determinism();
    std::printf("acceptance: %s\n", ok ? "all criteria passed" : "FAILURES");
    return ok ? 0 : 1;
}
