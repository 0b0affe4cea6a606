#include "siopt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace siopt {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

Matrix quantize_entries(const Matrix& a, int bits) {
    Matrix q = a;
    for (auto& x : q.data()) {
        if (x == 0.0) continue;
        int exp = 0;
        const double mant = std::frexp(x, &exp);
        x = std::ldexp(std::round(std::ldexp(mant, bits)), exp - bits);
    }
    return q;
}

namespace {

struct SeedResult {
    TrajectoryRecord::SeedSummary summary;
    std::vector<HistoryRow> history;
};

SeedResult run_one_seed(const RunConfig& cfg, const ResolvedExperiment& exp, std::uint64_t seed) {
    StepContext ctx;
    ctx.obj = &exp.objective;
    ctx.nm = &exp.noise;
    ctx.g = &cfg.geometry;
    ctx.lmo_opts.use_newton_schulz = cfg.lmo_newton_schulz;

    Rng rng(seed);
    RunResult result = run(cfg.algorithm, exp.schedule, ctx, exp.x0, cfg.t_total, rng);

    SeedResult out;
    out.summary.seed = seed;
    out.summary.tilde_grad_dual = result.tilde_grad_dual;
    out.summary.oracle_calls = result.oracle_calls;
    double min_grad = std::numeric_limits<double>::infinity();
    for (const auto& row : result.history) min_grad = std::min(min_grad, row.grad_dual_norm);
    out.summary.min_grad_dual = min_grad;
    out.summary.final_grad_dual = result.history.back().grad_dual_norm;
    out.history = std::move(result.history);
    return out;
}

}  // namespace

TrajectoryRecord run_experiment(const RunConfig& cfg) {
    const ResolvedExperiment exp = resolve_experiment(cfg);
    const int n_seeds = static_cast<int>(cfg.seeds.size());
    std::vector<SeedResult> results(n_seeds);

    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_seeds; ++i) {
        try {
            results[i] = run_one_seed(cfg, exp, cfg.seeds[i]);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            throw std::runtime_error("run_experiment: a seed run failed: " + std::string(e.what()));
        }
    }

    TrajectoryRecord record;
    for (int i = 0; i < n_seeds; ++i) {
        record.per_seed.push_back(results[i].summary);
        for (const auto& row : results[i].history) {
            record.rows.push_back({cfg.seeds[i], row.t, row.f_value, row.grad_dual_norm,
                                   row.oracle_calls, exp.schedule.eta, exp.schedule.beta});
        }
    }
    std::vector<double> tilde;
    for (const auto& s : record.per_seed) tilde.push_back(s.tilde_grad_dual);
    double sum = 0.0;
    for (double x : tilde) sum += x;
    record.mean_tilde_grad = sum / tilde.size();
    std::sort(tilde.begin(), tilde.end());
    const std::size_t mid = tilde.size() / 2;
    record.median_tilde_grad =
        tilde.size() % 2 == 1 ? tilde[mid] : 0.5 * (tilde[mid - 1] + tilde[mid]);
    return record;
}

std::string to_csv(const TrajectoryRecord& record) {
    std::string out = "seed,t,f_value,grad_dual_norm,oracle_calls,eta,beta\n";
    for (const auto& row : record.rows) {
        out += std::to_string(row.seed);
        out += ',';
        out += std::to_string(row.t);
        out += ',';
        out += format_double(row.f_value);
        out += ',';
        out += format_double(row.grad_dual_norm);
        out += ',';
        out += std::to_string(row.oracle_calls);
        out += ',';
        out += format_double(row.eta);
        out += ',';
        out += format_double(row.beta);
        out += '\n';
    }
    return out;
}

std::string to_json_text(const TrajectoryRecord& record) {
    nlohmann::ordered_json doc;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : record.rows) {
        doc["rows"].push_back({{"seed", row.seed},
                               {"t", row.t},
                               {"f_value", row.f_value},
                               {"grad_dual_norm", row.grad_dual_norm},
                               {"oracle_calls", row.oracle_calls},
                               {"eta", row.eta},
                               {"beta", row.beta}});
    }
    doc["summary"] = nlohmann::ordered_json::array();
    for (const auto& s : record.per_seed) {
        doc["summary"].push_back({{"seed", s.seed},
                                  {"min_grad_dual", s.min_grad_dual},
                                  {"final_grad_dual", s.final_grad_dual},
                                  {"tilde_grad_dual", s.tilde_grad_dual},
                                  {"oracle_calls", s.oracle_calls}});
    }
    doc["mean_tilde_grad"] = record.mean_tilde_grad;
    doc["median_tilde_grad"] = record.median_tilde_grad;
    return doc.dump(2) + "\n";
}

std::string summary_text(const TrajectoryRecord& record) {
    std::string out;
    for (const auto& s : record.per_seed) {
        out += "seed " + std::to_string(s.seed) + ": min_grad=" + format_double(s.min_grad_dual) +
               " final_grad=" + format_double(s.final_grad_dual) +
               " tilde_grad=" + format_double(s.tilde_grad_dual) +
               " oracle_calls=" + std::to_string(s.oracle_calls) + "\n";
    }
    out += "mean_tilde_grad=" + format_double(record.mean_tilde_grad) + "\n";
    out += "median_tilde_grad=" + format_double(record.median_tilde_grad) + "\n";
    return out;
}

namespace {

const std::vector<NormKind> kAllKinds = {NormKind::Spectral, NormKind::RmsToRms,
                                         NormKind::OneToRms, NormKind::RmsToInf,
                                         NormKind::OneToInf, NormKind::Frobenius};
const std::vector<std::pair<int, int>> kShapes = {{2, 3}, {8, 8}, {16, 4}};

bool suite_duality(std::string& text, bool inject_fault) {
    Rng rng(101);
    bool ok = true;
    std::string failed_geometry;
    for (NormKind kind : kAllKinds) {
        for (auto [m, n] : kShapes) {
            Geometry g{kind, m, n};
            for (int rep = 0; rep < 40; ++rep) {
                Matrix s = Matrix::random_uniform(m, n, 1.0, rng);
                auto report = lmo(g, s);
                if (inject_fault && rep == 0 && kind == NormKind::OneToInf) {
                    report.direction(0, 0) = -report.direction(0, 0);
                    report.pairing = inner(s, report.direction);
                }
                const double dual = dual_norm(g, s);
                if (std::fabs(report.pairing + dual) > 1e-8 * std::max(1.0, dual) ||
                    primal_norm(g, report.direction) > 1.0 + 1e-8) {
                    ok = false;
                    failed_geometry = to_string(kind);
                }
            }
        }
    }
    text += std::string("duality: ") + (ok ? "pass" : "FAIL geometry=" + failed_geometry) + "\n";
    return ok;
}

bool suite_scale_invariance(std::string& text) {
    Rng rng(202);
    bool ok = true;
    for (NormKind kind : kAllKinds) {
        for (auto [m, n] : kShapes) {
            Geometry g{kind, m, n};
            for (int rep = 0; rep < 10; ++rep) {
                const Matrix s = quantize_entries(Matrix::random_uniform(m, n, 1.0, rng), 26);
                const Matrix base = lmo(g, s).direction;
                for (double alpha : {0.5, 3.0, 1e6}) {
                    if (!lmo(g, s * alpha).direction.bitwise_equal(base)) ok = false;
                }
            }
        }
    }
    text += std::string("scale_invariance: ") + (ok ? "pass" : "FAIL") + "\n";
    return ok;
}

bool suite_polar(std::string& text) {
    Rng rng(303);
    int fallbacks = 0;
    bool ok = true;
    for (int rep = 0; rep < 50; ++rep) {
        const int m = 8, n = 8;
        // random orthogonal factors via the SVD of a random matrix
        const auto base = svd(Matrix::random_uniform(m, n, 1.0, rng));
        std::vector<double> sigma(n);
        for (auto& s : sigma) s = rng.uniform(0.05, 1.0);
        const Matrix a =
            matmul(matmul(base.u, Matrix::diag(sigma)), base.v.transpose());
        const auto result = polar_factor(a, PolarMode::NewtonSchulz);
        if (result.used_fallback) {
            ++fallbacks;
            continue;
        }
        const auto exact = polar_factor(a, PolarMode::ExactSvd);
        if (frobenius_norm(result.q - exact.q) > 1e-5 * std::sqrt(static_cast<double>(n))) {
            ok = false;
        }
    }
    if (fallbacks > 3) ok = false;
    text += "polar_agreement: " + std::string(ok ? "pass" : "FAIL") +
            " fallbacks=" + std::to_string(fallbacks) + "/50\n";
    return ok;
}

bool suite_gradcheck(std::string& text) {
    Rng rng(404);
    bool ok = true;
    for (ObjectiveKind kind : {ObjectiveKind::Quadratic, ObjectiveKind::BoundedWell,
                               ObjectiveKind::FactorResidual}) {
        const int m = 4, n = 3;
        Objective obj;
        obj.kind = kind;
        if (kind == ObjectiveKind::FactorResidual) {
            const Matrix b = Matrix::random_uniform(m, m, 1.0, rng);
            obj.target = (b + b.transpose()) * 0.5;
        } else {
            obj.target = Matrix::random_uniform(m, n, 1.0, rng);
        }
        for (int rep = 0; rep < 5; ++rep) {
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
            if (worst > 1e-5 * std::max(1.0, frobenius_norm(grad))) ok = false;
        }
    }
    text += std::string("gradient_fd: ") + (ok ? "pass" : "FAIL") + "\n";
    return ok;
}

bool suite_moment(std::string& text) {
    Rng rng(505);
    NoiseModel nm;
    nm.p = 1.5;
    nm.sigma0 = 1.0;
    nm.tail_index = 2.0;
    Geometry g{NormKind::Spectral, 8, 8};
    const int draws = 200000;
    double moment = 0.0;
    for (int i = 0; i < draws; ++i) {
        const auto draw = sample_noise(nm, g, 0.0, rng);
        moment += std::pow(draw.zeta_magnitude, nm.p);
    }
    moment /= draws;
    const bool ok = moment > 0.9 && moment < 1.1;
    text += "moment_calibration: " + std::string(ok ? "pass" : "FAIL") +
            " p_moment=" + format_double(moment) + "\n";
    return ok;
}

bool suite_tau_slope(std::string& text) {
    Rng rng(606);
    bool ok = true;
    const std::vector<int> sizes{2, 4, 8, 16, 32};
    const double slope15 = scaling_slope(1.5, sizes, NormKind::Spectral,
                                         MartingaleKind::DiagSign, 1, rng);
    if (std::fabs(slope15 - (1.0 - 1.0 / 1.5)) > 0.02) ok = false;
    const double slope2 = scaling_slope(2.0, sizes, NormKind::Spectral,
                                        MartingaleKind::DiagSign, 1, rng);
    if (std::fabs(slope2 - 0.5) > 0.02) ok = false;
    const double slope_free = scaling_slope(1.5, sizes, NormKind::Frobenius,
                                            MartingaleKind::RankOneGaussian, 2000, rng);
    if (std::fabs(slope_free) > 0.15) ok = false;
    text += "tau_slope: " + std::string(ok ? "pass" : "FAIL") +
            " nuclear_p1.5=" + format_double(slope15) + " nuclear_p2=" + format_double(slope2) +
            " frobenius=" + format_double(slope_free) + "\n";
    return ok;
}

}  // namespace

SelftestReport selftest(bool inject_lmo_fault) {
    SelftestReport report;
    bool ok = true;
    ok &= suite_duality(report.text, inject_lmo_fault);
    ok &= suite_scale_invariance(report.text);
    ok &= suite_polar(report.text);
    ok &= suite_gradcheck(report.text);
    ok &= suite_moment(report.text);
    ok &= suite_tau_slope(report.text);
    report.pass = ok;
    report.text += ok ? "selftest: all suites passed\n" : "selftest: FAILURES\n";
    return report;
}

}  // namespace siopt
