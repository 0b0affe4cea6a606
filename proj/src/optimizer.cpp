#include "siopt/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace siopt {

AlgorithmKind algorithm_from_string(const std::string& name) {
    if (name == "buscg") return AlgorithmKind::Buscg;
    if (name == "tuscg") return AlgorithmKind::Tuscg;
    if (name == "nesterov") return AlgorithmKind::Nesterov;
    throw std::invalid_argument("unknown algorithm: " + name);
}

std::string to_string(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::Buscg: return "buscg";
        case AlgorithmKind::Tuscg: return "tuscg";
        case AlgorithmKind::Nesterov: return "nesterov";
    }
    return "?";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
    if (name == "theorem2") return ScheduleKind::Theorem2;
    if (name == "theorem3") return ScheduleKind::Theorem3;
    if (name == "theorem4") return ScheduleKind::Theorem4;
    if (name == "theorem5") return ScheduleKind::Theorem5;
    if (name == "manual") return ScheduleKind::Manual;
    throw std::invalid_argument("unknown schedule kind: " + name);
}

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::Theorem2: return "theorem2";
        case ScheduleKind::Theorem3: return "theorem3";
        case ScheduleKind::Theorem4: return "theorem4";
        case ScheduleKind::Theorem5: return "theorem5";
        case ScheduleKind::Manual: return "manual";
    }
    return "?";
}

double Schedule::transport_coefficient() const {
    if (alpha_transport >= 0.0) return alpha_transport;
    if (beta >= 1.0) {
        throw std::invalid_argument(
            "transport: beta = 1 with the default coefficient beta/(1-beta)");
    }
    return beta / (1.0 - beta);
}

namespace {

void check_schedule(const Schedule& s) {
    if (s.batch < 1) throw std::invalid_argument("schedule: batch must be >= 1");
    if (!(s.beta >= 0.0 && s.beta < 1.0)) {
        throw std::invalid_argument("schedule: beta must lie in [0, 1)");
    }
    if (!(s.eta > 0.0) || !std::isfinite(s.eta)) {
        throw std::invalid_argument("schedule: eta must be finite and positive");
    }
}

double guard_l1(double value, double l1) {
    // the +infinity-when-L1=0 convention of the theorem statements
    return l1 == 0.0 ? std::numeric_limits<double>::infinity() : value;
}

}  // namespace

Schedule theorem_schedule(ScheduleKind kind, const TheoremConsts& c, const Horizon& horizon) {
    if (!(c.p > 1.0 && c.p <= 2.0)) {
        throw std::invalid_argument("theorem_schedule: p must lie in (1, 2]");
    }
    const double p = c.p;
    const double tau = c.tau_star;
    Schedule sched;
    sched.kind = kind;

    switch (kind) {
        case ScheduleKind::Theorem2: {
            const double T = static_cast<double>(horizon.t_total);
            if (horizon.t_total < 1) throw std::invalid_argument("theorem2: T must be >= 1");
            if (!(c.sigma0 > 0.0 && c.l0 > 0.0)) {
                throw std::invalid_argument("theorem2: requires sigma0 > 0 and l0 > 0");
            }
            const double batch_raw = std::pow(16.0 * tau * c.sigma1, p / (p - 1.0));
            sched.batch = static_cast<int>(std::max(1.0, std::ceil(batch_raw)));
            const double B = sched.batch;
            const double a0 = c.l1 * c.delta0 +
                              tau * (c.sigma0 + c.sigma1 * c.grad0_dual) *
                                  std::pow(B, -(p - 1.0) / p);
            const double branch1 = std::pow(a0, p / (2.0 * p - 1.0)) *
                                   std::pow(B, (p - 1.0) / (2.0 * p - 1.0)) /
                                   std::pow(tau * c.sigma0 * T, p / (2.0 * p - 1.0));
            const double branch2 = std::pow(c.l0 * c.delta0, p / (3.0 * p - 2.0)) *
                                   std::pow(B, (2.0 * p - 2.0) / (3.0 * p - 2.0)) /
                                   (std::pow(tau * c.sigma0, 2.0 * p / (3.0 * p - 2.0)) *
                                    std::pow(T, p / (3.0 * p - 2.0)));
            const double alpha = std::min(1.0, std::max(branch1, branch2));
            sched.beta = 1.0 - alpha;
            sched.eta = std::min(std::sqrt(alpha * c.delta0 / (c.l0 * T)),
                                 guard_l1(alpha / (8.0 * c.l1), c.l1));
            break;
        }
        case ScheduleKind::Theorem3: {
            const double T = static_cast<double>(horizon.t_total);
            if (horizon.t_total < 1) throw std::invalid_argument("theorem3: T must be >= 1");
            sched.batch = 1;
            sched.beta = 1.0 - 1.0 / std::sqrt(T);
            sched.eta = std::min(std::pow(T, -0.75),
                                 guard_l1(1.0 / (8.0 * c.l1 * std::sqrt(T)), c.l1));
            break;
        }
        case ScheduleKind::Theorem4: {
            const double eps = horizon.epsilon;
            if (!(eps > 0.0)) throw std::invalid_argument("theorem4: epsilon must be positive");
            if (!(c.sigma0 > 0.0 && c.l2 > 0.0)) {
                throw std::invalid_argument("theorem4: requires sigma0 > 0 and l2 > 0");
            }
            const double branch0 = tau * c.sigma0 / std::sqrt(eps);
            const double branch1 =
                c.sigma1 > 0.0 ? tau * c.sigma1 * c.l0 / std::sqrt(c.l2 * eps) : 0.0;
            sched.batch = static_cast<int>(
                std::ceil(std::pow(std::max(branch0, branch1), p / (p - 1.0))));
            if (sched.batch < 1) sched.batch = 1;
            const double B = sched.batch;
            const double beta = 1.0 - B * std::pow(eps / (3.0 * tau * c.sigma0), p / (p - 1.0));
            if (!(beta >= 0.0 && beta < 1.0)) {
                throw std::runtime_error(
                    "theorem4: computed beta = " + std::to_string(beta) +
                    " falls outside [0,1); epsilon is not small enough for these constants");
            }
            sched.beta = beta;
            sched.eta = (1.0 - beta) / 20.0 * std::sqrt(eps / c.l2);
            break;
        }
        case ScheduleKind::Theorem5: {
            const double T = static_cast<double>(horizon.t_total);
            if (horizon.t_total < 1) throw std::invalid_argument("theorem5: T must be >= 1");
            sched.batch = 1;
            sched.beta = 1.0 - std::pow(T, -4.0 / 7.0);
            sched.eta = std::min(std::pow(T, -5.0 / 7.0),
                                 guard_l1(1.0 / (8.0 * c.l1 * std::pow(T, 4.0 / 7.0)), c.l1));
            break;
        }
        case ScheduleKind::Manual:
            throw std::invalid_argument("theorem_schedule: manual schedules carry explicit values");
    }
    check_schedule(sched);
    return sched;
}

namespace {

void log_iterate(OptState& state, const StepContext& ctx, const Matrix& x, long long t) {
    HistoryRow row;
    row.t = t;
    row.f_value = value(*ctx.obj, x);
    row.grad_dual_norm = dual_norm(*ctx.g, gradient(*ctx.obj, x));
    row.oracle_calls = state.oracle_calls;
    state.history.push_back(row);
}

void momentum_and_move(OptState& state, const Schedule& sched, const StepContext& ctx,
                       const Matrix& mean_grad, bool nesterov_blend) {
    const double beta = sched.beta;
    Matrix next_momentum = state.momentum * beta + mean_grad * (1.0 - beta);
    const Matrix& lmo_input = next_momentum;
    Matrix blended;
    if (nesterov_blend) {
        blended = next_momentum * (1.0 - beta) + mean_grad * beta;
    }
    const auto report = lmo(*ctx.g, nesterov_blend ? blended : lmo_input, ctx.lmo_opts);
    state.x_prev = state.x;
    state.x += report.direction * sched.eta;
    state.momentum = std::move(next_momentum);
    state.t += 1;
}

}  // namespace

OptState init_state(const StepContext& ctx, const Schedule& sched, const Matrix& x0, Rng& rng) {
    check_schedule(sched);
    OptState state;
    state.x = x0;
    state.x_prev = x0;
    state.t = 0;
    const auto g0 = sample_batch_grad(*ctx.obj, *ctx.nm, *ctx.g, x0, sched.batch, rng);
    state.oracle_calls = g0.oracle_calls;
    log_iterate(state, ctx, x0, 0);
    state.momentum = g0.mean_grad;
    const auto report = lmo(*ctx.g, state.momentum, ctx.lmo_opts);
    state.x = x0 + report.direction * sched.eta;
    state.t = 1;
    return state;
}

void buscg_step(OptState& state, const Schedule& sched, const StepContext& ctx, Rng& rng) {
    const auto sample = sample_batch_grad(*ctx.obj, *ctx.nm, *ctx.g, state.x, sched.batch, rng);
    state.oracle_calls += sample.oracle_calls;
    log_iterate(state, ctx, state.x, state.t);
    momentum_and_move(state, sched, ctx, sample.mean_grad, false);
}

void tuscg_step(OptState& state, const Schedule& sched, const StepContext& ctx, Rng& rng) {
    if (state.t < 1) throw std::invalid_argument("tuscg_step: state must be initialized (t >= 1)");
    const double coeff = sched.transport_coefficient();
    const Matrix y = state.x + (state.x - state.x_prev) * coeff;
    const auto sample = sample_batch_grad(*ctx.obj, *ctx.nm, *ctx.g, y, sched.batch, rng);
    state.oracle_calls += sample.oracle_calls;
    log_iterate(state, ctx, state.x, state.t);
    momentum_and_move(state, sched, ctx, sample.mean_grad, false);
}

void nesterov_lmo_step(OptState& state, const Schedule& sched, const StepContext& ctx, Rng& rng) {
    const auto sample = sample_batch_grad(*ctx.obj, *ctx.nm, *ctx.g, state.x, sched.batch, rng);
    state.oracle_calls += sample.oracle_calls;
    log_iterate(state, ctx, state.x, state.t);
    momentum_and_move(state, sched, ctx, sample.mean_grad, true);
}

RunResult run(AlgorithmKind algorithm, const Schedule& sched, const StepContext& ctx,
              const Matrix& x0, long long t_total, Rng& rng) {
    if (t_total < 1) throw std::invalid_argument("run: t_total must be >= 1");
    // the output index is drawn up front so iterates need not be stored
    const long long pick = static_cast<long long>(rng.uniform_index(t_total));

    RunResult result;
    OptState state = init_state(ctx, sched, x0, rng);
    if (pick == 0) result.tilde_x = x0;

    for (long long t = 1; t < t_total; ++t) {
        if (pick == t) result.tilde_x = state.x;
        switch (algorithm) {
            case AlgorithmKind::Buscg: buscg_step(state, sched, ctx, rng); break;
            case AlgorithmKind::Tuscg: tuscg_step(state, sched, ctx, rng); break;
            case AlgorithmKind::Nesterov: nesterov_lmo_step(state, sched, ctx, rng); break;
        }
    }
    result.tilde_grad_dual = dual_norm(*ctx.g, gradient(*ctx.obj, result.tilde_x));
    result.history = std::move(state.history);
    result.oracle_calls = state.oracle_calls;
    return result;
}

}  // namespace siopt
