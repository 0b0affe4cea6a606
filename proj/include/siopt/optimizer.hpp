#pragma once

#include <string>
#include <vector>

#include "siopt/noise.hpp"

namespace siopt {

enum class AlgorithmKind { Buscg, Tuscg, Nesterov };

AlgorithmKind algorithm_from_string(const std::string& name);
std::string to_string(AlgorithmKind kind);

enum class ScheduleKind { Theorem2, Theorem3, Theorem4, Theorem5, Manual };

ScheduleKind schedule_kind_from_string(const std::string& name);
std::string to_string(ScheduleKind kind);

struct Schedule {
    int batch = 1;
    double beta = 0.0;
    double eta = 0.0;
    // transport coefficient for tuscg; negative means the default beta/(1-beta)
    double alpha_transport = -1.0;
    ScheduleKind kind = ScheduleKind::Manual;

    double transport_coefficient() const;
};

// Inputs to the closed-form parameter schedules.
struct TheoremConsts {
    double p = 1.5;
    double sigma0 = 0.0;
    double sigma1 = 0.0;
    double l0 = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double delta0 = 0.0;      // F(X0) - F*
    double grad0_dual = 0.0;  // ||grad F(X0)||_*
    double tau_star = 1.0;    // martingale factor, min(m,n)^{1-1/p} by default
};

struct Horizon {
    long long t_total = 0;  // Theorems 2, 3, 5
    double epsilon = 0.0;   // Theorem 4
};

// Evaluates the exact closed forms of the four theorem schedules.
// Throws std::invalid_argument for p outside (1,2] and std::runtime_error
// when Theorem 4's beta lands outside [0,1).
Schedule theorem_schedule(ScheduleKind kind, const TheoremConsts& consts, const Horizon& horizon);

struct HistoryRow {
    long long t = 0;
    double f_value = 0.0;
    double grad_dual_norm = 0.0;  // analytic true gradient, dual norm
    long long oracle_calls = 0;
};

struct OptState {
    Matrix x;
    Matrix x_prev;
    Matrix momentum;
    long long t = 0;
    long long oracle_calls = 0;
    std::vector<HistoryRow> history;
};

struct StepContext {
    const Objective* obj;
    const NoiseModel* nm;
    const Geometry* g;
    LmoOptions lmo_opts;
};

OptState init_state(const StepContext& ctx, const Schedule& sched, const Matrix& x0, Rng& rng);

void buscg_step(OptState& state, const Schedule& sched, const StepContext& ctx, Rng& rng);
void tuscg_step(OptState& state, const Schedule& sched, const StepContext& ctx, Rng& rng);
void nesterov_lmo_step(OptState& state, const Schedule& sched, const StepContext& ctx, Rng& rng);

struct RunResult {
    Matrix tilde_x;  // uniform draw from {X_0, ..., X_{T-1}}
    double tilde_grad_dual = 0.0;
    std::vector<HistoryRow> history;  // rows at X_0 .. X_{T-1}
    long long oracle_calls = 0;
};

RunResult run(AlgorithmKind algorithm, const Schedule& sched, const StepContext& ctx,
              const Matrix& x0, long long t_total, Rng& rng);

}  // namespace siopt
