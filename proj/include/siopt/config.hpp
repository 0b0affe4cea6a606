#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "siopt/optimizer.hpp"

namespace siopt {

// How a matrix (target or starting point) is specified in a config.
struct MatrixSpec {
    enum class Kind { Zeros, Identity, Explicit, RandomUniform } kind = Kind::Zeros;
    std::vector<std::vector<double>> data;  // Explicit
    std::uint64_t seed = 0;                 // RandomUniform
    double scale = 1.0;                     // RandomUniform

    Matrix realize(int rows, int cols) const;
};

struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::Manual;
    // Manual values; also alpha_transport override for tuscg
    std::optional<int> batch;
    std::optional<double> beta;
    std::optional<double> eta;
    std::optional<double> alpha_transport;
    // Theorem inputs not derivable from the rest of the config
    std::optional<double> tau_star;  // default min(d_out,d_in)^{1-1/p}
    std::optional<double> epsilon;   // Theorem 4
};

struct RunConfig {
    Geometry geometry{NormKind::Spectral, 0, 0};
    ObjectiveKind objective_kind = ObjectiveKind::Quadratic;
    MatrixSpec target;
    std::optional<SmoothnessConstants> constants;  // default_constants when absent
    NoiseModel noise;
    AlgorithmKind algorithm = AlgorithmKind::Buscg;
    ScheduleSpec schedule;
    MatrixSpec x0;
    long long t_total = 0;
    std::vector<std::uint64_t> seeds;
    std::string output_path;
    bool lmo_newton_schulz = false;
};

// Parses and fully validates a JSON config document. Unknown keys are
// rejected; theorem preconditions are checked at parse time by
// resolving the schedule once against the configured problem.
RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);

// Resolved problem built from a config: objective with constants filled,
// calibrated noise model, and the concrete schedule.
struct ResolvedExperiment {
    Objective objective;
    NoiseModel noise;
    Schedule schedule;
    Matrix x0;
};

ResolvedExperiment resolve_experiment(const RunConfig& cfg);

}  // namespace siopt
