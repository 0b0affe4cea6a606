#pragma once

#include <string>
#include <vector>

#include "siopt/config.hpp"
#include "siopt/martingale.hpp"

namespace siopt {

// Per-iteration log rows for all seeds plus summary statistics. The mean
// and median of the selected-iterate gradient norms across seeds are the
// Monte-Carlo surrogate for the expected stationarity measure.
struct TrajectoryRecord {
    struct Row {
        std::uint64_t seed;
        long long t;
        double f_value;
        double grad_dual_norm;
        long long oracle_calls;
        double eta;
        double beta;
    };
    struct SeedSummary {
        std::uint64_t seed;
        double min_grad_dual;
        double final_grad_dual;
        double tilde_grad_dual;
        long long oracle_calls;
    };
    std::vector<Row> rows;  // seeds in config order, t ascending within a seed
    std::vector<SeedSummary> per_seed;
    double mean_tilde_grad = 0.0;
    double median_tilde_grad = 0.0;
};

// One optimizers run per seed (seeds execute in parallel; output is
// independent of the interleaving).
TrajectoryRecord run_experiment(const RunConfig& cfg);

// CSV with the fixed column schema, 17 significant digits, LF endings.
std::string to_csv(const TrajectoryRecord& record);
std::string to_json_text(const TrajectoryRecord& record);
std::string summary_text(const TrajectoryRecord& record);

// %.17g, enough digits for a bit-faithful round trip
std::string format_double(double x);

// Truncates each entry to `bits` significant mantissa bits. Scalings by
// small integers (and by 1e6 = 2^6 * 5^6) of such a matrix are exact in
// double precision, which is what the bitwise scale-invariance checks
// rely on.
Matrix quantize_entries(const Matrix& a, int bits);

struct SelftestReport {
    bool pass = false;
    std::string text;
};

// Bundled invariant suites: LMO duality, scale invariance, polar
// agreement, gradient finite differences, noise moment calibration, and
// the martingale scaling slope. Fixed internal seeds; the report text is
// identical across invocations. `inject_lmo_fault` flips one sign inside
// the duality suite's direction to confirm the suite catches it.
SelftestReport selftest(bool inject_lmo_fault = false);

}  // namespace siopt
