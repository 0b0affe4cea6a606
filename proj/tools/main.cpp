// Benchmark CLI: deterministic runs, sweeps, martingale-factor estimates,
// gradient checks, and the bundled selftest.
//
// Exit codes: 0 success, 1 validation error, 2 runtime error, 3 selftest failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "siopt/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

void emit_record(const siopt::TrajectoryRecord& record, const std::string& out_path,
                 const std::string& format) {
    const std::string payload =
        format == "json" ? siopt::to_json_text(record) : siopt::to_csv(record);
    if (out_path.empty()) {
        std::cout << payload;
    } else {
        write_file(out_path, payload);
    }
    std::cerr << siopt::summary_text(record);
}

std::vector<long long> parse_vary_values(const std::string& vary) {
    const auto eq = vary.find('=');
    if (eq == std::string::npos || vary.substr(0, eq) != "t_total") {
        throw std::invalid_argument("--vary expects t_total=a,b,c");
    }
    std::vector<long long> values;
    std::stringstream ss(vary.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stoll(item));
    if (values.empty()) throw std::invalid_argument("--vary lists no values");
    return values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scale-invariant matrix optimization benchmark harness"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "csv", vary;
    double tau_p = 1.5;
    std::string tau_family = "diag_sign";
    std::vector<int> tau_sizes{2, 4, 8, 16, 32};
    int tau_trials = 10000;
    std::string tau_norm = "spectral";
    std::string gradcheck_objective;

    auto* run_cmd = app.add_subcommand("run", "execute a config, one run per seed");
    run_cmd->add_option("config", config_path)->required();
    run_cmd->add_option("--out", out_path);
    run_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

    auto* sweep_cmd = app.add_subcommand("sweep", "run a config across t_total values");
    sweep_cmd->add_option("config", config_path)->required();
    sweep_cmd->add_option("--vary", vary)->required();
    sweep_cmd->add_option("--out", out_path);
    sweep_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

    auto* tau_cmd = app.add_subcommand("tau", "martingale-factor scaling estimate");
    tau_cmd->add_option("--p", tau_p);
    tau_cmd->add_option("--sizes", tau_sizes)->delimiter(',');
    tau_cmd->add_option("--family", tau_family);
    tau_cmd->add_option("--trials", tau_trials);
    tau_cmd->add_option("--norm", tau_norm);

    auto* selftest_cmd = app.add_subcommand("selftest", "run the bundled invariant suites");
    (void)selftest_cmd;

    auto* gradcheck_cmd = app.add_subcommand("gradcheck", "finite-difference gradient check");
    gradcheck_cmd->add_option("objective", gradcheck_objective)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run_cmd->parsed()) {
            const auto cfg = siopt::parse_config(read_file(config_path));
            const auto record = siopt::run_experiment(cfg);
            emit_record(record, out_path.empty() ? cfg.output_path : out_path, format);
            return 0;
        }

        if (sweep_cmd->parsed()) {
            auto cfg = siopt::parse_config(read_file(config_path));
            const auto values = parse_vary_values(vary);
            const std::string base =
                out_path.empty() ? cfg.output_path : out_path;
            for (long long t : values) {
                cfg.t_total = t;
                const auto record = siopt::run_experiment(cfg);
                std::string target = base;
                if (!target.empty()) {
                    const auto dot = target.rfind('.');
                    const std::string suffix = "_t" + std::to_string(t);
                    target = dot == std::string::npos
                                 ? target + suffix
                                 : target.substr(0, dot) + suffix + target.substr(dot);
                }
                std::cerr << "t_total=" << t << "\n";
                emit_record(record, target, format);
            }
            return 0;
        }

        if (tau_cmd->parsed()) {
            const auto family = siopt::martingale_kind_from_string(tau_family);
            const auto norm = siopt::norm_kind_from_string(tau_norm);
            siopt::Rng rng(20240601);
            for (int r : tau_sizes) {
                double ratio;
                if (family == siopt::MartingaleKind::DiagSign && norm == siopt::NormKind::Spectral) {
                    ratio = siopt::diag_sign_ratio(r, tau_p);
                } else {
                    siopt::MartingaleFamily fam{family, r, r,
                                                family == siopt::MartingaleKind::DiagSign ? r : 16};
                    siopt::Geometry g{norm, r, r};
                    siopt::Rng size_rng = rng.split(static_cast<std::uint64_t>(r));
                    ratio = siopt::estimate_tau_lower(fam, g, tau_p, tau_trials, size_rng);
                }
                std::cout << "r=" << r << " ratio=" << siopt::format_double(ratio) << "\n";
            }
            const double slope = siopt::scaling_slope(tau_p, tau_sizes, norm, family,
                                                      tau_trials, rng);
            std::cout << "slope=" << siopt::format_double(slope) << "\n";
            return 0;
        }

        if (selftest_cmd->parsed()) {
            const auto report = siopt::selftest();
            std::cout << report.text;
            return report.pass ? 0 : 3;
        }

        if (gradcheck_cmd->parsed()) {
            const auto kind = siopt::objective_kind_from_string(gradcheck_objective);
            siopt::Rng rng(99);
            siopt::Objective obj;
            obj.kind = kind;
            const int m = 6, n = 5;
            if (kind == siopt::ObjectiveKind::FactorResidual) {
                const auto b = siopt::Matrix::random_uniform(m, m, 1.0, rng);
                obj.target = (b + b.transpose()) * 0.5;
            } else {
                obj.target = siopt::Matrix::random_uniform(m, n, 1.0, rng);
            }
            double worst = 0.0;
            for (int rep = 0; rep < 10; ++rep) {
                const auto x = siopt::Matrix::random_uniform(m, n, 1.0, rng);
                const auto grad = siopt::gradient(obj, x);
                const double h = 1e-5;
                for (int i = 0; i < m; ++i) {
                    for (int j = 0; j < n; ++j) {
                        auto xp = x, xm = x;
                        xp(i, j) += h;
                        xm(i, j) -= h;
                        const double fd =
                            (siopt::value(obj, xp) - siopt::value(obj, xm)) / (2.0 * h);
                        worst = std::max(worst, std::fabs(fd - grad(i, j)) /
                                                    std::max(1.0, siopt::frobenius_norm(grad)));
                    }
                }
            }
            std::cout << "objective=" << gradcheck_objective
                      << " max_rel_error=" << siopt::format_double(worst) << "\n";
            return worst <= 1e-5 ? 0 : 2;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
