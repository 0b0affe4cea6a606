#include "siopt/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace siopt {

using json = nlohmann::ordered_json;

Matrix MatrixSpec::realize(int rows, int cols) const {
    switch (kind) {
        case Kind::Zeros:
            return Matrix(rows, cols);
        case Kind::Identity: {
            if (rows != cols) {
                throw std::invalid_argument("matrix spec: identity requires a square shape");
            }
            return Matrix::identity(rows);
        }
        case Kind::Explicit: {
            if (static_cast<int>(data.size()) != rows) {
                throw std::invalid_argument("matrix spec: explicit data has wrong row count");
            }
            Matrix m(rows, cols);
            for (int i = 0; i < rows; ++i) {
                if (static_cast<int>(data[i].size()) != cols) {
                    throw std::invalid_argument("matrix spec: explicit data has ragged rows");
                }
                for (int j = 0; j < cols; ++j) m(i, j) = data[i][j];
            }
            return m;
        }
        case Kind::RandomUniform: {
            Rng rng(seed);
            return Matrix::random_uniform(rows, cols, scale, rng);
        }
    }
    return Matrix(rows, cols);
}

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw std::invalid_argument("config: unknown key '" + item.key() + "' in " + where);
        }
    }
}

MatrixSpec parse_matrix_spec(const json& obj, const std::string& where) {
    check_keys(obj, {"kind", "data", "seed", "scale"}, where);
    MatrixSpec spec;
    const std::string kind = obj.at("kind").get<std::string>();
    if (kind == "zeros") {
        spec.kind = MatrixSpec::Kind::Zeros;
    } else if (kind == "identity") {
        spec.kind = MatrixSpec::Kind::Identity;
    } else if (kind == "explicit") {
        spec.kind = MatrixSpec::Kind::Explicit;
        spec.data = obj.at("data").get<std::vector<std::vector<double>>>();
    } else if (kind == "random_uniform") {
        spec.kind = MatrixSpec::Kind::RandomUniform;
        spec.seed = obj.at("seed").get<std::uint64_t>();
        spec.scale = obj.value("scale", 1.0);
    } else {
        throw std::invalid_argument("config: unknown matrix spec kind '" + kind + "' in " + where);
    }
    return spec;
}

json matrix_spec_to_json(const MatrixSpec& spec) {
    json obj;
    switch (spec.kind) {
        case MatrixSpec::Kind::Zeros: obj["kind"] = "zeros"; break;
        case MatrixSpec::Kind::Identity: obj["kind"] = "identity"; break;
        case MatrixSpec::Kind::Explicit:
            obj["kind"] = "explicit";
            obj["data"] = spec.data;
            break;
        case MatrixSpec::Kind::RandomUniform:
            obj["kind"] = "random_uniform";
            obj["seed"] = spec.seed;
            obj["scale"] = spec.scale;
            break;
    }
    return obj;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: malformed document: ") + e.what());
    }
    check_keys(doc,
               {"geometry", "objective", "noise", "algorithm", "schedule", "x0", "t_total",
                "seeds", "output_path", "lmo_newton_schulz"},
               "top level");

    RunConfig cfg;

    const json& geo = doc.at("geometry");
    check_keys(geo, {"kind", "d_out", "d_in"}, "geometry");
    cfg.geometry.kind = norm_kind_from_string(geo.at("kind").get<std::string>());
    cfg.geometry.d_out = geo.at("d_out").get<int>();
    cfg.geometry.d_in = geo.at("d_in").get<int>();
    if (cfg.geometry.d_out < 1 || cfg.geometry.d_in < 1) {
        throw std::invalid_argument("config: geometry dimensions must be positive");
    }

    const json& objective = doc.at("objective");
    check_keys(objective, {"kind", "target", "constants"}, "objective");
    cfg.objective_kind = objective_kind_from_string(objective.at("kind").get<std::string>());
    cfg.target = parse_matrix_spec(objective.at("target"), "objective.target");
    if (objective.contains("constants")) {
        const json& consts = objective.at("constants");
        check_keys(consts, {"l0", "l1", "l2", "f_star"}, "objective.constants");
        SmoothnessConstants c;
        c.l0 = consts.at("l0").get<double>();
        c.l1 = consts.value("l1", 0.0);
        c.l2 = consts.value("l2", 0.0);
        c.f_star = consts.value("f_star", 0.0);
        cfg.constants = c;
    }

    if (doc.contains("noise")) {
        const json& noise = doc.at("noise");
        check_keys(noise, {"p", "sigma0", "sigma1", "tail_index", "shape"}, "noise");
        cfg.noise.p = noise.value("p", 1.5);
        cfg.noise.sigma0 = noise.value("sigma0", 0.0);
        cfg.noise.sigma1 = noise.value("sigma1", 0.0);
        cfg.noise.tail_index = noise.contains("tail_index")
                                   ? noise.at("tail_index").get<double>()
                                   : (cfg.noise.p + 2.0) / 2.0;
        if (noise.contains("shape")) {
            cfg.noise.shape = noise_shape_from_string(noise.at("shape").get<std::string>());
        }
    } else {
        cfg.noise.tail_index = (cfg.noise.p + 2.0) / 2.0;
    }
    if (!(cfg.noise.p > 1.0 && cfg.noise.p <= 2.0)) {
        throw std::invalid_argument("config: noise.p violates the Assumption 2 range (1,2]");
    }
    cfg.noise.validate();

    cfg.algorithm = algorithm_from_string(doc.at("algorithm").get<std::string>());

    const json& sched = doc.at("schedule");
    check_keys(sched, {"kind", "batch", "beta", "eta", "alpha_transport", "tau_star", "epsilon"},
               "schedule");
    cfg.schedule.kind = schedule_kind_from_string(sched.at("kind").get<std::string>());
    if (sched.contains("batch")) cfg.schedule.batch = sched.at("batch").get<int>();
    if (sched.contains("beta")) cfg.schedule.beta = sched.at("beta").get<double>();
    if (sched.contains("eta")) cfg.schedule.eta = sched.at("eta").get<double>();
    if (sched.contains("alpha_transport"))
        cfg.schedule.alpha_transport = sched.at("alpha_transport").get<double>();
    if (sched.contains("tau_star")) cfg.schedule.tau_star = sched.at("tau_star").get<double>();
    if (sched.contains("epsilon")) cfg.schedule.epsilon = sched.at("epsilon").get<double>();
    if (cfg.schedule.kind == ScheduleKind::Manual) {
        if (!cfg.schedule.beta || !cfg.schedule.eta) {
            throw std::invalid_argument("config: manual schedule requires explicit beta and eta");
        }
    }

    if (doc.contains("x0")) cfg.x0 = parse_matrix_spec(doc.at("x0"), "x0");

    cfg.t_total = doc.at("t_total").get<long long>();
    if (cfg.t_total < 1) throw std::invalid_argument("config: t_total must be >= 1");

    cfg.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    if (cfg.seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
    std::set<std::uint64_t> unique(cfg.seeds.begin(), cfg.seeds.end());
    if (unique.size() != cfg.seeds.size()) {
        throw std::invalid_argument("config: seeds must be distinct");
    }

    cfg.output_path = doc.value("output_path", std::string{});
    cfg.lmo_newton_schulz = doc.value("lmo_newton_schulz", false);

    // Resolving once validates theorem preconditions and matrix shapes.
    resolve_experiment(cfg);
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    json doc;
    doc["geometry"] = {{"kind", to_string(cfg.geometry.kind)},
                       {"d_out", cfg.geometry.d_out},
                       {"d_in", cfg.geometry.d_in}};
    json objective;
    objective["kind"] = to_string(cfg.objective_kind);
    objective["target"] = matrix_spec_to_json(cfg.target);
    if (cfg.constants) {
        objective["constants"] = {{"l0", cfg.constants->l0},
                                  {"l1", cfg.constants->l1},
                                  {"l2", cfg.constants->l2},
                                  {"f_star", cfg.constants->f_star}};
    }
    doc["objective"] = std::move(objective);
    doc["noise"] = {{"p", cfg.noise.p},
                    {"sigma0", cfg.noise.sigma0},
                    {"sigma1", cfg.noise.sigma1},
                    {"tail_index", cfg.noise.tail_index},
                    {"shape", to_string(cfg.noise.shape)}};
    doc["algorithm"] = to_string(cfg.algorithm);
    json sched;
    sched["kind"] = to_string(cfg.schedule.kind);
    if (cfg.schedule.batch) sched["batch"] = *cfg.schedule.batch;
    if (cfg.schedule.beta) sched["beta"] = *cfg.schedule.beta;
    if (cfg.schedule.eta) sched["eta"] = *cfg.schedule.eta;
    if (cfg.schedule.alpha_transport) sched["alpha_transport"] = *cfg.schedule.alpha_transport;
    if (cfg.schedule.tau_star) sched["tau_star"] = *cfg.schedule.tau_star;
    if (cfg.schedule.epsilon) sched["epsilon"] = *cfg.schedule.epsilon;
    doc["schedule"] = std::move(sched);
    doc["x0"] = matrix_spec_to_json(cfg.x0);
    doc["t_total"] = cfg.t_total;
    doc["seeds"] = cfg.seeds;
    if (!cfg.output_path.empty()) doc["output_path"] = cfg.output_path;
    doc["lmo_newton_schulz"] = cfg.lmo_newton_schulz;
    return doc.dump(2) + "\n";
}

namespace {

bool operator_eq(const MatrixSpec& a, const MatrixSpec& b) {
    return a.kind == b.kind && a.data == b.data && a.seed == b.seed && a.scale == b.scale;
}

bool operator_eq(const SmoothnessConstants& a, const SmoothnessConstants& b) {
    return a.l0 == b.l0 && a.l1 == b.l1 && a.l2 == b.l2 && a.f_star == b.f_star;
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
    const bool consts_eq = a.constants.has_value() == b.constants.has_value() &&
                           (!a.constants || operator_eq(*a.constants, *b.constants));
    return a.geometry.kind == b.geometry.kind && a.geometry.d_out == b.geometry.d_out &&
           a.geometry.d_in == b.geometry.d_in && a.objective_kind == b.objective_kind &&
           operator_eq(a.target, b.target) && consts_eq && a.noise.p == b.noise.p &&
           a.noise.sigma0 == b.noise.sigma0 && a.noise.sigma1 == b.noise.sigma1 &&
           a.noise.tail_index == b.noise.tail_index && a.noise.shape == b.noise.shape &&
           a.algorithm == b.algorithm && a.schedule.kind == b.schedule.kind &&
           a.schedule.batch == b.schedule.batch && a.schedule.beta == b.schedule.beta &&
           a.schedule.eta == b.schedule.eta &&
           a.schedule.alpha_transport == b.schedule.alpha_transport &&
           a.schedule.tau_star == b.schedule.tau_star &&
           a.schedule.epsilon == b.schedule.epsilon && operator_eq(a.x0, b.x0) &&
           a.t_total == b.t_total && a.seeds == b.seeds && a.output_path == b.output_path &&
           a.lmo_newton_schulz == b.lmo_newton_schulz;
}

ResolvedExperiment resolve_experiment(const RunConfig& cfg) {
    ResolvedExperiment exp;
    const int rows = cfg.geometry.d_out;
    const int cols = cfg.geometry.d_in;
    const int target_cols = cfg.objective_kind == ObjectiveKind::FactorResidual ? rows : cols;

    exp.objective.kind = cfg.objective_kind;
    exp.objective.target = cfg.target.realize(rows, target_cols);
    if (cfg.objective_kind == ObjectiveKind::FactorResidual) {
        // Gram targets are symmetric; the gradient formula assumes it.
        exp.objective.target = (exp.objective.target + exp.objective.target.transpose()) * 0.5;
    }
    exp.objective.constants =
        cfg.constants ? *cfg.constants
                      : default_constants(cfg.objective_kind, exp.objective.target, cfg.geometry);

    exp.noise = cfg.noise;
    if (exp.noise.shape == NoiseShape::Entrywise &&
        (exp.noise.sigma0 > 0.0 || exp.noise.sigma1 > 0.0)) {
        Rng calib_rng(0xCA11B5EEDULL);
        exp.noise = calibrate_entrywise(exp.noise, cfg.geometry, 2000, calib_rng);
    }

    exp.x0 = cfg.x0.realize(rows, cols);

    if (cfg.schedule.kind == ScheduleKind::Manual) {
        exp.schedule.kind = ScheduleKind::Manual;
        exp.schedule.batch = cfg.schedule.batch.value_or(1);
        exp.schedule.beta = *cfg.schedule.beta;
        exp.schedule.eta = *cfg.schedule.eta;
    } else {
        TheoremConsts consts;
        consts.p = exp.noise.p;
        consts.sigma0 = exp.noise.sigma0;
        consts.sigma1 = exp.noise.sigma1;
        consts.l0 = exp.objective.constants.l0;
        consts.l1 = exp.objective.constants.l1;
        consts.l2 = exp.objective.constants.l2;
        consts.delta0 = value(exp.objective, exp.x0) - exp.objective.constants.f_star;
        consts.grad0_dual = dual_norm(cfg.geometry, gradient(exp.objective, exp.x0));
        consts.tau_star = cfg.schedule.tau_star.value_or(
            std::pow(static_cast<double>(std::min(rows, cols)), 1.0 - 1.0 / consts.p));
        Horizon horizon;
        horizon.t_total = cfg.t_total;
        if (cfg.schedule.kind == ScheduleKind::Theorem4) {
            if (!cfg.schedule.epsilon) {
                throw std::invalid_argument("config: theorem4 schedule requires epsilon");
            }
            horizon.epsilon = *cfg.schedule.epsilon;
        }
        exp.schedule = theorem_schedule(cfg.schedule.kind, consts, horizon);
    }
    if (cfg.schedule.alpha_transport) {
        exp.schedule.alpha_transport = *cfg.schedule.alpha_transport;
    }
    return exp;
}

}  // namespace siopt
