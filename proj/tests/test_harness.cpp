#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "siopt/harness.hpp"

using namespace siopt;

namespace {

const char* kMinimalConfig = R"json({
  "geometry": {"kind": "spectral", "d_out": 3, "d_in": 3},
  "objective": {"kind": "quadratic", "target": {"kind": "identity"}},
  "algorithm": "buscg",
  "schedule": {"kind": "manual", "beta": 0.5, "eta": 0.01},
  "t_total": 4,
  "seeds": [7]
})json";

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("minimal config fills the defaults") {
    const RunConfig cfg = parse_config(kMinimalConfig);
    CHECK(cfg.geometry.kind == NormKind::Spectral);
    CHECK(cfg.noise.sigma0 == 0.0);
    CHECK(cfg.noise.sigma1 == 0.0);
    CHECK(cfg.noise.tail_index == doctest::Approx(1.75));
    CHECK(cfg.x0.kind == MatrixSpec::Kind::Zeros);
    CHECK(cfg.output_path.empty());
    CHECK_FALSE(cfg.lmo_newton_schulz);
    CHECK_FALSE(cfg.constants.has_value());
}

TEST_CASE("out-of-range p names the assumption range") {
    const std::string bad = replace_once(
        kMinimalConfig, "\"algorithm\"", "\"noise\": {\"p\": 2.5, \"sigma0\": 1.0}, \"algorithm\"");
    try {
        parse_config(bad);
        FAIL("expected a validation error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("(1,2]") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected with the key name") {
    const std::string bad = replace_once(kMinimalConfig, "\"t_total\": 4", "\"t_max\": 4");
    try {
        parse_config(bad);
        FAIL("expected a validation error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("t_max") != std::string::npos);
    }
}

TEST_CASE("seeds must be nonempty and distinct") {
    CHECK_THROWS_AS(parse_config(replace_once(kMinimalConfig, "[7]", "[]")),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(replace_once(kMinimalConfig, "[7]", "[7, 7]")),
                    std::invalid_argument);
}

TEST_CASE("manual schedules require explicit beta and eta") {
    const std::string bad = replace_once(kMinimalConfig, "\"beta\": 0.5, ", "");
    CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);
}

TEST_CASE("malformed json is a validation error") {
    CHECK_THROWS_AS(parse_config("{ not json"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(replace_once(kMinimalConfig, "spectral", "euclidean")),
                    std::invalid_argument);
}

TEST_CASE("theorem preconditions are checked at parse time") {
    // theorem 2 needs sigma0 > 0; the minimal config is noiseless
    const std::string bad =
        replace_once(kMinimalConfig, "{\"kind\": \"manual\", \"beta\": 0.5, \"eta\": 0.01}",
                     "{\"kind\": \"theorem2\"}");
    CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);

    const std::string ok =
        replace_once(kMinimalConfig, "{\"kind\": \"manual\", \"beta\": 0.5, \"eta\": 0.01}",
                     "{\"kind\": \"theorem3\"}");
    CHECK_NOTHROW(parse_config(ok));
}

TEST_CASE("config round trip") {
    std::string text = replace_once(
        kMinimalConfig, "\"algorithm\"",
        "\"noise\": {\"p\": 1.5, \"sigma0\": 0.5, \"tail_index\": 1.9}, \"algorithm\"");
    text = replace_once(text, "\"seeds\": [7]", "\"seeds\": [7, 9], \"output_path\": \"out.csv\"");
    const RunConfig cfg = parse_config(text);
    const RunConfig round = parse_config(serialize_config(cfg));
    CHECK(cfg == round);
    CHECK(serialize_config(cfg) == serialize_config(round));
}

TEST_CASE("run_experiment is deterministic at the byte level") {
    const RunConfig cfg = parse_config(kMinimalConfig);
    const std::string a = to_csv(run_experiment(cfg));
    const std::string b = to_csv(run_experiment(cfg));
    CHECK(a == b);
    CHECK(a.rfind("seed,t,f_value,grad_dual_norm,oracle_calls,eta,beta\n", 0) == 0);
    CHECK(a.find("\r") == std::string::npos);
}

TEST_CASE("summary mean is the arithmetic mean over seeds") {
    const std::string text = replace_once(kMinimalConfig, "[7]", "[1, 2]");
    const TrajectoryRecord record = run_experiment(parse_config(text));
    REQUIRE(record.per_seed.size() == 2);
    const double expected =
        0.5 * (record.per_seed[0].tilde_grad_dual + record.per_seed[1].tilde_grad_dual);
    CHECK(record.mean_tilde_grad == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("per-seed rows are ordered and oracle calls accumulate") {
    std::string text = replace_once(kMinimalConfig, "[7]", "[3, 5]");
    text = replace_once(text, "\"t_total\": 4", "\"t_total\": 6");
    const TrajectoryRecord record = run_experiment(parse_config(text));
    REQUIRE(record.rows.size() == 12);
    for (std::size_t i = 1; i < record.rows.size(); ++i) {
        if (record.rows[i].seed != record.rows[i - 1].seed) continue;
        CHECK(record.rows[i].t == record.rows[i - 1].t + 1);
        CHECK(record.rows[i].oracle_calls >= record.rows[i - 1].oracle_calls);
    }
}

TEST_CASE("longer noiseless runs never raise the best gradient norm") {
    std::string base = replace_once(
        kMinimalConfig, "{\"kind\": \"identity\"}", "{\"kind\": \"random_uniform\", \"seed\": 11}");
    double prev = 1e300;
    for (long long t : {8, 16, 32, 64}) {
        const std::string text =
            replace_once(base, "\"t_total\": 4", "\"t_total\": " + std::to_string(t));
        const TrajectoryRecord record = run_experiment(parse_config(text));
        CHECK(record.per_seed[0].min_grad_dual <= prev);
        prev = record.per_seed[0].min_grad_dual;
    }
}

TEST_CASE("format_double survives a round trip") {
    for (double x : {0.0, 1.0, -1.0 / 3.0, 6.02e23, 1e-300, 0.1}) {
        CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
}

TEST_CASE("quantize_entries truncates the mantissa") {
    Rng rng(1);
    const Matrix a = Matrix::random_uniform(4, 4, 1.0, rng);
    const Matrix q = quantize_entries(a, 26);
    for (const double x : q.data()) {
        if (x == 0.0) continue;
        int exp = 0;
        const double scaled = std::ldexp(std::frexp(x, &exp), 26);
        CHECK(scaled == std::round(scaled));
        // small-integer scalings stay exact
        CHECK((x * 3.0) / 3.0 == x);
        CHECK(x * 1e6 / 1e6 == x);
    }
}

TEST_CASE("selftest passes and its report is reproducible") {
    const SelftestReport a = selftest();
    CHECK(a.pass);
    CHECK(a.text.find("duality: pass") != std::string::npos);
    CHECK(a.text.find("moment_calibration: pass") != std::string::npos);
    const SelftestReport b = selftest();
    CHECK(a.text == b.text);
}

TEST_CASE("selftest catches an injected lmo fault") {
    const SelftestReport report = selftest(true);
    CHECK_FALSE(report.pass);
    CHECK(report.text.find("duality: FAIL") != std::string::npos);
    CHECK(report.text.find("one_inf") != std::string::npos);
}

TEST_CASE("json output carries the summary") {
    const std::string text = to_json_text(run_experiment(parse_config(kMinimalConfig)));
    CHECK(text.find("\"mean_tilde_grad\"") != std::string::npos);
    CHECK(text.find("\"median_tilde_grad\"") != std::string::npos);
    CHECK(text.find("\"rows\"") != std::string::npos);
}

TEST_CASE("explicit matrix specs validate their shape") {
    const std::string bad = replace_once(
        kMinimalConfig, "{\"kind\": \"identity\"}",
        "{\"kind\": \"explicit\", \"data\": [[1, 2], [3, 4]]}");
    CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);
}
