#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"

#include "slnorm/cli.hpp"
#include "slnorm/errors.hpp"

using namespace slnorm;

namespace {
constexpr double kPi = std::numbers::pi;

std::string trivial_text() {
    return R"({"potential": {"kind": "zero"},
               "alpha": 1.5707963267948966,
               "beta": 1.5707963267948966,
               "N_eigen": 10})";
}

const RunReport& trivial_report() {
    static RunReport r = run(parse_run_config(trivial_text()));
    return r;
}

const ResidualRow* find_row(const RunReport& r, const std::string& name) {
    for (const auto& s : r.suites)
        for (const auto& row : s.rows)
            if (row.name == name) return &row;
    return nullptr;
}
} // namespace

TEST_CASE("config parsing fills defaults and resolves truncations") {
    RunConfig cfg = parse_run_config(R"({"alpha": 1.0, "beta": 2.0})");
    CHECK(cfg.potential.kind == "zero");
    CHECK(cfg.N_eigen == 401);
    CHECK(cfg.N_modes == 0);
    CHECK(cfg.suites.empty());

    RunConfig r = cfg.resolved();
    CHECK(r.N_modes == 400);
    CHECK(r.M == 200);
    CHECK(r.K == 400);
    CHECK(r.suites == std::vector<std::string>{"spectrum", "norming", "traces",
                                               "glk", "charfn"});
    CHECK(r.output.format == "json");

    // suite selection is deduplicated and put into dependency order
    cfg.suites = {"charfn", "traces", "charfn"};
    CHECK(cfg.resolved().suites == std::vector<std::string>{"traces", "charfn"});
}

TEST_CASE("config validation reports the offending field") {
    auto message_of = [](const std::string& text) {
        try {
            parse_run_config(text).resolved();
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string("(no error)");
    };

    CHECK(message_of(R"({"beta": 1.0})") == "alpha is required");
    CHECK(message_of(R"({"alpha": 0.0, "beta": 1.0})") ==
          "alpha must lie in open interval (0, pi)");
    CHECK(message_of(R"({"alpha": 1.0, "beta": 3.14159265358979324})") ==
          "beta must lie in open interval (0, pi)");
    CHECK(message_of(R"({"alpha": 1.0, "beta": 1.0, "N_eigen": 0})") ==
          "N_eigen must be at least 1");
    CHECK(message_of(R"({"alpha": 1.0, "beta": 1.0, "N_eigen": 2.5})") ==
          "N_eigen: expected an integer");
    CHECK(message_of(R"({"alpha": 1.0, "beta": 1.0, "frobnicate": 3})") ==
          "unknown config field \"frobnicate\"");
    CHECK(message_of(R"({"alpha": 1.0, "beta": 1.0, "suites": []})") ==
          "suites must not be empty");
    CHECK(message_of(R"({"alpha": 1.0, "beta": 1.0, "suites": ["spectra"]})") ==
          "suites[0]: unknown suite \"spectra\"");
    CHECK(message_of(R"({"alpha": 1.0, "beta": 1.0, "output": {"format": "xml"}})") ==
          "output.format must be \"json\" or \"csv\"");
    CHECK(message_of(
              R"({"alpha": 1.0, "beta": 1.0, "tolerances": {"glk.diag": 0.1}})") ==
          "tolerances.glk.diag: unknown residual name");
    CHECK(message_of(R"({"alpha": 1.0, "beta": 1.0, "N_eigen": 50, "K": 50})") ==
          "K needs K+1 <= N_eigen computed eigenvalues");
    CHECK(message_of(R"({"alpha": 1.0, "beta": 1.0, "N_eigen": 50, "N_modes": 60})") ==
          "N_modes must lie in [1, N_eigen]");
    CHECK(message_of(R"({"alpha": 1.0, "beta": 1.0,
                         "potential": {"kind": "gaussian"}})") ==
          "potential.kind: unknown kind \"gaussian\"");
    CHECK(message_of(R"(not json)").substr(0, 24) == "config is not valid JSON");

    // expression errors surface at parse time with the field prefix
    const std::string bad_expr =
        message_of(R"({"alpha": 1.0, "beta": 1.0, "potential": "sin(x"})");
    CHECK(bad_expr.substr(0, 10) == "potential:");
}

TEST_CASE("potential specs build evaluable potentials") {
    RunConfig cfg = parse_run_config(R"json({"alpha": 1.0, "beta": 1.0,
                                             "potential": "sin(x)"})json");
    CHECK(cfg.potential.kind == "expression");
    CHECK(cfg.potential.build()(kPi / 2) == doctest::Approx(1.0).epsilon(1e-14));

    cfg = parse_run_config(R"({"alpha": 1.0, "beta": 1.0,
                               "potential": {"kind": "constant", "value": 2.5}})");
    CHECK(cfg.potential.build()(0.3) == 2.5);

    cfg = parse_run_config(
        R"({"alpha": 1.0, "beta": 1.0,
            "potential": {"kind": "polynomial", "coeffs": [1.0, 0.0, 1.0]}})");
    CHECK(cfg.potential.build()(2.0) == doctest::Approx(5.0).epsilon(1e-14));

    cfg = parse_run_config(
        R"({"alpha": 1.0, "beta": 1.0,
            "potential": {"kind": "sampled",
                          "xs": [0.0, 1.5707963267948966, 3.1415926535897932],
                          "ys": [0.0, 1.0, 0.0]}})");
    CHECK(cfg.potential.build()(kPi / 4) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("trivial run passes every suite with residuals near zero") {
    const RunReport& r = trivial_report();
    CHECK(r.config_error.empty());
    CHECK(r.all_pass());
    CHECK(r.suites.size() == 5);
    for (const auto& s : r.suites) {
        CHECK_FALSE(s.failed);
        for (const auto& row : s.rows)
            if (!row.informational) {
                INFO(row.name);
                CHECK(row.pass);
            }
    }
    // identity case: checked residuals are tiny, not merely under tolerance
    for (const char* name : {"traces.left", "traces.right", "glk.diagonal",
                             "glk.boundary", "charfn.product", "charfn.recovery"}) {
        const ResidualRow* row = find_row(r, name);
        REQUIRE(row != nullptr);
        CHECK(row->value < 1e-6);
    }
    CHECK(r.eigen_table.size() == 10);
    CHECK(r.eigen_table[3].mu == doctest::Approx(9.0).epsilon(1e-9));
    CHECK(r.eigen_table[3].have_norming);
    CHECK(r.eigen_table[3].c == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("suite filter runs only what was asked for") {
    RunConfig cfg = parse_run_config(trivial_text());
    cfg.suites = {"traces"};
    RunReport r = run(cfg);
    REQUIRE(r.suites.size() == 1);
    CHECK(r.suites[0].name == "traces");
    CHECK(r.all_pass());
    // norming ran as a dependency, so the table still carries its columns
    REQUIRE(r.eigen_table.size() == 10);
    CHECK(r.eigen_table[0].have_norming);
}

TEST_CASE("tolerance overrides are applied and can force failure") {
    RunConfig cfg = parse_run_config(trivial_text());
    cfg.suites = {"traces"};
    cfg.tolerances["traces.left"] = 1e-30;
    RunReport r = run(cfg);
    const ResidualRow* row = find_row(r, "traces.left");
    REQUIRE(row != nullptr);
    CHECK(row->tolerance == 1e-30);
    CHECK_FALSE(row->pass);
    CHECK_FALSE(r.all_pass());
    CHECK_FALSE(r.suites[0].failed); // exceeded tolerance, not a solver error
}

TEST_CASE("a failing suite is isolated and the others still run") {
    RunConfig cfg = parse_run_config(trivial_text());
    cfg.kernel_dump = "/nonexistent-dir-slnorm/kern.csv";
    RunReport r = run(cfg);
    CHECK_FALSE(r.all_pass());
    for (const auto& s : r.suites) {
        if (s.name == "glk") {
            CHECK(s.failed);
            CHECK(s.error.find("kernel dump") != std::string::npos);
            // rows computed before the dump attempt are retained
            CHECK(s.rows.size() >= 4);
        } else {
            CHECK_FALSE(s.failed);
            CHECK(s.pass());
        }
    }
}

TEST_CASE("invalid config yields a report with config_error") {
    RunConfig cfg = parse_run_config(trivial_text());
    cfg.N_modes = 50; // larger than N_eigen = 10
    RunReport r = run(cfg);
    CHECK(r.config_error == "N_modes must lie in [1, N_eigen]");
    CHECK(r.suites.empty());
    CHECK_FALSE(r.all_pass());
}

TEST_CASE("reports serialize deterministically") {
    RunConfig cfg = parse_run_config(trivial_text());
    cfg.suites = {"spectrum", "traces"};
    RunReport r1 = run(cfg);
    RunReport r2 = run(cfg);
    const std::string j1 = report_to_json(r1);
    CHECK(j1 == report_to_json(r2));
    CHECK(j1.find("wall_seconds") == std::string::npos);
    CHECK(report_to_json(r1, true).find("wall_seconds") != std::string::npos);

    // the emitted text is well-formed JSON with the expected shape
    auto parsed = nlohmann::json::parse(j1);
    CHECK(parsed.at("all_pass").get<bool>());
    CHECK(parsed.at("config").at("N_eigen").get<int>() == 10);
    CHECK(parsed.at("suites").size() == 2);
    CHECK(parsed.at("eigen_table").size() == 10);
    // informational rows carry null tolerance/pass
    bool saw_info = false;
    for (const auto& s : parsed.at("suites"))
        for (const auto& row : s.at("rows"))
            if (row.at("tolerance").is_null()) {
                saw_info = true;
                CHECK(row.at("pass").is_null());
            }
    CHECK(saw_info);

    const std::string csv = report_to_csv(r1);
    CHECK(csv.find("# config\n") != std::string::npos);
    CHECK(csv.find("# suites\n") != std::string::npos);
    CHECK(csv.find("# eigen_table\n") != std::string::npos);
    CHECK(csv.find("all_pass,true") != std::string::npos);
    CHECK(csv.find("\"{\"\"kind\"\":\"\"zero\"\"}\"") != std::string::npos);
}

TEST_CASE("sweep isolates bad values and keeps going") {
    RunConfig base = parse_run_config(trivial_text());
    base.suites = {"traces"};

    std::vector<double> alphas = {kPi / 3, 4.0, kPi / 2};
    auto reports = sweep(base, "alpha", alphas);
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].all_pass());
    CHECK(reports[1].config_error == "alpha must lie in open interval (0, pi)");
    CHECK(reports[2].all_pass());

    auto none = sweep(base, "alpha", {});
    CHECK(none.empty());

    auto frac = sweep(base, "N_eigen", {7.5});
    REQUIRE(frac.size() == 1);
    CHECK(frac[0].config_error == "N_eigen sweep value must be a nonnegative integer");

    CHECK_THROWS_AS(sweep(base, "gamma", {1.0}), DomainError);
}

TEST_CASE("sweep summary assembles residual trajectories") {
    RunConfig base = parse_run_config(trivial_text());
    base.suites = {"traces"};

    const std::vector<double> counts = {10, 20};
    auto reports = sweep(base, "N_eigen", counts);
    const std::string j = sweep_to_json(reports, "N_eigen", counts);
    auto parsed = nlohmann::json::parse(j);
    CHECK(parsed.at("parameter") == "N_eigen");
    CHECK(parsed.at("reports").size() == 2);
    bool found = false;
    for (const auto& m : parsed.at("summary").at("metrics"))
        if (m.at("name") == "traces.left") {
            found = true;
            CHECK(m.at("values").size() == 2);
            CHECK(m.at("non_increasing_within_noise").is_boolean());
        }
    CHECK(found);

    // for a non-truncation parameter the ladder verdict is null
    auto areports = sweep(base, "alpha", {kPi / 3});
    auto aparsed =
        nlohmann::json::parse(sweep_to_json(areports, "alpha", {kPi / 3}));
    for (const auto& m : aparsed.at("summary").at("metrics"))
        CHECK(m.at("non_increasing_within_noise").is_null());

    const std::string csv = sweep_to_csv(reports, "N_eigen", counts);
    CHECK(csv.find("# sweep\n") != std::string::npos);
    CHECK(csv.find("# results\n") != std::string::npos);
    CHECK(csv.find("# summary\n") != std::string::npos);
}
