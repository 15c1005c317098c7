#pragma once

#include <map>
#include <string>
#include <vector>

#include "slnorm/charfn.hpp"
#include "slnorm/glk.hpp"

namespace slnorm {

// Potential as written in a config file: either a bare string (shorthand for
// an expression over x) or an object selecting one of the named kinds.  Kept
// alongside the constructed Potential so reports can echo the config form.
struct PotentialSpec {
    std::string kind = "zero"; // zero | constant | polynomial | sampled | expression
    double value = 0.0;                // constant
    std::vector<double> coeffs;        // polynomial
    std::vector<double> xs, ys;        // sampled
    int order = 1;                     // sampled interpolation order
    std::string body;                  // expression

    Potential build() const;
};

struct OutputSpec {
    std::string path;            // empty: write to stdout
    std::string format = "json"; // json | csv
};

// One batch run: which operator, how deep to truncate, which verification
// suites to execute, and where the report goes.  N_modes, M and K may be
// left at 0 in the file; resolved() derives them from N_eigen (N_modes =
// min(400, N_eigen), M = N_modes/2, K = min(800, N_eigen - 1)).
struct RunConfig {
    PotentialSpec potential;
    double alpha = 0.0;
    double beta = 0.0;
    int N_eigen = 401;
    int N_modes = 0;
    int M = 0;
    int K = 0;
    std::vector<std::string> suites; // subset of the five module suites
    std::map<std::string, double> tolerances; // per-row overrides
    OutputSpec output;
    long long seed = 0; // echoed; reserved for randomized spot checks
    bool quick = false; // cap N_eigen at 100 (smoke mode)
    std::string kernel_dump; // optional CSV path for the glk kernels

    // Defaults filled in, quick caps applied, cross-field constraints
    // checked.  Throws ParseError with the offending field path.
    RunConfig resolved() const;
};

// Parse a JSON config.  Unknown fields, wrong types and out-of-range values
// raise ParseError whose message starts with the field path.
RunConfig parse_run_config(const std::string& json_text);
RunConfig parse_run_config_file(const std::string& path);

// One verified quantity inside a suite.  Informational rows (extrapolated
// series values and the like) carry no tolerance and never fail.
struct ResidualRow {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    bool informational = false;
};

struct SuiteResult {
    std::string name;
    bool failed = false; // a solver error aborted the suite
    std::string error;
    std::vector<ResidualRow> rows;
    double wall_seconds = 0.0;

    bool pass() const;
};

struct EigenTableRow {
    int n = 0;
    double mu = 0.0;
    double phi_dot = 0.0;
    bool have_norming = false;
    double a_tilde = 0.0;
    double b_tilde = 0.0;
    double c = 0.0;
};

struct RunReport {
    RunConfig config;             // resolved form, echoed for reproducibility
    std::string config_error;     // nonempty: the run never started
    std::vector<SuiteResult> suites;
    std::vector<EigenTableRow> eigen_table;

    bool all_pass() const;
};

// Execute the selected suites in dependency order (spectrum -> norming ->
// {traces, glk, charfn}).  A suite that throws is marked failed with its
// diagnostic and the remaining suites still run; rows gathered before the
// error are kept.
RunReport run(const RunConfig& config);

// Independent runs with one field swept over the given values.  parameter is
// one of alpha, beta, N_eigen, N_modes, K.  A value that produces an invalid
// config yields a report with config_error set; the sweep continues.
std::vector<RunReport> sweep(const RunConfig& base, const std::string& parameter,
                             const std::vector<double>& values, int workers = 0);

// Serializers.  Deterministic: fixed key order, floats at 17 significant
// digits.  Wall-clock fields are emitted only when with_timings is set so
// that the default artifact is byte-identical across runs.
std::string report_to_json(const RunReport& report, bool with_timings = false);
std::string report_to_csv(const RunReport& report, bool with_timings = false);
std::string sweep_to_json(const std::vector<RunReport>& reports,
                          const std::string& parameter,
                          const std::vector<double>& values,
                          bool with_timings = false);
std::string sweep_to_csv(const std::vector<RunReport>& reports,
                         const std::string& parameter,
                         const std::vector<double>& values,
                         bool with_timings = false);

} // namespace slnorm
