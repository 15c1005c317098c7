#include "slnorm/cli.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include "json.hpp"

#include "slnorm/detail/format.hpp"
#include "slnorm/detail/parallel.hpp"
#include "slnorm/errors.hpp"

namespace slnorm {

namespace {

using njson = nlohmann::json;

constexpr std::array<const char*, 5> kSuiteOrder = {"spectrum", "norming", "traces",
                                                    "glk", "charfn"};

constexpr std::array<const char*, 15> kKnownRows = {
    "spectrum.ordering_violations",
    "spectrum.tail_drift_ok",
    "spectrum.reflection",
    "norming.derivative_identity",
    "norming.chain_closure",
    "norming.tilde_drift_ok",
    "traces.left",
    "traces.right",
    "glk.diagonal",
    "glk.boundary",
    "glk.conditioning",
    "glk.transmutation",
    "charfn.product",
    "charfn.recovery",
    "charfn.series",
};

bool known_suite(const std::string& name) {
    return std::find(kSuiteOrder.begin(), kSuiteOrder.end(), name) != kSuiteOrder.end();
}

// ---------------------------------------------------------------- parsing

double get_number(const njson& j, const std::string& path) {
    if (!j.is_number())
        throw ParseError(path + ": expected a number");
    return j.get<double>();
}

long long get_integer(const njson& j, const std::string& path) {
    if (!j.is_number_integer())
        throw ParseError(path + ": expected an integer");
    return j.get<long long>();
}

int get_count(const njson& j, const std::string& path) {
    const long long v = get_integer(j, path);
    if (v < 0 || v > 1'000'000)
        throw ParseError(path + ": out of range");
    return static_cast<int>(v);
}

std::string get_string(const njson& j, const std::string& path) {
    if (!j.is_string())
        throw ParseError(path + ": expected a string");
    return j.get<std::string>();
}

bool get_boolean(const njson& j, const std::string& path) {
    if (!j.is_boolean())
        throw ParseError(path + ": expected a boolean");
    return j.get<bool>();
}

std::vector<double> get_number_array(const njson& j, const std::string& path) {
    if (!j.is_array())
        throw ParseError(path + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

PotentialSpec parse_potential(const njson& j) {
    PotentialSpec spec;
    if (j.is_string()) {
        spec.kind = "expression";
        spec.body = j.get<std::string>();
        return spec;
    }
    if (!j.is_object())
        throw ParseError("potential: expected a string or an object with a \"kind\"");
    for (const auto& item : j.items()) {
        const std::string& k = item.key();
        if (k != "kind" && k != "value" && k != "coeffs" && k != "xs" && k != "ys" &&
            k != "order" && k != "body")
            throw ParseError("potential: unknown field \"" + k + "\"");
    }
    if (!j.contains("kind"))
        throw ParseError("potential.kind is required");
    spec.kind = get_string(j.at("kind"), "potential.kind");
    if (spec.kind == "zero") {
        // nothing else
    } else if (spec.kind == "constant") {
        if (!j.contains("value"))
            throw ParseError("potential.value is required for kind \"constant\"");
        spec.value = get_number(j.at("value"), "potential.value");
    } else if (spec.kind == "polynomial") {
        if (!j.contains("coeffs"))
            throw ParseError("potential.coeffs is required for kind \"polynomial\"");
        spec.coeffs = get_number_array(j.at("coeffs"), "potential.coeffs");
    } else if (spec.kind == "sampled") {
        if (!j.contains("xs") || !j.contains("ys"))
            throw ParseError("potential.xs and potential.ys are required for kind \"sampled\"");
        spec.xs = get_number_array(j.at("xs"), "potential.xs");
        spec.ys = get_number_array(j.at("ys"), "potential.ys");
        if (j.contains("order"))
            spec.order = get_count(j.at("order"), "potential.order");
    } else if (spec.kind == "expression") {
        if (!j.contains("body"))
            throw ParseError("potential.body is required for kind \"expression\"");
        spec.body = get_string(j.at("body"), "potential.body");
    } else {
        throw ParseError("potential.kind: unknown kind \"" + spec.kind + "\"");
    }
    return spec;
}

void check_angle(double v, const char* name) {
    if (!(v > 0.0) || !(v < std::numbers::pi))
        throw ParseError(std::string(name) + " must lie in open interval (0, pi)");
}

// ------------------------------------------------------------- serializing

// Minimal JSON emitter with explicit key order and format_double for every
// float, so identical reports serialize to identical bytes.
class JsonOut {
public:
    void object_open() { separator(); s_ += '{'; stack_.push_back(true); }
    void object_close() { s_ += '}'; stack_.pop_back(); }
    void array_open() { separator(); s_ += '['; stack_.push_back(true); }
    void array_close() { s_ += ']'; stack_.pop_back(); }

    void key(std::string_view k) {
        separator();
        write_string(k);
        s_ += ':';
        pending_value_ = true;
    }

    void value_null() { separator(); s_ += "null"; }
    void value(bool b) { separator(); s_ += b ? "true" : "false"; }
    void value(long long v) { separator(); s_ += std::to_string(v); }
    void value(int v) { value(static_cast<long long>(v)); }
    void value(double v) {
        separator();
        if (std::isfinite(v))
            s_ += detail::format_double(v);
        else
            s_ += "null";
    }
    void value(std::string_view v) { separator(); write_string(v); }

    const std::string& str() const { return s_; }

private:
    void separator() {
        if (pending_value_) {
            pending_value_ = false;
            return;
        }
        if (!stack_.empty()) {
            if (!stack_.back()) s_ += ',';
            stack_.back() = false;
        }
    }

    void write_string(std::string_view v) {
        s_ += '"';
        for (unsigned char c : v) {
            switch (c) {
            case '"': s_ += "\\\""; break;
            case '\\': s_ += "\\\\"; break;
            case '\b': s_ += "\\b"; break;
            case '\f': s_ += "\\f"; break;
            case '\n': s_ += "\\n"; break;
            case '\r': s_ += "\\r"; break;
            case '\t': s_ += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    s_ += buf;
                } else {
                    s_ += static_cast<char>(c);
                }
            }
        }
        s_ += '"';
    }

    std::string s_;
    std::vector<bool> stack_;
    bool pending_value_ = false;
};

void write_potential(JsonOut& o, const PotentialSpec& p) {
    o.object_open();
    o.key("kind");
    o.value(std::string_view(p.kind));
    if (p.kind == "constant") {
        o.key("value");
        o.value(p.value);
    } else if (p.kind == "polynomial") {
        o.key("coeffs");
        o.array_open();
        for (double c : p.coeffs) o.value(c);
        o.array_close();
    } else if (p.kind == "sampled") {
        o.key("xs");
        o.array_open();
        for (double x : p.xs) o.value(x);
        o.array_close();
        o.key("ys");
        o.array_open();
        for (double y : p.ys) o.value(y);
        o.array_close();
        o.key("order");
        o.value(p.order);
    } else if (p.kind == "expression") {
        o.key("body");
        o.value(std::string_view(p.body));
    }
    o.object_close();
}

void write_config(JsonOut& o, const RunConfig& c) {
    o.object_open();
    o.key("potential");
    write_potential(o, c.potential);
    o.key("alpha");
    o.value(c.alpha);
    o.key("beta");
    o.value(c.beta);
    o.key("N_eigen");
    o.value(c.N_eigen);
    o.key("N_modes");
    o.value(c.N_modes);
    o.key("M");
    o.value(c.M);
    o.key("K");
    o.value(c.K);
    o.key("suites");
    o.array_open();
    for (const auto& s : c.suites) o.value(std::string_view(s));
    o.array_close();
    o.key("tolerances");
    o.object_open();
    for (const auto& [name, tol] : c.tolerances) {
        o.key(name);
        o.value(tol);
    }
    o.object_close();
    o.key("output");
    o.object_open();
    o.key("path");
    o.value(std::string_view(c.output.path));
    o.key("format");
    o.value(std::string_view(c.output.format));
    o.object_close();
    o.key("seed");
    o.value(static_cast<long long>(c.seed));
    o.key("quick");
    o.value(c.quick);
    o.key("kernel_dump");
    o.value(std::string_view(c.kernel_dump));
    o.object_close();
}

void write_report_body(JsonOut& o, const RunReport& r, bool with_timings) {
    o.object_open();
    o.key("config");
    write_config(o, r.config);
    o.key("config_error");
    o.value(std::string_view(r.config_error));
    o.key("suites");
    o.array_open();
    for (const auto& s : r.suites) {
        o.object_open();
        o.key("name");
        o.value(std::string_view(s.name));
        o.key("failed");
        o.value(s.failed);
        o.key("error");
        o.value(std::string_view(s.error));
        o.key("rows");
        o.array_open();
        for (const auto& row : s.rows) {
            o.object_open();
            o.key("name");
            o.value(std::string_view(row.name));
            o.key("value");
            o.value(row.value);
            o.key("tolerance");
            if (row.informational)
                o.value_null();
            else
                o.value(row.tolerance);
            o.key("pass");
            if (row.informational)
                o.value_null();
            else
                o.value(row.pass);
            o.object_close();
        }
        o.array_close();
        if (with_timings) {
            o.key("wall_seconds");
            o.value(s.wall_seconds);
        }
        o.object_close();
    }
    o.array_close();
    o.key("eigen_table");
    o.array_open();
    for (const auto& row : r.eigen_table) {
        o.object_open();
        o.key("n");
        o.value(row.n);
        o.key("mu");
        o.value(row.mu);
        o.key("phi_dot");
        o.value(row.phi_dot);
        o.key("a_tilde");
        if (row.have_norming)
            o.value(row.a_tilde);
        else
            o.value_null();
        o.key("b_tilde");
        if (row.have_norming)
            o.value(row.b_tilde);
        else
            o.value_null();
        o.key("c");
        if (row.have_norming)
            o.value(row.c);
        else
            o.value_null();
        o.object_close();
    }
    o.array_close();
    o.key("all_pass");
    o.value(r.all_pass());
    o.object_close();
}

// CSV escaping: quote when the field contains a comma, quote or newline.
std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n\r") == std::string::npos)
        return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string potential_echo_compact(const PotentialSpec& p) {
    JsonOut o;
    write_potential(o, p);
    return o.str();
}

void write_config_csv(std::string& out, const RunConfig& c) {
    out += "# config\nkey,value\n";
    out += "potential," + csv_field(potential_echo_compact(c.potential)) + "\n";
    out += "alpha," + detail::format_double(c.alpha) + "\n";
    out += "beta," + detail::format_double(c.beta) + "\n";
    out += "N_eigen," + std::to_string(c.N_eigen) + "\n";
    out += "N_modes," + std::to_string(c.N_modes) + "\n";
    out += "M," + std::to_string(c.M) + "\n";
    out += "K," + std::to_string(c.K) + "\n";
    std::string suites;
    for (const auto& s : c.suites) {
        if (!suites.empty()) suites += ' ';
        suites += s;
    }
    out += "suites," + csv_field(suites) + "\n";
    std::string tols;
    for (const auto& [name, tol] : c.tolerances) {
        if (!tols.empty()) tols += ' ';
        tols += name + "=" + detail::format_double(tol);
    }
    out += "tolerances," + csv_field(tols) + "\n";
    out += "output.path," + csv_field(c.output.path) + "\n";
    out += "output.format," + c.output.format + "\n";
    out += "seed," + std::to_string(c.seed) + "\n";
    out += std::string("quick,") + (c.quick ? "true" : "false") + "\n";
    out += "kernel_dump," + csv_field(c.kernel_dump) + "\n";
}

void write_suites_csv(std::string& out, const RunReport& r, bool with_timings,
                      const std::string& lead_col, const std::string& lead_val) {
    for (const auto& s : r.suites) {
        for (const auto& row : s.rows) {
            if (!lead_col.empty()) out += csv_field(lead_val) + ",";
            out += s.name + "," + row.name + "," + detail::format_double(row.value) + ",";
            if (!row.informational)
                out += detail::format_double(row.tolerance) + "," +
                       (row.pass ? "true" : "false");
            else
                out += ",";
            if (with_timings) out += "," + detail::format_double(s.wall_seconds);
            out += "\n";
        }
        if (s.failed) {
            if (!lead_col.empty()) out += csv_field(lead_val) + ",";
            out += s.name + ",error," + csv_field(s.error) + ",,";
            if (with_timings) out += ",";
            out += "\n";
        }
    }
}

// ------------------------------------------------------------- run helpers

double tolerance_for(const RunConfig& cfg, const std::string& name, double fallback) {
    auto it = cfg.tolerances.find(name);
    return it == cfg.tolerances.end() ? fallback : it->second;
}

void push_row(SuiteResult& s, const RunConfig& cfg, const std::string& name,
              double value, double default_tol) {
    ResidualRow row;
    row.name = name;
    row.value = value;
    row.tolerance = tolerance_for(cfg, name, default_tol);
    row.pass = value <= row.tolerance;
    s.rows.push_back(std::move(row));
}

void push_info(SuiteResult& s, const std::string& name, double value) {
    ResidualRow row;
    row.name = name;
    row.value = value;
    row.informational = true;
    s.rows.push_back(std::move(row));
}

class StageTimer {
public:
    StageTimer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void spectrum_rows(SuiteResult& s, const RunConfig& cfg, const Potential& q,
                   const SpectralData& spectral) {
    int violations = 0;
    for (std::size_t i = 0; i + 1 < spectral.count(); ++i)
        if (!(spectral.records[i + 1].mu > spectral.records[i].mu)) ++violations;
    push_row(s, cfg, "spectrum.ordering_violations", violations, 0.0);
    push_row(s, cfg, "spectrum.tail_drift_ok", spectral.asymptotic_ok ? 0.0 : 1.0, 0.0);
    push_info(s, "spectrum.max_tail_drift", spectral.max_tail_drift);
    const int refl_count = std::min(cfg.N_eigen, 30);
    push_row(s, cfg, "spectrum.reflection",
             verify_reflection_symmetry(q, cfg.alpha, cfg.beta, refl_count), 1e-8);
}

void norming_rows(SuiteResult& s, const RunConfig& cfg, const SpectralData& spectral,
                  const NormingSet& norms) {
    // the derivative identity and multiplier diagnostics are asserted over
    // the low indices, where the variational derivative is accurate
    const std::size_t head_count =
        std::min<std::size_t>(21, std::min(spectral.count(), norms.count()));
    SpectralData head = spectral;
    head.records.resize(head_count);
    NormingSet nh = norms;
    nh.a.resize(head_count);
    nh.b.resize(head_count);
    nh.c.resize(head_count);
    nh.a_tilde.resize(head_count);
    nh.b_tilde.resize(head_count);
    nh.c_deviation.resize(head_count);
    push_row(s, cfg, "norming.derivative_identity",
             verify_norming_derivative_identity(head, nh), 1e-7);
    // b~n c_n^2 sin^2(beta) = a~n sin^2(alpha): the multiplier/norming linkage
    const double sa2 = std::sin(cfg.alpha) * std::sin(cfg.alpha);
    const double sb2 = std::sin(cfg.beta) * std::sin(cfg.beta);
    double closure = 0.0;
    double deviation = 0.0;
    for (std::size_t n = 0; n < head_count; ++n) {
        const double lhs = norms.b_tilde[n] * norms.c[n] * norms.c[n] * sb2;
        const double rhs = norms.a_tilde[n] * sa2;
        closure = std::max(closure, std::abs(lhs - rhs) / rhs);
        deviation = std::max(deviation, norms.c_deviation[n]);
    }
    push_row(s, cfg, "norming.chain_closure", closure, 1e-8);
    // ratio diagnostic only: a sample sitting on an eigenfunction node makes
    // it meaningless, so it never gates
    push_info(s, "norming.multiplier_deviation", deviation);
    push_row(s, cfg, "norming.tilde_drift_ok", norms.tilde_asymptotic_ok ? 0.0 : 1.0,
             0.0);
}

void traces_rows(SuiteResult& s, const RunConfig& cfg, const SpectralData& spectral,
                 const NormingSet& norms) {
    const auto left = series_identity_a(spectral, norms, cfg.alpha);
    push_row(s, cfg, "traces.left", left.residual, left.tolerance);
    push_info(s, "traces.left.extrapolated", left.extrapolated_value);
    const auto right = series_identity_b(spectral, norms, cfg.beta);
    push_row(s, cfg, "traces.right", right.residual, right.tolerance);
    push_info(s, "traces.right.extrapolated", right.extrapolated_value);
}

void glk_rows(SuiteResult& s, const RunConfig& cfg, const Potential& q,
              const SpectralData& spectral, const NormingSet& norms, int workers) {
    KernelGrid grid = build_F(spectral, norms, cfg.M, cfg.N_modes, workers);
    solve_G(grid, workers);

    push_row(s, cfg, "glk.diagonal", verify_diagonal(grid, q, cfg.alpha), 2e-2);

    // boundary identity G(0,0) = -cot(alpha): the residual is pure series
    // truncation, so the pass bound is scaled from the same ladder that the
    // trace series use
    const double cot_alpha = std::cos(cfg.alpha) / std::sin(cfg.alpha);
    std::vector<double> prefix(norms.a_tilde.begin(),
                               norms.a_tilde.begin() + cfg.N_modes);
    const auto ladder = extrapolate_gap_series(prefix, cot_alpha);
    const double width = std::abs(ladder.partial_sum - ladder.sum_half) +
                         std::abs(ladder.tail_estimate);
    push_row(s, cfg, "glk.boundary", std::abs(grid.G_at(0, 0) + cot_alpha),
             std::max(5e-3, 3.0 * width));

    push_row(s, cfg, "glk.conditioning",
             static_cast<double>(grid.ill_conditioned_rows.size()), 0.0);

    double worst = 0.0;
    for (double mu : {1.0, 4.0, 7.3})
        worst = std::max(worst, verify_transmutation(grid, q, cfg.alpha, mu));
    push_row(s, cfg, "glk.transmutation", worst, 2e-2);
    push_info(s, "glk.delta_bar", grid.delta_bar);

    if (!cfg.kernel_dump.empty()) {
        std::ofstream out(cfg.kernel_dump);
        if (!out)
            throw DomainError("cannot open kernel dump path: " + cfg.kernel_dump);
        dump_kernels_csv(grid, out);
    }
}

void charfn_rows(SuiteResult& s, const RunConfig& cfg, const SpectralData& spectral,
                 const NormingSet& norms) {
    const int count = static_cast<int>(spectral.count());
    const int ncount = static_cast<int>(norms.count());
    const int n_max = std::min({5, cfg.K / 2, count - 1, ncount - 1});
    if (n_max < 0)
        throw DomainError("charfn suite needs at least one eigenvalue with norming data");

    double worst_product = 0.0;
    double worst_recovery = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const auto pr = product_phi_dot(spectral, cfg.alpha, cfg.beta, n, cfg.K);
        worst_product = std::max(worst_product, pr.relative_error);
        const double est = recover_b_tilde(spectral, norms, n, cfg.K);
        worst_recovery = std::max(worst_recovery, std::abs(est * norms.b_tilde[n] - 1.0));
    }
    push_row(s, cfg, "charfn.product", worst_product, 2e-3);
    push_row(s, cfg, "charfn.recovery", worst_recovery, 1e-2);

    const int terms = std::min({100, count, ncount, cfg.K / 2 + 1});
    const auto series =
        verify_recovered_series(spectral, norms, cfg.alpha, cfg.beta, terms, cfg.K);
    push_row(s, cfg, "charfn.series", series.residual, 2e-2);
    push_info(s, "charfn.series.extrapolated", series.extrapolated_value);
}

} // namespace

// --------------------------------------------------------------- PotentialSpec

Potential PotentialSpec::build() const {
    if (kind == "zero") return Potential::zero();
    if (kind == "constant") return Potential::constant(value);
    if (kind == "polynomial") return Potential::polynomial(coeffs);
    if (kind == "sampled") return Potential::sampled(xs, ys, order);
    if (kind == "expression") return Potential::expression(body);
    throw ParseError("potential.kind: unknown kind \"" + kind + "\"");
}

// ------------------------------------------------------------------ RunConfig

RunConfig RunConfig::resolved() const {
    RunConfig r = *this;
    check_angle(r.alpha, "alpha");
    check_angle(r.beta, "beta");
    if (r.N_eigen < 1)
        throw ParseError("N_eigen must be at least 1");
    if (r.quick) {
        r.N_eigen = std::min(r.N_eigen, 100);
        if (r.N_modes > r.N_eigen) r.N_modes = 0;
        if (r.K + 1 > r.N_eigen) r.K = 0;
        if (r.M > std::max(1, r.N_eigen / 2)) r.M = 0;
    }
    if (r.N_modes == 0) r.N_modes = std::min(400, r.N_eigen);
    if (r.M == 0) r.M = std::max(1, r.N_modes / 2);
    if (r.K == 0) r.K = std::min(800, r.N_eigen - 1);

    if (r.suites.empty())
        r.suites.assign(kSuiteOrder.begin(), kSuiteOrder.end());
    std::vector<std::string> ordered;
    for (const char* name : kSuiteOrder)
        if (std::find(r.suites.begin(), r.suites.end(), name) != r.suites.end())
            ordered.push_back(name);
    for (const auto& s : r.suites)
        if (!known_suite(s))
            throw ParseError("suites: unknown suite \"" + s + "\"");
    r.suites = std::move(ordered);

    const bool wants_glk =
        std::find(r.suites.begin(), r.suites.end(), "glk") != r.suites.end();
    const bool wants_charfn =
        std::find(r.suites.begin(), r.suites.end(), "charfn") != r.suites.end();
    if (wants_glk) {
        if (r.N_modes < 1 || r.N_modes > r.N_eigen)
            throw ParseError("N_modes must lie in [1, N_eigen]");
        if (r.M < 1)
            throw ParseError("M must be at least 1");
    }
    if (wants_charfn) {
        if (r.K < 1)
            throw ParseError("K must be at least 1");
        if (r.K + 1 > r.N_eigen)
            throw ParseError("K needs K+1 <= N_eigen computed eigenvalues");
    }
    if (r.output.format != "json" && r.output.format != "csv")
        throw ParseError("output.format must be \"json\" or \"csv\"");
    return r;
}

RunConfig parse_run_config(const std::string& json_text) {
    njson j;
    try {
        j = njson::parse(json_text);
    } catch (const njson::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ParseError("config root must be a JSON object");

    static const std::array<const char*, 13> allowed = {
        "potential", "alpha",  "beta",   "N_eigen", "N_modes", "M",     "K",
        "suites",    "tolerances", "output", "seed",    "quick",   "kernel_dump"};
    for (const auto& item : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
                return item.key() == a;
            }) == allowed.end())
            throw ParseError("unknown config field \"" + item.key() + "\"");
    }

    RunConfig cfg;
    if (j.contains("potential")) {
        cfg.potential = parse_potential(j.at("potential"));
        try {
            cfg.potential.build(); // surface expression/grid errors at parse time
        } catch (const Error& e) {
            throw ParseError(std::string("potential: ") + e.what());
        }
    }

    if (!j.contains("alpha"))
        throw ParseError("alpha is required");
    cfg.alpha = get_number(j.at("alpha"), "alpha");
    check_angle(cfg.alpha, "alpha");
    if (!j.contains("beta"))
        throw ParseError("beta is required");
    cfg.beta = get_number(j.at("beta"), "beta");
    check_angle(cfg.beta, "beta");

    if (j.contains("N_eigen")) {
        cfg.N_eigen = get_count(j.at("N_eigen"), "N_eigen");
        if (cfg.N_eigen < 1)
            throw ParseError("N_eigen must be at least 1");
    }
    if (j.contains("N_modes")) cfg.N_modes = get_count(j.at("N_modes"), "N_modes");
    if (j.contains("M")) cfg.M = get_count(j.at("M"), "M");
    if (j.contains("K")) cfg.K = get_count(j.at("K"), "K");

    if (j.contains("suites")) {
        const njson& s = j.at("suites");
        if (!s.is_array())
            throw ParseError("suites: expected an array of suite names");
        if (s.empty())
            throw ParseError("suites must not be empty");
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::string name =
                get_string(s[i], "suites[" + std::to_string(i) + "]");
            if (!known_suite(name))
                throw ParseError("suites[" + std::to_string(i) + "]: unknown suite \"" +
                                 name + "\"");
            cfg.suites.push_back(name);
        }
    }

    if (j.contains("tolerances")) {
        const njson& t = j.at("tolerances");
        if (!t.is_object())
            throw ParseError("tolerances: expected an object of name -> bound");
        for (const auto& item : t.items()) {
            if (std::find_if(kKnownRows.begin(), kKnownRows.end(), [&](const char* r) {
                    return item.key() == r;
                }) == kKnownRows.end())
                throw ParseError("tolerances." + item.key() + ": unknown residual name");
            cfg.tolerances[item.key()] =
                get_number(item.value(), "tolerances." + item.key());
        }
    }

    if (j.contains("output")) {
        const njson& out = j.at("output");
        if (!out.is_object())
            throw ParseError("output: expected an object with path/format");
        for (const auto& item : out.items())
            if (item.key() != "path" && item.key() != "format")
                throw ParseError("output: unknown field \"" + item.key() + "\"");
        if (out.contains("path"))
            cfg.output.path = get_string(out.at("path"), "output.path");
        if (out.contains("format"))
            cfg.output.format = get_string(out.at("format"), "output.format");
        if (cfg.output.format != "json" && cfg.output.format != "csv")
            throw ParseError("output.format must be \"json\" or \"csv\"");
    }

    if (j.contains("seed")) cfg.seed = get_integer(j.at("seed"), "seed");
    if (j.contains("quick")) cfg.quick = get_boolean(j.at("quick"), "quick");
    if (j.contains("kernel_dump"))
        cfg.kernel_dump = get_string(j.at("kernel_dump"), "kernel_dump");
    return cfg;
}

RunConfig parse_run_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot read config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(buffer.str());
}

// ----------------------------------------------------------------- reports

bool SuiteResult::pass() const {
    if (failed) return false;
    for (const auto& row : rows)
        if (!row.informational && !row.pass) return false;
    return true;
}

bool RunReport::all_pass() const {
    if (!config_error.empty()) return false;
    for (const auto& s : suites)
        if (!s.pass()) return false;
    return true;
}

// --------------------------------------------------------------------- run

RunReport run(const RunConfig& config) {
    RunReport report;
    RunConfig cfg;
    try {
        cfg = config.resolved();
    } catch (const std::exception& e) {
        report.config = config;
        report.config_error = e.what();
        return report;
    }
    report.config = cfg;

    const int workers = detail::resolve_workers(0);
    auto enabled = [&](std::string_view name) {
        return std::find(cfg.suites.begin(), cfg.suites.end(), name) !=
               cfg.suites.end();
    };
    auto suite_slot = [&](std::string_view name) -> SuiteResult* {
        for (auto& s : report.suites)
            if (s.name == name) return &s;
        return nullptr;
    };
    for (const auto& name : cfg.suites) {
        SuiteResult s;
        s.name = name;
        report.suites.push_back(std::move(s));
    }

    Potential q = Potential::zero();
    try {
        q = cfg.potential.build();
    } catch (const std::exception& e) {
        for (auto& s : report.suites) {
            s.failed = true;
            s.error = e.what();
        }
        return report;
    }

    // stage 1: spectrum (everything depends on it)
    std::optional<SpectralData> spectral;
    std::string spectral_error;
    {
        StageTimer timer;
        try {
            spectral = find_eigenvalues(q, cfg.alpha, cfg.beta, cfg.N_eigen);
        } catch (const std::exception& e) {
            spectral_error = e.what();
        }
        if (SuiteResult* s = suite_slot("spectrum")) s->wall_seconds += timer.seconds();
    }

    // stage 2: norming (needed by every suite past spectrum)
    const bool need_norms = enabled("norming") || enabled("traces") ||
                            enabled("glk") || enabled("charfn");
    std::optional<NormingSet> norms;
    std::string norming_error;
    if (spectral && need_norms) {
        StageTimer timer;
        try {
            norms = compute_norming(*spectral, OdeOptions{}, workers);
        } catch (const std::exception& e) {
            norming_error = e.what();
        }
        if (SuiteResult* s = suite_slot("norming")) s->wall_seconds += timer.seconds();
    }

    if (spectral) {
        report.eigen_table.reserve(spectral->count());
        for (std::size_t n = 0; n < spectral->count(); ++n) {
            EigenTableRow row;
            row.n = spectral->records[n].n;
            row.mu = spectral->records[n].mu;
            row.phi_dot = spectral->records[n].phi_dot;
            if (norms && n < norms->count()) {
                row.have_norming = true;
                row.a_tilde = norms->a_tilde[n];
                row.b_tilde = norms->b_tilde[n];
                row.c = norms->c[n];
            }
            report.eigen_table.push_back(row);
        }
    }

    auto run_suite = [&](std::string_view name, auto&& body) {
        SuiteResult* s = suite_slot(name);
        if (!s) return;
        if (!spectral) {
            s->failed = true;
            s->error = "spectrum stage failed: " + spectral_error;
            return;
        }
        if (name != "spectrum" && !norms) {
            s->failed = true;
            s->error = "norming stage failed: " + norming_error;
            return;
        }
        StageTimer timer;
        try {
            body(*s);
        } catch (const std::exception& e) {
            s->failed = true;
            s->error = e.what();
        }
        s->wall_seconds += timer.seconds();
    };

    run_suite("spectrum",
              [&](SuiteResult& s) { spectrum_rows(s, cfg, q, *spectral); });
    run_suite("norming",
              [&](SuiteResult& s) { norming_rows(s, cfg, *spectral, *norms); });
    run_suite("traces",
              [&](SuiteResult& s) { traces_rows(s, cfg, *spectral, *norms); });
    run_suite("glk", [&](SuiteResult& s) {
        glk_rows(s, cfg, q, *spectral, *norms, workers);
    });
    run_suite("charfn",
              [&](SuiteResult& s) { charfn_rows(s, cfg, *spectral, *norms); });
    return report;
}

// ------------------------------------------------------------------- sweep

std::vector<RunReport> sweep(const RunConfig& base, const std::string& parameter,
                             const std::vector<double>& values, int workers) {
    static const std::array<const char*, 5> sweepable = {"alpha", "beta", "N_eigen",
                                                         "N_modes", "K"};
    if (std::find_if(sweepable.begin(), sweepable.end(), [&](const char* p) {
            return parameter == p;
        }) == sweepable.end())
        throw DomainError("sweep parameter must be one of alpha, beta, N_eigen, "
                          "N_modes, K");

    std::vector<RunReport> reports(values.size());
    detail::parallel_for(values.size(), detail::resolve_workers(workers),
                         [&](std::size_t i) {
        RunConfig c = base;
        const double v = values[i];
        if (parameter == "alpha") {
            c.alpha = v;
        } else if (parameter == "beta") {
            c.beta = v;
        } else {
            if (!(v == std::floor(v)) || v < 0 || v > 1'000'000) {
                reports[i].config = c;
                reports[i].config_error =
                    parameter + " sweep value must be a nonnegative integer";
                return;
            }
            const int iv = static_cast<int>(v);
            if (parameter == "N_eigen")
                c.N_eigen = iv;
            else if (parameter == "N_modes")
                c.N_modes = iv;
            else
                c.K = iv;
        }
        reports[i] = run(c);
    });
    return reports;
}

// -------------------------------------------------------------- serializers

std::string report_to_json(const RunReport& report, bool with_timings) {
    JsonOut o;
    write_report_body(o, report, with_timings);
    std::string out = o.str();
    out += '\n';
    return out;
}

std::string report_to_csv(const RunReport& report, bool with_timings) {
    std::string out;
    write_config_csv(out, report.config);
    out += "\n# suites\nsuite,row,value,tolerance,pass";
    if (with_timings) out += ",wall_seconds";
    out += "\n";
    write_suites_csv(out, report, with_timings, "", "");
    out += "\n# eigen_table\nn,mu,phi_dot,a_tilde,b_tilde,c\n";
    for (const auto& row : report.eigen_table) {
        out += std::to_string(row.n) + "," + detail::format_double(row.mu) + "," +
               detail::format_double(row.phi_dot) + ",";
        if (row.have_norming)
            out += detail::format_double(row.a_tilde) + "," +
                   detail::format_double(row.b_tilde) + "," +
                   detail::format_double(row.c);
        else
            out += ",,";
        out += "\n";
    }
    out += "\n# summary\nconfig_error," + csv_field(report.config_error) + "\n";
    out += std::string("all_pass,") + (report.all_pass() ? "true" : "false") + "\n";
    return out;
}

namespace {

// Residual trajectories across the sweep, in first-seen row order.
struct SweepMetric {
    std::string name;
    std::vector<double> values; // NaN where a run lacks the row
    bool informational = false;
};

std::vector<SweepMetric> collect_metrics(const std::vector<RunReport>& reports) {
    std::vector<SweepMetric> metrics;
    auto slot = [&](const std::string& name, bool info) -> SweepMetric& {
        for (auto& m : metrics)
            if (m.name == name) return m;
        SweepMetric m;
        m.name = name;
        m.informational = info;
        m.values.assign(reports.size(), std::nan(""));
        metrics.push_back(std::move(m));
        return metrics.back();
    };
    for (std::size_t i = 0; i < reports.size(); ++i)
        for (const auto& s : reports[i].suites)
            for (const auto& row : s.rows)
                slot(row.name, row.informational).values[i] = row.value;
    return metrics;
}

// Non-increasing within 20% noise; false when any run lacks the metric.
bool ladder_ok(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::isnan(values[i])) return false;
        if (i > 0 && values[i] > 1.2 * values[i - 1]) return false;
    }
    return true;
}

bool truncation_parameter(const std::string& parameter) {
    return parameter == "N_eigen" || parameter == "N_modes" || parameter == "K";
}

} // namespace

std::string sweep_to_json(const std::vector<RunReport>& reports,
                          const std::string& parameter,
                          const std::vector<double>& values, bool with_timings) {
    JsonOut o;
    o.object_open();
    o.key("parameter");
    o.value(std::string_view(parameter));
    o.key("values");
    o.array_open();
    for (double v : values) o.value(v);
    o.array_close();
    o.key("reports");
    o.array_open();
    for (const auto& r : reports) write_report_body(o, r, with_timings);
    o.array_close();
    o.key("summary");
    o.object_open();
    o.key("metrics");
    o.array_open();
    for (const auto& m : collect_metrics(reports)) {
        o.object_open();
        o.key("name");
        o.value(std::string_view(m.name));
        o.key("values");
        o.array_open();
        for (double v : m.values) o.value(v); // NaN serializes as null
        o.array_close();
        o.key("non_increasing_within_noise");
        if (truncation_parameter(parameter) && !m.informational)
            o.value(ladder_ok(m.values));
        else
            o.value_null();
        o.object_close();
    }
    o.array_close();
    bool all = true;
    for (const auto& r : reports) all = all && r.all_pass();
    o.key("all_pass");
    o.value(all);
    o.object_close(); // summary
    o.object_close(); // root
    std::string out = o.str();
    out += '\n';
    return out;
}

std::string sweep_to_csv(const std::vector<RunReport>& reports,
                         const std::string& parameter,
                         const std::vector<double>& values, bool with_timings) {
    std::string out;
    out += "# sweep\nparameter," + parameter + "\n";
    std::string vals;
    for (double v : values) {
        if (!vals.empty()) vals += ' ';
        vals += detail::format_double(v);
    }
    out += "values," + csv_field(vals) + "\n";
    out += "\n# runs\n" + parameter + ",suite,row,value,tolerance,pass";
    if (with_timings) out += ",wall_seconds";
    out += "\n";
    for (std::size_t i = 0; i < reports.size(); ++i)
        write_suites_csv(out, reports[i], with_timings, parameter,
                         detail::format_double(values[i]));
    out += "\n# results\n" + parameter + ",all_pass,config_error\n";
    for (std::size_t i = 0; i < reports.size(); ++i)
        out += detail::format_double(values[i]) + "," +
               (reports[i].all_pass() ? "true" : "false") + "," +
               csv_field(reports[i].config_error) + "\n";
    out += "\n# summary\nrow,non_increasing_within_noise\n";
    for (const auto& m : collect_metrics(reports)) {
        out += m.name + ",";
        if (truncation_parameter(parameter) && !m.informational)
            out += ladder_ok(m.values) ? "true" : "false";
        out += "\n";
    }
    return out;
}

} // namespace slnorm
