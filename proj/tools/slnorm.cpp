#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "slnorm/cli.hpp"
#include "slnorm/errors.hpp"

namespace {

// "v1,v2,..." -> doubles; empty tokens are skipped so "" means no values.
std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string token = text.substr(pos, comma - pos);
        pos = comma + 1;
        if (token.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(token, &used);
        } catch (const std::exception&) {
            throw slnorm::ParseError("--values: not a number: \"" + token + "\"");
        }
        if (token.find_first_not_of(" \t", used) != std::string::npos)
            throw slnorm::ParseError("--values: not a number: \"" + token + "\"");
        out.push_back(v);
    }
    return out;
}

int write_output(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
        return 0;
    }
    std::ofstream out(path);
    if (!out) {
        std::fprintf(stderr, "error: cannot write output file: %s\n", path.c_str());
        return 2;
    }
    out << text;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"slnorm: spectral verification driver for the Robin "
                 "Sturm-Liouville operator on [0, pi]"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> suite_filter;
    std::string output_override;
    bool quick = false;
    bool timings = false;
    std::string kernel_dump;

    CLI::App* run_cmd =
        app.add_subcommand("run", "execute the configured verification suites");
    run_cmd->add_option("config", config_path, "JSON run config")->required();
    run_cmd->add_option("--suite", suite_filter,
                        "run only the named suite (repeatable)");
    run_cmd->add_option("--output", output_override,
                        "report destination (overrides output.path)");
    run_cmd->add_flag("--quick", quick, "cap N_eigen at 100 for a smoke run");
    run_cmd->add_flag("--timings", timings,
                      "include wall-clock seconds per suite in the report");
    run_cmd->add_option("--dump-kernels", kernel_dump,
                        "write the glk kernel grid as CSV to this path");

    std::string sweep_param;
    std::string sweep_values;

    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "run the config once per value of a single parameter");
    sweep_cmd->add_option("config", config_path, "JSON run config")->required();
    sweep_cmd
        ->add_option("--param", sweep_param,
                     "one of alpha, beta, N_eigen, N_modes, K")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values")
        ->required();
    sweep_cmd->add_option("--suite", suite_filter,
                          "run only the named suite (repeatable)");
    sweep_cmd->add_option("--output", output_override,
                          "report destination (overrides output.path)");
    sweep_cmd->add_flag("--quick", quick, "cap N_eigen at 100 per run");
    sweep_cmd->add_flag("--timings", timings,
                        "include wall-clock seconds per suite in the reports");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    slnorm::RunConfig cfg;
    try {
        cfg = slnorm::parse_run_config_file(config_path);
        if (!suite_filter.empty()) cfg.suites = suite_filter;
        if (!output_override.empty()) cfg.output.path = output_override;
        if (quick) cfg.quick = true;
        if (!kernel_dump.empty()) cfg.kernel_dump = kernel_dump;
        cfg = cfg.resolved();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n\n%s\n", e.what(),
                     app.help().c_str());
        return 2;
    }

    try {
        if (run_cmd->parsed()) {
            const slnorm::RunReport report = slnorm::run(cfg);
            const std::string text = cfg.output.format == "csv"
                                         ? slnorm::report_to_csv(report, timings)
                                         : slnorm::report_to_json(report, timings);
            const int io_status = write_output(text, cfg.output.path);
            if (io_status != 0) return io_status;
            return report.all_pass() ? 0 : 1;
        }

        const std::vector<double> values = parse_values(sweep_values);
        const std::vector<slnorm::RunReport> reports =
            slnorm::sweep(cfg, sweep_param, values);
        const std::string text =
            cfg.output.format == "csv"
                ? slnorm::sweep_to_csv(reports, sweep_param, values, timings)
                : slnorm::sweep_to_json(reports, sweep_param, values, timings);
        const int io_status = write_output(text, cfg.output.path);
        if (io_status != 0) return io_status;
        for (const auto& r : reports)
            if (!r.all_pass()) return 1;
        return 0;
    } catch (const slnorm::Error& e) {
        std::fprintf(stderr, "error: %s\n\n%s\n", e.what(), app.help().c_str());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
