#pragma once

// Command-line driver. Four subcommands sit on top of the library:
//
//   scenario <name>                  run a bundled scenario's checks and emit
//                                    the report (JSON by default, CSV opt-in)
//   weakmeas <scenario> <observable> exact pointer density as CSV plus, when
//                                    --samples is set, Monte Carlo draws and a
//                                    weak-value estimate
//   hvt <table>                      verify a measurement-context table, count
//                                    noncontextual assignments, and print a
//                                    parity certificate when one exists
//   list                             names of bundled scenarios and tables
//
// Exit codes are a stable contract for CI: 0 success / all checks pass,
// 1 scenario check failure, 2 usage or input-parse error, 3 numerical
// configuration error (bad grid, zero coupling with sampling requested).
//
// `run_cli` takes argv minus the program name plus explicit output streams so
// tests can drive the full surface in process.

#include <ppsim/contextuality.hpp>
#include <ppsim/scenarios.hpp>
#include <ppsim/weakmeas.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ppsim::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failure = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numerical = 3;

namespace detail {

// Writes `text` to `path`, or to `fallback` when `path` is empty.
inline bool write_text(const std::string& path, const std::string& text, std::ostream& fallback,
                       std::ostream& err) {
    if (path.empty()) {
        fallback << text;
        return true;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        err << "cannot open output file: " << path << "\n";
        return false;
    }
    file << text;
    file.flush();
    if (!file) {
        err << "failed writing output file: " << path << "\n";
        return false;
    }
    return true;
}

inline std::string csv_quote(const std::string& field) {
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

inline std::string report_csv(const ScenarioReport<double>& report) {
    std::ostringstream out;
    out << "kind,target,expected,computed_re,computed_im,error,pass\n";
    for (const auto& e : report.entries) {
        out << e.kind << ',' << csv_quote(e.target) << ','
            << ppsim::detail::csv_number(e.expected) << ','
            << ppsim::detail::csv_number(e.computed.real()) << ','
            << ppsim::detail::csv_number(e.computed.imag()) << ','
            << ppsim::detail::csv_number(e.error) << ',' << (e.pass ? "true" : "false") << '\n';
    }
    return out.str();
}

// "foo.csv" -> "foo.samples.csv"; anything else just gains the suffix.
inline std::string samples_path_for(const std::string& density_path) {
    const std::string suffix = ".csv";
    if (density_path.size() > suffix.size() &&
        density_path.compare(density_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return density_path.substr(0, density_path.size() - suffix.size()) + ".samples.csv";
    }
    return density_path + ".samples.csv";
}

inline int cmd_scenario(const std::string& name, const std::string& format,
                        const std::string& output, std::ostream& out, std::ostream& err) {
    std::optional<Scenario<double>> scenario;
    try {
        scenario.emplace(make_scenario<double>(name));
    } catch (const std::invalid_argument& e) {
        err << e.what() << "\n";
        return exit_usage;
    }
    const auto report = run_scenario(*scenario);
    const std::string text =
        format == "csv" ? report_csv(report) : to_json(report).dump(2) + "\n";
    if (!write_text(output, text, out, err)) {
        return exit_usage;
    }
    if (!output.empty()) {
        out << report.scenario << ": " << (report.overall ? "PASS" : "FAIL") << " ("
            << report.entries.size() << " checks)\n";
    }
    return report.overall ? exit_ok : exit_check_failure;
}

inline int cmd_weakmeas(const std::string& scenario_name, const std::string& observable_name,
                        double lambda, std::int64_t samples, std::uint64_t seed, int grid_points,
                        double grid_halfwidth, const std::string& output, std::ostream& out,
                        std::ostream& err) {
    std::optional<Scenario<double>> scenario;
    try {
        scenario.emplace(make_scenario<double>(scenario_name));
    } catch (const std::invalid_argument& e) {
        err << e.what() << "\n";
        return exit_usage;
    }
    const SpectralObservable<double>* obs = nullptr;
    try {
        obs = &scenario->observable(observable_name);
    } catch (const std::invalid_argument& e) {
        err << e.what() << "\n";
        return exit_usage;
    }

    if (lambda == 0.0 && samples > 0) {
        err << "sampling estimates the weak value as pointer mean / lambda; "
               "--samples requires a nonzero --lambda\n";
        return exit_numerical;
    }
    PointerConfig<double> cfg;
    cfg.lambda = lambda;
    cfg.points = grid_points;
    cfg.half_width = grid_halfwidth;

    std::optional<PointerDistribution<double>> dist;
    try {
        dist.emplace(exact_pointer_distribution(scenario->pps, *obs, cfg));
    } catch (const std::invalid_argument& e) {
        err << e.what() << "\n";
        return exit_numerical;
    }

    {
        std::ostringstream csv;
        write_density_csv(csv, *dist);
        if (!write_text(output, csv.str(), out, err)) {
            return exit_usage;
        }
    }

    nlohmann::json summary = {
        {"scenario", scenario_name},
        {"observable", observable_name},
        {"lambda", lambda},
        {"grid_points", cfg.points},
        {"grid_halfwidth", cfg.half_width},
        {"spread", cfg.spread},
        {"post_selection_probability", dist->post_selection_probability()},
        {"exact_mean", pointer_mean(*dist)},
        {"density_csv", output},
    };
    if (samples > 0) {
        const auto draws = sample_pointer(scenario->pps, *obs, cfg, samples, seed);
        const auto estimate = weak_value_estimate(draws, lambda);
        const auto counts = sample_histogram(*dist, draws);
        const std::string samples_path = samples_path_for(output);
        std::ostringstream csv;
        write_counts_csv(csv, dist->grid(), counts);
        if (!write_text(samples_path, csv.str(), out, err)) {
            return exit_usage;
        }
        summary["samples"] = samples;
        summary["seed"] = seed;
        summary["samples_csv"] = samples_path;
        summary["estimate"] = {{"value", estimate.value},
                               {"standard_error", estimate.standard_error},
                               {"n", estimate.n}};
    }
    out << summary.dump(2) << "\n";
    return exit_ok;
}

inline int cmd_hvt(const std::string& table_spec, const std::string& output, std::ostream& out,
                   std::ostream& err) {
    try {
        const ContextTable<double> table = [&] {
            for (const auto& name : builtin_table_names()) {
                if (table_spec == name) {
                    return builtin_table<double>(name);
                }
            }
            return load_context_table<double>(table_spec);
        }();
        const auto verify = verify_table(table);
        const auto hits = search_assignments(table);
        const auto certificate = parity_obstruction(table);

        std::ostringstream text;
        text << "table: " << table_spec << "\n";
        text << "observables: " << table.observables().size()
             << "  contexts: " << table.contexts().size() << "\n";
        text << "max commutator residual: " << ppsim::detail::csv_number(verify.max_commutator)
             << "\n";
        text << "max product residual: " << ppsim::detail::csv_number(verify.max_product) << "\n";
        const std::uint64_t space = std::uint64_t(1) << table.observables().size();
        text << hits.size() << " assignments / " << space;
        if (certificate) {
            text << "; certificate: " << certificate->size() << " contexts";
        }
        text << "\n";
        constexpr std::size_t max_listed = 16;
        for (std::size_t i = 0; i < hits.size() && i < max_listed; ++i) {
            text << " ";
            for (const auto& obs : table.observables()) {
                const double v = hits[i].values.at(obs.name());
                text << ' ' << obs.name() << '=' << (v > 0 ? "+1" : "-1");
            }
            text << "\n";
        }
        if (hits.size() > max_listed) {
            text << "  ... " << (hits.size() - max_listed) << " more\n";
        }
        if (!write_text(output, text.str(), out, err)) {
            return exit_usage;
        }
        return exit_ok;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return exit_usage;
    }
}

inline int cmd_list(const std::string& format, const std::string& output, std::ostream& out,
                    std::ostream& err) {
    std::string text;
    if (format == "csv") {
        std::ostringstream csv;
        csv << "kind,name\n";
        for (const auto& name : scenario_names()) {
            csv << "scenario," << name << "\n";
        }
        for (const auto& name : builtin_table_names()) {
            csv << "table," << name << "\n";
        }
        text = csv.str();
    } else {
        const nlohmann::json j = {{"scenarios", scenario_names()},
                                  {"tables", builtin_table_names()}};
        text = j.dump(2) + "\n";
    }
    return write_text(output, text, out, err) ? exit_ok : exit_usage;
}

}  // namespace detail

// Parses `args` (argv without the program name) and runs the selected
// subcommand, writing normal output to `out` and diagnostics to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulator for pre- and post-selected quantum systems"};
    app.name("ppsim");
    app.require_subcommand(1);

    std::string scenario_name;
    std::string scenario_format = "json";
    std::string scenario_output;
    auto* sc_scenario = app.add_subcommand("scenario", "Run a bundled scenario's checks");
    sc_scenario->add_option("name", scenario_name, "scenario name (see `ppsim list`)")
        ->required();
    sc_scenario->add_option("--format", scenario_format, "report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    sc_scenario->add_option("--output", scenario_output,
                            "write the report to this file instead of stdout");

    std::string weak_scenario;
    std::string weak_observable;
    double lambda = 0.1;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    PointerConfig<double> defaults;
    int grid_points = defaults.points;
    double grid_halfwidth = defaults.half_width;
    std::string weak_output = "weakmeas.csv";
    auto* sc_weak =
        app.add_subcommand("weakmeas", "Exact pointer density and Monte Carlo weak-value runs");
    sc_weak->add_option("scenario", weak_scenario, "scenario name")->required();
    sc_weak->add_option("observable", weak_observable, "observable name within the scenario")
        ->required();
    sc_weak->add_option("--lambda", lambda, "measurement coupling strength")
        ->capture_default_str();
    sc_weak->add_option("--samples", samples, "Monte Carlo sample count (0 = exact only)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sc_weak->add_option("--seed", seed, "RNG seed for sampling")->capture_default_str();
    sc_weak->add_option("--grid-points", grid_points, "pointer grid size")
        ->capture_default_str();
    sc_weak->add_option("--grid-halfwidth", grid_halfwidth, "pointer grid half-width")
        ->capture_default_str();
    sc_weak->add_option("--output", weak_output, "density CSV path")->capture_default_str();

    std::string table_spec;
    std::string hvt_output;
    auto* sc_hvt = app.add_subcommand(
        "hvt", "Verify a context table and search noncontextual value assignments");
    sc_hvt->add_option("table", table_spec, "built-in table name or path to a table file")
        ->required();
    sc_hvt->add_option("--output", hvt_output, "write the summary to this file");

    std::string list_format = "json";
    std::string list_output;
    auto* sc_list = app.add_subcommand("list", "List bundled scenarios and tables");
    sc_list->add_option("--format", list_format, "listing format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    sc_list->add_option("--output", list_output, "write the listing to this file");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("ppsim");
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    if (sc_scenario->parsed()) {
        return detail::cmd_scenario(scenario_name, scenario_format, scenario_output, out, err);
    }
    if (sc_weak->parsed()) {
        return detail::cmd_weakmeas(weak_scenario, weak_observable, lambda, samples, seed,
                                    grid_points, grid_halfwidth, weak_output, out, err);
    }
    if (sc_hvt->parsed()) {
        return detail::cmd_hvt(table_spec, hvt_output, out, err);
    }
    return detail::cmd_list(list_format, list_output, out, err);
}

}  // namespace ppsim::cli
