#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "plyap/errors.hpp"
#include "plyap/runner.hpp"
#include "plyap/selftest.hpp"

namespace {

void print_result(const plyap::ExperimentResult& r, const std::filesystem::path& dir) {
    const auto& c = r.analysis.classification;
    std::cout << r.config.id << ": " << plyap::to_string(c.kind);
    if (c.kind == plyap::StabilityClass::unstable) std::cout << " lambda=" << c.exponent;
    if (c.saturation_time) std::cout << " t_b=" << *c.saturation_time;
    if (r.analysis.estimate) std::cout << " estimate=" << r.analysis.estimate->asymptotic_value;
    std::cout << " hash=" << r.hash << " -> " << dir.string() << '\n';
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"P-Lyapunov exponents of classical and quantum dynamics", "plyap"};
    app.set_version_flag("--version", PLYAP_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
    run->add_option("config", config_path, "config file")->required();

    std::string figure_id;
    std::string figure_out = "figures";
    auto* figure = app.add_subcommand("figure", "Regenerate a figure bundle");
    figure->add_option("id", figure_id, "fig1a, fig1b or fig2a")
        ->required()
        ->check(CLI::IsMember(plyap::figure_ids()));
    figure->add_option("--out", figure_out, "output directory")->capture_default_str();

    std::string csv_path, convention, method = "regression", ingest_out;
    double threshold = -1.0;
    std::size_t delta_index = 1;
    std::vector<double> window;
    auto* ingest = app.add_subcommand("ingest", "Analyse an external overlap series (CSV with header t,overlap)");
    ingest->add_option("csv", csv_path, "overlap CSV")->required();
    ingest->add_option("--convention", convention, "amplitude or probability")
        ->required()
        ->check(CLI::IsMember({"amplitude", "probability"}));
    ingest->add_option("--method", method, "regression or pointwise")->check(CLI::IsMember({"regression", "pointwise"}));
    ingest->add_option("--threshold", threshold, "saturation threshold theta");
    ingest->add_option("--delta-index", delta_index, "stencil offset")->check(CLI::PositiveNumber);
    ingest->add_option("--window", window, "fit window t1 t2")->expected(2);
    ingest->add_option("--out", ingest_out, "output directory (default out/<csv stem>)");

    auto* selftest = app.add_subcommand("selftest", "Run the property suites");

    CLI11_PARSE(app, argc, argv);

    std::string context;
    try {
        if (*run) {
            context = config_path;
            const auto config = plyap::load_config(config_path);
            const auto result = plyap::run(config);
            print_result(result, config.output_dir);
        } else if (*figure) {
            context = figure_id;
            const auto out = plyap::run_figure(figure_id, figure_out);
            for (const auto& r : out.results) print_result(r, std::filesystem::path(figure_out) / r.config.output_dir);
            std::cout << "figure: " << out.svg.string() << '\n';
        } else if (*ingest) {
            context = csv_path;
            plyap::EstimatorSettings settings;
            settings.method = plyap::parse_method(method);
            settings.delta_index = delta_index;
            if (window.size() == 2) settings.window = std::pair{window[0], window[1]};
            auto config = plyap::ingest_config(csv_path, plyap::parse_convention(convention), settings, threshold);
            if (!ingest_out.empty()) config.output_dir = ingest_out;
            const auto result = plyap::run(config);
            print_result(result, config.output_dir);
        } else if (*selftest) {
            const int failures = plyap::report_selftest(std::cout);
            std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << '\n';
            return failures == 0 ? 0 : 4;
        }
    } catch (const plyap::Error& e) {
        std::cerr << "plyap: " << context << ": " << e.what() << '\n';
        return plyap::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "plyap: " << context << ": " << e.what() << '\n';
        return 4;
    }
    return 0;
}
