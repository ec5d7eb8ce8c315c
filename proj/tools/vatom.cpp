#include "vatom/config.hpp"
#include "vatom/errors.hpp"
#include "vatom/runner.hpp"
#include "vatom/series_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

void summarize(const vatom::RunResult& result, const std::filesystem::path& out) {
    std::cout << "wrote " << result.files.size() + 1 << " files to " << out.string() << "\n";
    for (const auto& [name, a] : result.analysis["analyses"].items()) {
        std::cout << "  " << name << ":";
        if (a.contains("error")) {
            std::cout << " error: " << a["error"].get<std::string>();
        } else {
            for (const char* key : {"d_min", "slope", "r_squared", "top5_mass", "mean_return"}) {
                if (a.contains(key)) std::cout << " " << key << "=" << a[key].dump();
            }
            if (a.contains("exponential_fit") && a["exponential_fit"].contains("r_squared")) {
                std::cout << " exp_fit_r2=" << a["exponential_fit"]["r_squared"].dump();
            }
            if (a.contains("tests")) {
                for (const auto& t : a["tests"]) std::cout << " p" << t["k"].dump() << "=" << t["p_value"].dump();
            }
        }
        std::cout << "\n";
    }
    if (result.partial) std::cout << "warning: resource ceiling reached, series are partial\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Atom-field dynamics and recurrence analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", VATOM_VERSION);

    vatom::RunOptions options;
    std::string out_dir = "out";
    app.add_option("--threads", options.threads, "Worker threads (default: $VATOM_THREADS, else all cores)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--out", out_dir, "Output directory");
    app.add_flag("--paper-scale", options.paper_scale, "Apply the preset's paper-scale lengths");

    auto* run = app.add_subcommand("run", "Run an experiment from a config file or preset name");
    std::string config_arg;
    run->add_option("config", config_arg, "Config file or preset name")->required();

    auto* analyze = app.add_subcommand("analyze", "Analyse an existing series file");
    std::string series_path, analysis_path;
    analyze->add_option("series", series_path, "Binary or CSV series file")->required()->check(CLI::ExistingFile);
    analyze->add_option("analysis", analysis_path, "JSON file with an 'analyses' array")->required()->check(CLI::ExistingFile);

    auto* presets = app.add_subcommand("presets", "Preset configurations");
    presets->require_subcommand(1);
    auto* list = presets->add_subcommand("list", "List preset names");

    CLI11_PARSE(app, argc, argv);
    options.out_dir = out_dir;

    try {
        if (*run) {
            const auto path = vatom::resolve_config(config_arg);
            const auto config = vatom::load_config(path, options.paper_scale);
            summarize(vatom::run_experiment(config, options), options.out_dir);
        } else if (*analyze) {
            std::ifstream in(analysis_path);
            nlohmann::json doc;
            try {
                doc = nlohmann::json::parse(in, nullptr, true, true);
            } catch (const nlohmann::json::parse_error& e) {
                throw vatom::ConfigError("/", analysis_path + ": " + e.what());
            }
            const auto series = vatom::load_series(series_path);
            summarize(vatom::analyze_series(series, vatom::parse_analyses(doc), options), options.out_dir);
        } else if (*list) {
            for (const auto& name : vatom::list_presets()) std::cout << name << "\n";
        }
    } catch (const vatom::ConfigError& e) {
        std::cerr << "config error at " << e.what() << "\n";
        return 2;
    } catch (const vatom::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
