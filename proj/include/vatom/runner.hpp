#pragma once

#include "vatom/config.hpp"
#include "vatom/density.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace vatom {

struct RunOptions {
    std::filesystem::path out_dir = "out";
    int threads = 0;
    /// Recorded in the manifest only; the override is applied by parse_config.
    bool paper_scale = false;
};

struct ManifestEntry {
    std::string path;  ///< relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunResult {
    std::map<std::string, ObservableSeries> series;
    nlohmann::json analysis;
    std::vector<ManifestEntry> files;
    bool partial = false;
    /// Analyses that failed with a recorded error instead of a result.
    int analysis_errors = 0;
    nlohmann::json manifest;
};

/// Generates the configured series, runs the analyses and writes series files
/// (binary, optionally CSV), analysis.json, per-analysis CSVs, gnuplot scripts
/// and manifest.json into `options.out_dir`. Everything except the manifest is
/// byte-identical for a given configuration at any thread count.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Series for one observable of the configured model, no files written.
ObservableSeries generate_series(const ExperimentConfig& config, const std::string& observable, int threads);

/// Runs `analyses` on an existing series; its label is used as the observable
/// name, so specs should leave `observable` at its default.
RunResult analyze_series(const ObservableSeries& series, std::vector<AnalysisSpec> analyses,
                         const RunOptions& options);

/// $VATOM_PRESET_DIR, else the source tree's presets directory.
std::filesystem::path preset_dir();

/// Preset names (file stems), sorted.
std::vector<std::string> list_presets(const std::filesystem::path& dir = preset_dir());

/// An existing file path, else `<preset_dir>/<name>.json`.
std::filesystem::path resolve_config(const std::string& name_or_path);

}  // namespace vatom
