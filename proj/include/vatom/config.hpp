#pragma once

#include "vatom/bipartite.hpp"
#include "vatom/ergodicity.hpp"
#include "vatom/field_states.hpp"
#include "vatom/tripartite.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vatom {

enum class ModelKind { bipartite, tripartite, kerr, synthetic };

const char* to_string(ModelKind kind) noexcept;

/// Initial field: |alpha> with m added photons, truncated at `cutoff` or at
/// the smallest cutoff leaving less than `tail_tol` behind.
struct FieldSpec {
    cplx alpha{};
    int m = 0;
    std::optional<int> cutoff;
    double tail_tol = default_tail_tol;

    FieldState build() const;
};

struct GridSpec {
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t points = 0;
};

/// Calibration signal for the synthetic model.
struct SignalSpec {
    std::string kind = "logistic";  ///< logistic, sinusoid, noisy_sinusoid, white_noise, uniform_noise
    double period = 50.0;
    double snr = 100.0;
    double x0 = 0.3;
    double r = 4.0;
    std::size_t discard = 1000;
};

struct AnalysisSpec {
    std::string type;        ///< return_map, first_return, successive_returns, kac, fnn, lyapunov
    std::string observable;  ///< label of the series it reads
    std::string name;        ///< output stem, unique within a run

    int cells = 40;
    std::optional<int> target_cell;
    ReturnConvention convention = ReturnConvention::exit_required;
    int bin_width = 0;  ///< 0: max(1, round(mean return / 10))
    std::vector<int> ks{2, 3, 4};
    double min_expected = 5.0;

    int lag = 1;
    std::size_t max_pairs = 0;  ///< 0: every pair

    int kac_cells = 8;
    double widest = 0.0;  ///< 0: a quarter of the series range
    double ratio = 0.5;
    std::optional<double> center;  ///< default: series median
    std::uint64_t min_returns = 50;

    FnnOptions fnn;
    LyapunovOptions lyapunov;
    /// Lyapunov embedding taken from an fnn analysis in the same run.
    bool dim_from_fnn = false;
};

struct ExperimentConfig {
    std::string name;
    ModelKind model = ModelKind::bipartite;
    BipartiteParams bipartite;
    TripartiteParams tripartite;
    double kerr_chi = 1.0;
    FieldSpec field;
    FieldSpec field2;
    SignalSpec signal;
    GridSpec grid;
    std::vector<std::string> observables;
    std::vector<AnalysisSpec> analyses;
    std::uint64_t seed = 0;
    std::size_t max_points = 20'000'000;
    bool allow_partial = false;
    /// Text copies of the series next to the binary ones.
    bool write_csv = true;
    /// Effective configuration after any paper-scale override, as parsed.
    nlohmann::json effective;
};

/// Parses a configuration; with `paper_scale` the `paper_scale` object is
/// first merge-patched over the rest. Throws ConfigError with a JSON pointer.
ExperimentConfig parse_config(const nlohmann::json& doc, bool paper_scale = false);
ExperimentConfig load_config(const std::filesystem::path& path, bool paper_scale = false);

/// The `analyses` array of a standalone analysis file.
std::vector<AnalysisSpec> parse_analyses(const nlohmann::json& doc);

/// SHA-256 of the canonical serialisation.
std::string config_hash(const nlohmann::json& effective);

}  // namespace vatom
