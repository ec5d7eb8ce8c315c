#include "vatom/runner.hpp"

#include "vatom/ergodicity.hpp"
#include "vatom/errors.hpp"
#include "vatom/observables.hpp"
#include "vatom/ode_oracle.hpp"
#include "vatom/parallel.hpp"
#include "vatom/series_io.hpp"
#include "vatom/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace vatom {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec || !std::filesystem::is_directory(dir_)) {
            throw InvalidInput("cannot create output directory " + dir_.string());
        }
    }

    std::filesystem::path path(const std::string& name) const { return dir_ / name; }

    void text(const std::string& name, const std::string& content) {
        std::ofstream out(path(name), std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInput("cannot write " + path(name).string());
        out << content;
        out.close();
        record(name);
    }

    void record(const std::string& name) {
        ManifestEntry e;
        e.path = name;
        e.sha256 = sha256_file(path(name));
        e.bytes = std::filesystem::file_size(path(name));
        files_.push_back(std::move(e));
    }

    std::vector<ManifestEntry>& files() { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<ManifestEntry> files_;
};

std::string quoted(const std::string& s) { return "'" + s + "'"; }

std::string gnuplot_header(const std::string& stem, const std::string& title) {
    return "set terminal pngcairo size 900,600\n"
           "set output " + quoted(stem + ".png") + "\n"
           "set datafile separator ','\n"
           "set key autotitle columnhead\n"
           "set title " + quoted(title) + " noenhanced\n";
}

std::string csv_row(std::initializer_list<double> values) {
    std::string row;
    for (double v : values) {
        if (!row.empty()) row += ',';
        row += format_double(v);
    }
    return row + '\n';
}

double median(std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

std::string describe_kerr(const ExperimentConfig& c, int cutoff) {
    return "kerr chi=" + format_double(c.kerr_chi) + " cutoff=" + std::to_string(cutoff);
}

TimeGrid time_grid(const ExperimentConfig& c) { return {c.grid.t0, c.grid.dt, c.grid.points}; }

std::size_t capped_points(const ExperimentConfig& c, bool& partial) {
    partial = false;
    if (c.max_points == 0 || c.grid.points <= c.max_points) return c.grid.points;
    if (!c.allow_partial) {
        throw ResourceError("series of " + std::to_string(c.grid.points) + " points exceeds the ceiling of " +
                            std::to_string(c.max_points));
    }
    partial = true;
    return c.max_points;
}

struct AnalysisContext {
    OutputDir& out;
    int threads;
    std::map<std::string, EmbeddingReport> fnn_by_observable;
};

json run_one(const AnalysisSpec& spec, const ObservableSeries& s, AnalysisContext& ctx) {
    json r;
    r["type"] = spec.type;
    r["observable"] = spec.observable;
    const std::string csv = spec.name + ".csv";
    const std::string gp = spec.name + ".gp";
    const std::string title = spec.type + " of " + s.label;

    if (spec.type == "return_map") {
        auto pairs = return_map(s.values, spec.lag);
        if (spec.max_pairs > 0 && pairs.size() > spec.max_pairs) pairs.resize(spec.max_pairs);
        std::string body = "x,y\n";
        for (const auto& [x, y] : pairs) body += csv_row({x, y});
        ctx.out.text(csv, body);
        ctx.out.text(gp, gnuplot_header(spec.name, title) + "set xlabel 'x(t)'\nset ylabel 'x(t+lag)'\n"
                                "plot " + quoted(csv) + " using 1:2 with dots notitle\n");
        r["lag"] = spec.lag;
        r["pairs"] = pairs.size();
        r["data"] = csv;
    } else if (spec.type == "first_return") {
        const CellSequence cells = coarse_grain(s.values, spec.cells);
        const int target = spec.target_cell ? *spec.target_cell : default_target_cell(cells);
        const RecurrenceStats stats = first_return_distribution(cells, target, spec.convention);
        const auto p = stats.normalized();
        std::string body = "tau,count,probability\n";
        for (std::size_t tau = 1; tau < stats.histogram.size(); ++tau) {
            if (stats.histogram[tau] == 0) continue;
            body += std::to_string(tau) + "," + std::to_string(stats.histogram[tau]) + "," + format_double(p[tau]) + "\n";
        }
        ctx.out.text(csv, body);
        ctx.out.text(gp, gnuplot_header(spec.name, title) + "set xlabel 'return time (steps)'\nset ylabel 'phi_1'\n"
                                "plot " + quoted(csv) + " using 1:3 with impulses\n");
        r["cells"] = spec.cells;
        r["target_cell"] = target;
        r["cell"] = {cells.cell_edges[static_cast<std::size_t>(target)],
                     cells.cell_edges[static_cast<std::size_t>(target) + 1]};
        r["measure"] = cells.measures[static_cast<std::size_t>(target)];
        r["returns"] = stats.sample_count;
        r["mean_return"] = stats.mean_return;
        r["top5_mass"] = stats.sample_count ? top_bin_mass(stats, 5) : 0.0;
        const int width = spec.bin_width > 0
                              ? spec.bin_width
                              : std::max(1, static_cast<int>(std::lround(stats.mean_return / 10.0)));
        try {
            const ExponentialFit fit = exponential_tail_fit(stats, width);
            r["exponential_fit"] = {{"rate", fit.rate}, {"r_squared", fit.r_squared}, {"bins", fit.bins},
                                    {"bin_width", fit.bin_width}};
        } catch (const InsufficientData& e) {
            r["exponential_fit"] = {{"error", e.what()}};
        }
        r["data"] = csv;
    } else if (spec.type == "successive_returns") {
        const CellSequence cells = coarse_grain(s.values, spec.cells);
        const int target = spec.target_cell ? *spec.target_cell : default_target_cell(cells);
        std::string body = "k,tau,count\n";
        json tests = json::array();
        for (int k : spec.ks) {
            const RecurrenceStats stats = kth_return_distribution(cells, target, k, spec.convention, true);
            for (std::size_t tau = 1; tau < stats.histogram.size(); ++tau) {
                if (stats.histogram[tau] == 0) continue;
                body += std::to_string(k) + "," + std::to_string(tau) + "," + std::to_string(stats.histogram[tau]) + "\n";
            }
            const ChiSquareResult chi = successive_returns_test(cells, target, k, spec.convention, spec.min_expected);
            tests.push_back({{"k", k}, {"statistic", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value},
                             {"bins", chi.bins}, {"samples", chi.samples}});
        }
        ctx.out.text(csv, body);
        std::string plot = gnuplot_header(spec.name, title) + "set xlabel 'time to k-th return (steps)'\nplot ";
        for (std::size_t i = 0; i < spec.ks.size(); ++i) {
            const std::string k = std::to_string(spec.ks[i]);
            plot += (i ? ", " : "") + quoted(csv) + " using ($1==" + k + "?$2:1/0):3 with impulses title 'k=" + k + "'";
        }
        ctx.out.text(gp, plot + "\n");
        r["cells"] = spec.cells;
        r["target_cell"] = target;
        r["tests"] = tests;
        r["data"] = csv;
    } else if (spec.type == "kac") {
        const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
        const double center = spec.center ? *spec.center : median(s.values);
        const double widest = spec.widest > 0.0 ? spec.widest : 0.25 * (*hi - *lo);
        const auto intervals = nested_cells(center, widest, spec.kac_cells, spec.ratio);
        const KacReport kac = mean_recurrence_vs_measure(s.values, intervals, spec.convention, spec.min_returns);
        std::string body = "inverse_measure,mean_return,measure,returns,lo,hi,dropped\n";
        for (const auto& pt : kac.points) {
            body += format_double(pt.inverse_measure) + "," + format_double(pt.mean_return) + "," +
                    format_double(pt.measure) + "," + std::to_string(pt.returns) + "," + format_double(pt.cell.lo) +
                    "," + format_double(pt.cell.hi) + "," + (pt.dropped ? "1" : "0") + "\n";
        }
        ctx.out.text(csv, body);
        ctx.out.text(gp, gnuplot_header(spec.name, title) + "set xlabel '1/measure'\nset ylabel 'mean return (steps)'\n"
                                "f(x) = " + format_double(kac.slope) + "*x + " + format_double(kac.intercept) + "\n"
                                "plot " + quoted(csv) + " using 1:($7==0?$2:1/0) with points, f(x) title 'fit'\n");
        r["center"] = center;
        r["widest"] = widest;
        r["slope"] = kac.slope;
        r["intercept"] = kac.intercept;
        r["r_squared"] = kac.r_squared;
        r["used"] = kac.used;
        r["data"] = csv;
    } else if (spec.type == "fnn") {
        FnnOptions o = spec.fnn;
        o.threads = ctx.threads;
        const EmbeddingReport e = fnn_embedding_dimension(s.values, o);
        ctx.fnn_by_observable[spec.observable] = e;
        std::string body = "d,fraction\n";
        for (std::size_t d = 0; d < e.fnn_fraction.size(); ++d) body += std::to_string(d + 1) + "," + format_double(e.fnn_fraction[d]) + "\n";
        ctx.out.text(csv, body);
        ctx.out.text(gp, gnuplot_header(spec.name, title) + "set xlabel 'embedding dimension'\nset ylabel 'FNN fraction'\n"
                                "set logscale y\nplot " + quoted(csv) + " using 1:($2>0?$2:1/0) with linespoints\n");
        r["d_min"] = e.d_min;
        r["saturated"] = e.saturated;
        r["delay"] = e.delay;
        r["fractions"] = e.fnn_fraction;
        r["r_tol"] = e.r_tol;
        r["a_tol"] = e.a_tol;
        r["theiler"] = e.theiler;
        r["threshold"] = e.threshold;
        r["data"] = csv;
    } else if (spec.type == "lyapunov") {
        LyapunovOptions o = spec.lyapunov;
        o.threads = ctx.threads;
        o.dt = s.dt;
        const auto fnn = ctx.fnn_by_observable.find(spec.observable);
        if (spec.dim_from_fnn) {
            if (fnn == ctx.fnn_by_observable.end()) {
                throw InvalidInput("dim \"fnn\" needs an earlier fnn analysis of the same series");
            }
            if (fnn->second.saturated) throw InsufficientData("FNN found no embedding dimension");
            o.dim = fnn->second.d_min;
        }
        if (o.delay <= 0) o.delay = fnn != ctx.fnn_by_observable.end() ? fnn->second.delay : default_delay(s.values);
        const LyapunovReport l = rosenstein_mle(s.values, o);
        std::string body = "k,t,mean_log_divergence\n";
        for (std::size_t k = 0; k < l.divergence_curve.size(); ++k) {
            body += std::to_string(k) + "," + format_double(static_cast<double>(k) * s.dt) + "," +
                    format_double(l.divergence_curve[k]) + "\n";
        }
        ctx.out.text(csv, body);
        ctx.out.text(gp, gnuplot_header(spec.name, title) + "set xlabel 't'\nset ylabel '<ln d_j(k)>'\n"
                                "f(x) = " + format_double(l.slope_per_time) + "*x + " + format_double(l.intercept) + "\n"
                                "plot " + quoted(csv) + " using 2:3 with linespoints, f(x) title 'fit'\n");
        r["dim"] = o.dim;
        r["delay"] = o.delay;
        r["theiler"] = l.theiler;
        r["k_max"] = o.k_max;
        r["fit_range"] = {l.fit_lo, l.fit_hi};
        r["slope"] = l.slope;
        r["slope_per_time"] = l.slope_per_time;
        r["intercept"] = l.intercept;
        r["pairs"] = l.pairs;
        r["data"] = csv;
    } else {
        throw InvalidInput("unknown analysis '" + spec.type + "'");
    }
    r["plot"] = gp;
    return r;
}

json run_analyses(const std::vector<AnalysisSpec>& specs, const std::map<std::string, ObservableSeries>& series,
                  AnalysisContext& ctx, json& runtimes, int& errors) {
    json out = json::object();
    for (const auto& spec : specs) {
        const auto start = Clock::now();
        const auto it = series.find(spec.observable);
        if (it == series.end()) throw InvalidInput("no series named '" + spec.observable + "'");
        try {
            out[spec.name] = run_one(spec, it->second, ctx);
        } catch (const InsufficientData& e) {
            out[spec.name] = {{"type", spec.type}, {"observable", spec.observable}, {"error", e.what()}};
            ++errors;
        } catch (const UndefinedQuantity& e) {
            out[spec.name] = {{"type", spec.type}, {"observable", spec.observable}, {"error", e.what()}};
            ++errors;
        }
        runtimes["analysis/" + spec.name] = seconds_since(start);
    }
    return out;
}

void write_series_files(OutputDir& out, const ObservableSeries& s, bool csv) {
    const std::string stem = "series_" + s.label;
    save_series_binary(out.path(stem + ".bin"), s);
    out.record(stem + ".bin");
    if (!csv) return;
    save_series_csv(out.path(stem + ".csv"), s);
    out.record(stem + ".csv");
    out.text(stem + ".gp", gnuplot_header(stem, s.label + ": " + s.origin) + "set xlabel 't'\nset ylabel " +
                               quoted(s.label) + "\nplot " + quoted(stem + ".csv") + " using 1:2 with lines\n");
}

json manifest_json(const std::string& name, const json& config, const std::string& hash, const RunOptions& options,
                   const json& runtimes, const RunResult& result) {
    json files = json::array();
    for (const auto& f : result.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    return {{"name", name},
            {"version", VATOM_VERSION},
            {"config_sha256", hash},
            {"config", config},
            {"paper_scale", options.paper_scale},
            {"threads", resolve_threads(options.threads)},
            {"partial", result.partial},
            {"analysis_errors", result.analysis_errors},
            {"runtimes_seconds", runtimes},
            {"files", files}};
}

void finish(OutputDir& out, RunResult& result, const std::string& name, const json& config, const RunOptions& options,
            json& runtimes, Clock::time_point start) {
    out.text("analysis.json", result.analysis.dump(2) + "\n");
    result.files = out.files();
    runtimes["total"] = seconds_since(start);
    result.manifest = manifest_json(name, config, config_hash(config), options, runtimes, result);
    std::ofstream m(out.path("manifest.json"), std::ios::binary | std::ios::trunc);
    if (!m) throw InvalidInput("cannot write manifest.json");
    m << result.manifest.dump(2) << "\n";
}

}  // namespace

ObservableSeries generate_series(const ExperimentConfig& c, const std::string& observable, int threads) {
    const SeriesOptions options{threads, c.max_points, c.allow_partial};
    switch (c.model) {
        case ModelKind::bipartite: {
            const BipartiteModel model(c.bipartite, c.field.build());
            return series(model, time_grid(c), parse_observable(observable), options);
        }
        case ModelKind::tripartite: {
            const TripartiteModel model(c.tripartite, c.field.build(), c.field2.build());
            return series(model, time_grid(c), parse_observable(observable), options);
        }
        case ModelKind::kerr: {
            const FieldState state = c.field.build();
            ObservableSeries s;
            const std::size_t n = capped_points(c, s.partial);
            s.dt = c.grid.dt;
            s.t0 = c.grid.t0;
            s.label = "fidelity";
            s.origin = describe_kerr(c, state.cutoff());
            s.values.resize(n);
            parallel_for(n, threads, [&](std::size_t i) {
                s.values[i] = fidelity(kerr_evolution(state, c.kerr_chi, s.time(i)), state);
            });
            return s;
        }
        case ModelKind::synthetic: {
            ObservableSeries s;
            const std::size_t n = capped_points(c, s.partial);
            s.dt = c.grid.dt;
            s.t0 = c.grid.t0;
            s.label = "signal";
            const auto& g = c.signal;
            if (g.kind == "logistic") s.values = logistic_map(n, g.x0, g.r, g.discard);
            else if (g.kind == "sinusoid") s.values = sinusoid(n, g.period);
            else if (g.kind == "noisy_sinusoid") s.values = noisy_sinusoid(n, g.period, g.snr, c.seed);
            else if (g.kind == "white_noise") s.values = white_noise(n, c.seed);
            else s.values = uniform_noise(n, c.seed);
            s.origin = "synthetic " + g.kind + " seed=" + std::to_string(c.seed);
            return s;
        }
    }
    throw InvalidInput("unknown model");
}

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const auto start = Clock::now();
    OutputDir out(options.out_dir);
    RunResult result;
    json runtimes = json::object();

    for (const auto& name : config.observables) {
        const auto t = Clock::now();
        ObservableSeries s = generate_series(config, name, options.threads);
        s.label = name;
        runtimes["series/" + name] = seconds_since(t);
        result.partial = result.partial || s.partial;
        write_series_files(out, s, config.write_csv);
        result.series.emplace(name, std::move(s));
    }

    AnalysisContext ctx{out, options.threads, {}};
    result.analysis = {{"name", config.name},
                       {"model", to_string(config.model)},
                       {"partial", result.partial},
                       {"series", json::object()},
                       {"analyses", json::object()}};
    for (const auto& [name, s] : result.series) {
        result.analysis["series"][name] = {{"points", s.size()}, {"dt", s.dt}, {"t0", s.t0}, {"origin", s.origin},
                                           {"partial", s.partial}};
    }
    result.analysis["analyses"] = run_analyses(config.analyses, result.series, ctx, runtimes, result.analysis_errors);
    finish(out, result, config.name, config.effective, options, runtimes, start);
    return result;
}

RunResult analyze_series(const ObservableSeries& series, std::vector<AnalysisSpec> analyses, const RunOptions& options) {
    const auto start = Clock::now();
    OutputDir out(options.out_dir);
    RunResult result;
    json runtimes = json::object();
    const std::string label = series.label.empty() ? "series" : series.label;
    for (auto& a : analyses) {
        if (a.observable == "series") {
            if (a.name == a.type + "_series") a.name = a.type + "_" + label;
            a.observable = label;
        }
    }
    result.series.emplace(label, series);
    result.partial = series.partial;
    AnalysisContext ctx{out, options.threads, {}};
    result.analysis = {{"name", label}, {"partial", series.partial}, {"origin", series.origin},
                       {"points", series.size()}, {"analyses", json::object()}};
    result.analysis["analyses"] = run_analyses(analyses, result.series, ctx, runtimes, result.analysis_errors);
    json config = json::array();
    for (const auto& a : analyses) config.push_back({{"type", a.type}, {"name", a.name}});
    finish(out, result, label, {{"analyze", config}, {"series_sha256", sha256_hex(std::string(
        reinterpret_cast<const char*>(series.values.data()), series.values.size() * sizeof(double)))}},
           options, runtimes, start);
    return result;
}

std::filesystem::path preset_dir() {
    if (const char* env = std::getenv("VATOM_PRESET_DIR"); env && *env) return env;
    return VATOM_PRESET_DIR;
}

std::vector<std::string> list_presets(const std::filesystem::path& dir) {
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
    }
    if (ec) throw InvalidInput("cannot read preset directory " + dir.string());
    std::sort(names.begin(), names.end());
    return names;
}

std::filesystem::path resolve_config(const std::string& name_or_path) {
    const std::filesystem::path p(name_or_path);
    if (std::filesystem::is_regular_file(p)) return p;
    const auto preset = preset_dir() / (name_or_path + ".json");
    if (std::filesystem::is_regular_file(preset)) return preset;
    throw ConfigError("/", "no config file or preset named '" + name_or_path + "'");
}

}  // namespace vatom
