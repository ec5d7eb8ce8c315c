#include "vatom/config.hpp"

#include "vatom/errors.hpp"
#include "vatom/series_io.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace vatom {

using nlohmann::json;

namespace {

/// Typed access to one JSON object that remembers which keys were read, so
/// leftovers can be reported as unknown.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    std::string at(const std::string& key) const { return path_ + "/" + key; }

    const json& raw(const std::string& key) {
        if (!has(key)) throw ConfigError(at(key), "required field is missing");
        return j_.at(key);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(at(key), "required field is missing");
        }
        const json& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(at(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(at(key), "must be finite");
        return d;
    }

    double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const double d = number(key, fallback);
        if (!(d > 0.0)) throw ConfigError(at(key), "must be positive");
        return d;
    }

    double non_negative(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const double d = number(key, fallback);
        if (d < 0.0) throw ConfigError(at(key), "must be non-negative");
        return d;
    }

    long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt,
                      long long lo = 0) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(at(key), "required field is missing");
        }
        const json& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
        const long long n = v.get<long long>();
        if (n < lo) throw ConfigError(at(key), "must be at least " + std::to_string(lo));
        return n;
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(at(key), "required field is missing");
        }
        const json& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(at(key), "expected a string");
        return v.get<std::string>();
    }

    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
        return v.get<bool>();
    }

    Node child(const std::string& key) { return Node(raw(key), at(key)); }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError(at(key), "unknown field");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

FieldSpec parse_field(Node node) {
    FieldSpec f;
    const bool has_alpha = node.has("alpha");
    const bool has_alpha2 = node.has("alpha2");
    if (has_alpha == has_alpha2) throw ConfigError(node.at("alpha"), "give exactly one of alpha and alpha2");
    if (has_alpha) {
        const json& a = node.raw("alpha");
        if (a.is_number()) {
            f.alpha = a.get<double>();
        } else if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
            f.alpha = cplx(a[0].get<double>(), a[1].get<double>());
        } else {
            throw ConfigError(node.at("alpha"), "expected a number or [re, im]");
        }
        if (!std::isfinite(f.alpha.real()) || !std::isfinite(f.alpha.imag())) {
            throw ConfigError(node.at("alpha"), "must be finite");
        }
    } else {
        f.alpha = std::sqrt(node.non_negative("alpha2"));
    }
    f.m = static_cast<int>(node.integer("m", 0));
    if (node.has("cutoff")) {
        f.cutoff = static_cast<int>(node.integer("cutoff"));
        if (*f.cutoff < f.m) throw ConfigError(node.at("cutoff"), "must be at least m");
    }
    f.tail_tol = node.positive("tail_tol", default_tail_tol);
    node.finish();
    return f;
}

GridSpec parse_grid(Node node) {
    GridSpec g;
    const double scale = node.text("unit", "time") == "pi" ? M_PI : 1.0;
    if (node.has("unit") && node.text("unit") != "pi" && node.text("unit") != "time") {
        throw ConfigError(node.at("unit"), "expected \"time\" or \"pi\"");
    }
    g.t0 = node.number("t0", 0.0) * scale;
    g.points = static_cast<std::size_t>(node.integer("points", std::nullopt, 1));
    const bool has_dt = node.has("dt");
    const bool has_end = node.has("t_end");
    if (has_dt == has_end) throw ConfigError(node.at("dt"), "give exactly one of dt and t_end");
    if (has_dt) {
        g.dt = node.positive("dt") * scale;
    } else {
        const double end = node.number("t_end") * scale;
        if (g.points < 2 || !(end > g.t0)) throw ConfigError(node.at("t_end"), "needs t_end > t0 and points >= 2");
        g.dt = (end - g.t0) / static_cast<double>(g.points - 1);
    }
    node.finish();
    return g;
}

/// chi and lambda for one mode, from either explicit values or chi_over_lambda.
std::pair<double, double> parse_rates(Node& node, const std::string& chi_key, const std::string& lambda_key) {
    const double lambda = node.has(lambda_key) ? node.non_negative(lambda_key)
                                               : node.non_negative("lambda", 1.0);
    double chi;
    if (node.has(chi_key)) {
        chi = node.non_negative(chi_key);
    } else if (node.has("chi")) {
        chi = node.non_negative("chi");
    } else {
        chi = node.non_negative("chi_over_lambda", 0.0) * lambda;
    }
    return {chi, lambda};
}

ReturnConvention parse_convention(Node& node, ReturnConvention fallback) {
    if (!node.has("convention")) return fallback;
    const std::string c = node.text("convention");
    if (c == "exit_required") return ReturnConvention::exit_required;
    if (c == "every_visit") return ReturnConvention::every_visit;
    throw ConfigError(node.at("convention"), "expected exit_required or every_visit");
}

AnalysisSpec parse_analysis(Node node, const std::string& default_observable) {
    AnalysisSpec a;
    a.type = node.text("type");
    a.observable = node.text("observable", default_observable);
    a.name = node.text("name", a.type + "_" + a.observable);
    if (a.name.empty() || a.name.find_first_of("/\\") != std::string::npos) {
        throw ConfigError(node.at("name"), "must be a plain file stem");
    }

    if (a.type == "return_map") {
        a.lag = static_cast<int>(node.integer("lag", 1, 1));
        a.max_pairs = static_cast<std::size_t>(node.integer("max_pairs", 0));
    } else if (a.type == "first_return" || a.type == "successive_returns") {
        a.cells = static_cast<int>(node.integer("cells", 40, 1));
        if (node.has("target_cell")) a.target_cell = static_cast<int>(node.integer("target_cell"));
        a.convention = parse_convention(node, ReturnConvention::exit_required);
        if (a.type == "first_return") {
            a.bin_width = static_cast<int>(node.integer("bin_width", 0));
        } else {
            a.min_expected = node.positive("min_expected", 5.0);
            if (node.has("k")) {
                const json& ks = node.raw("k");
                if (!ks.is_array() || ks.empty()) throw ConfigError(node.at("k"), "expected a non-empty array");
                a.ks.clear();
                for (const auto& k : ks) {
                    if (!k.is_number_integer() || k.get<int>() < 2) {
                        throw ConfigError(node.at("k"), "entries must be integers >= 2");
                    }
                    a.ks.push_back(k.get<int>());
                }
            }
        }
    } else if (a.type == "kac") {
        a.kac_cells = static_cast<int>(node.integer("cells", 8, 2));
        a.widest = node.non_negative("widest", 0.0);
        a.ratio = node.positive("ratio", 0.5);
        if (!(a.ratio < 1.0)) throw ConfigError(node.at("ratio"), "must be below 1");
        if (node.has("center")) a.center = node.number("center");
        a.convention = parse_convention(node, ReturnConvention::every_visit);
        a.min_returns = static_cast<std::uint64_t>(node.integer("min_returns", 50));
    } else if (a.type == "fnn") {
        a.fnn.delay = static_cast<int>(node.integer("delay", 0));
        a.fnn.d_max = static_cast<int>(node.integer("d_max", 10, 1));
        a.fnn.r_tol = node.positive("r_tol", 10.0);
        a.fnn.a_tol = node.positive("a_tol", 2.0);
        a.fnn.theiler = static_cast<int>(node.integer("theiler", 0));
        a.fnn.threshold = node.positive("threshold", 1e-5);
        a.fnn.max_references = static_cast<std::size_t>(node.integer("max_references", 0));
    } else if (a.type == "lyapunov") {
        if (node.has("dim") && node.raw("dim").is_string()) {
            if (node.text("dim") != "fnn") throw ConfigError(node.at("dim"), "expected an integer or \"fnn\"");
            a.dim_from_fnn = true;
        } else {
            a.lyapunov.dim = static_cast<int>(node.integer("dim", 1, 1));
        }
        a.lyapunov.delay = static_cast<int>(node.integer("delay", 0));
        a.lyapunov.theiler = static_cast<int>(node.integer("theiler", -1, -1));
        a.lyapunov.k_max = static_cast<int>(node.integer("k_max", 50, 1));
        if (node.has("fit_range")) {
            const json& r = node.raw("fit_range");
            if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
                throw ConfigError(node.at("fit_range"), "expected [lo, hi]");
            }
            a.lyapunov.fit_range = std::pair{r[0].get<int>(), r[1].get<int>()};
        }
    } else {
        throw ConfigError(node.at("type"), "unknown analysis '" + a.type + "'");
    }
    node.finish();
    return a;
}

std::vector<AnalysisSpec> parse_analysis_list(const json& list, const std::string& path,
                                              const std::string& default_observable) {
    if (!list.is_array()) throw ConfigError(path, "expected an array");
    std::vector<AnalysisSpec> out;
    std::set<std::string> names;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        out.push_back(parse_analysis(Node(list[i], p), default_observable));
        if (!names.insert(out.back().name).second) throw ConfigError(p + "/name", "duplicate analysis name");
    }
    return out;
}

std::vector<std::string> allowed_observables(ModelKind kind) {
    switch (kind) {
        case ModelKind::bipartite:
        case ModelKind::tripartite: return {"svne", "mandel_q", "mean_photon"};
        case ModelKind::kerr: return {"fidelity"};
        case ModelKind::synthetic: return {"signal"};
    }
    return {};
}

}  // namespace

const char* to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::bipartite: return "bipartite";
        case ModelKind::tripartite: return "tripartite";
        case ModelKind::kerr: return "kerr";
        case ModelKind::synthetic: return "synthetic";
    }
    return "unknown";
}

FieldState FieldSpec::build() const {
    const int c = cutoff ? *cutoff : auto_cutoff(alpha, m, tail_tol);
    return pacs_coefficients(alpha, m, c);
}

ExperimentConfig parse_config(const json& doc, bool paper_scale) {
    if (!doc.is_object()) throw ConfigError("/", "expected an object");
    json effective = doc;
    if (effective.contains("paper_scale")) {
        json patch = effective["paper_scale"];
        effective.erase("paper_scale");
        if (!patch.is_object()) throw ConfigError("/paper_scale", "expected an object");
        if (paper_scale) effective.merge_patch(patch);
    }

    ExperimentConfig c;
    c.effective = effective;
    Node root(effective, "");
    c.name = root.text("name", "experiment");

    const std::string model = root.text("model");
    if (model == "bipartite") c.model = ModelKind::bipartite;
    else if (model == "tripartite") c.model = ModelKind::tripartite;
    else if (model == "kerr") c.model = ModelKind::kerr;
    else if (model == "synthetic") c.model = ModelKind::synthetic;
    else throw ConfigError("/model", "expected bipartite, tripartite, kerr or synthetic");

    if (c.model != ModelKind::synthetic) {
        Node params = root.child("params");
        switch (c.model) {
            case ModelKind::bipartite: {
                const double lambda = params.non_negative("lambda", 1.0);
                c.bipartite.lambda1 = params.non_negative("lambda1", lambda);
                c.bipartite.lambda2 = params.non_negative("lambda2", lambda);
                c.bipartite.chi = params.has("chi") ? params.non_negative("chi")
                                                    : params.non_negative("chi_over_lambda") * lambda;
                break;
            }
            case ModelKind::tripartite: {
                std::tie(c.tripartite.chi1, c.tripartite.lambda1) = parse_rates(params, "chi1", "lambda1");
                std::tie(c.tripartite.chi2, c.tripartite.lambda2) = parse_rates(params, "chi2", "lambda2");
                break;
            }
            case ModelKind::kerr: c.kerr_chi = params.positive("chi"); break;
            case ModelKind::synthetic: break;
        }
        params.finish();
        c.field = parse_field(root.child("field"));
        if (c.model == ModelKind::tripartite) {
            c.field2 = root.has("field2") ? parse_field(root.child("field2")) : c.field;
        }
    } else {
        Node s = root.child("signal");
        c.signal.kind = s.text("kind");
        if (c.signal.kind == "logistic") {
            c.signal.x0 = s.number("x0", 0.3);
            c.signal.r = s.number("r", 4.0);
            c.signal.discard = static_cast<std::size_t>(s.integer("discard", 1000));
        } else if (c.signal.kind == "sinusoid") {
            c.signal.period = s.positive("period");
        } else if (c.signal.kind == "noisy_sinusoid") {
            c.signal.period = s.positive("period");
            c.signal.snr = s.positive("snr");
        } else if (c.signal.kind != "white_noise" && c.signal.kind != "uniform_noise") {
            throw ConfigError("/signal/kind", "unknown signal '" + c.signal.kind + "'");
        }
        s.finish();
    }

    c.grid = parse_grid(root.child("grid"));

    const auto allowed = allowed_observables(c.model);
    if (root.has("observables")) {
        const json& obs = root.raw("observables");
        if (!obs.is_array() || obs.empty()) throw ConfigError("/observables", "expected a non-empty array");
        for (std::size_t i = 0; i < obs.size(); ++i) {
            const std::string p = "/observables/" + std::to_string(i);
            if (!obs[i].is_string()) throw ConfigError(p, "expected a string");
            const auto name = obs[i].get<std::string>();
            if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
                throw ConfigError(p, "observable '" + name + "' is not available for this model");
            }
            if (std::find(c.observables.begin(), c.observables.end(), name) != c.observables.end()) {
                throw ConfigError(p, "duplicate observable");
            }
            c.observables.push_back(name);
        }
    } else {
        c.observables = {allowed.back()};
    }

    if (root.has("analyses")) {
        const std::string fallback = c.observables.size() == 1 ? c.observables[0]
                                     : c.model == ModelKind::bipartite || c.model == ModelKind::tripartite
                                         ? "mean_photon"
                                         : c.observables[0];
        c.analyses = parse_analysis_list(root.raw("analyses"), "/analyses", fallback);
        for (std::size_t i = 0; i < c.analyses.size(); ++i) {
            const auto& obs = c.analyses[i].observable;
            if (std::find(c.observables.begin(), c.observables.end(), obs) == c.observables.end()) {
                throw ConfigError("/analyses/" + std::to_string(i) + "/observable",
                                  "series '" + obs + "' is not among the observables");
            }
        }
    }
    c.seed = static_cast<std::uint64_t>(root.integer("seed", 0));
    c.max_points = static_cast<std::size_t>(root.integer("max_points", 20'000'000));
    c.allow_partial = root.flag("allow_partial", false);
    c.write_csv = root.flag("write_csv", true);
    root.finish();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, bool paper_scale) {
    std::ifstream in(path);
    if (!in) throw ConfigError("/", "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("/", path.string() + ": " + e.what());
    }
    return parse_config(doc, paper_scale);
}

std::vector<AnalysisSpec> parse_analyses(const json& doc) {
    if (!doc.is_object() || !doc.contains("analyses")) throw ConfigError("/analyses", "required field is missing");
    for (const auto& [key, value] : doc.items()) {
        if (key != "analyses") throw ConfigError("/" + key, "unknown field");
    }
    return parse_analysis_list(doc.at("analyses"), "/analyses", "series");
}

std::string config_hash(const json& effective) { return sha256_hex(effective.dump()); }

}  // namespace vatom
