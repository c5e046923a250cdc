#include "ljcm/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "ljcm/dynamics.hpp"
#include "ljcm/oracle.hpp"

namespace ljcm::run {

namespace {

constexpr double kPi = 3.14159265358979323846;

OutFormat parse_format(const std::string& s) {
    if (s == "csv") return OutFormat::csv;
    if (s == "json") return OutFormat::json;
    throw ConfigError(fmt::format("format: '{}' is not csv or json", s));
}

FKind parse_f_kind(const std::string& s, std::string& table_path) {
    table_path.clear();
    if (s == "constant") return FKind::constant;
    if (s == "inverse-sqrt") return FKind::inverse_sqrt;
    if (s.rfind("custom:", 0) == 0) {
        table_path = s.substr(7);
        if (table_path.empty())
            throw ConfigError(
                "f-kind: custom needs a table path, e.g. custom:table.json");
        return FKind::custom;
    }
    throw ConfigError(fmt::format(
        "f-kind: '{}' is not constant, inverse-sqrt or custom:<path>", s));
}

std::vector<double> load_f_table(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("f-kind: cannot open table '{}'", path));
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(
            fmt::format("f-kind: table '{}' is not valid JSON: {}", path, e.what()));
    }
    if (!j.is_array())
        throw ConfigError(fmt::format(
            "f-kind: table '{}' must hold a JSON array of e_n values", path));
    std::vector<double> table;
    table.reserve(j.size());
    for (const auto& el : j) {
        if (!el.is_number())
            throw ConfigError(fmt::format(
                "f-kind: table '{}' entry {} is not a number", path, table.size()));
        table.push_back(el.get<double>());
    }
    if (table.empty())
        throw ConfigError(fmt::format("f-kind: table '{}' is empty", path));
    return table;
}

std::string f_kind_string(const RunConfig& cfg) {
    switch (cfg.f_kind) {
        case FKind::constant: return "constant";
        case FKind::inverse_sqrt: return "inverse-sqrt";
        case FKind::custom: return fmt::format("custom:{}", cfg.f_table_path);
    }
    return {};
}

}  // namespace

bool ObservableSelection::any() const {
    return entropy || mandel || squeeze1 || squeeze2 || squeeze3 || moments;
}

ObservableSelection ObservableSelection::all() {
    ObservableSelection sel;
    sel.entropy = sel.mandel = sel.moments = true;
    sel.squeeze1 = sel.squeeze2 = sel.squeeze3 = true;
    return sel;
}

ObservableSelection ObservableSelection::parse(const std::string& csv) {
    ObservableSelection sel;
    size_t start = 0;
    while (start <= csv.size()) {
        const size_t comma = csv.find(',', start);
        const size_t end = comma == std::string::npos ? csv.size() : comma;
        std::string tok = csv.substr(start, end - start);
        tok.erase(0, tok.find_first_not_of(" \t"));
        tok.erase(tok.find_last_not_of(" \t") + 1);
        if (!tok.empty()) {
            if (tok == "entropy") sel.entropy = true;
            else if (tok == "mandel") sel.mandel = true;
            else if (tok == "squeeze1") sel.squeeze1 = true;
            else if (tok == "squeeze2") sel.squeeze2 = true;
            else if (tok == "squeeze3") sel.squeeze3 = true;
            else if (tok == "moments") sel.moments = true;
            else
                throw ConfigError(fmt::format(
                    "observables: unknown name '{}' (choose from entropy, "
                    "mandel, squeeze1, squeeze2, squeeze3, moments)", tok));
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (!sel.any()) throw ConfigError("observables: empty selection");
    return sel;
}

std::string ObservableSelection::to_string() const {
    std::string s;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!s.empty()) s += ',';
        s += name;
    };
    add(entropy, "entropy");
    add(mandel, "mandel");
    add(squeeze1, "squeeze1");
    add(squeeze2, "squeeze2");
    add(squeeze3, "squeeze3");
    add(moments, "moments");
    return s;
}

std::string RunConfig::out_path() const {
    if (out) return *out;
    return format == OutFormat::csv ? "series.csv" : "series.json";
}

void RunConfig::validate() const {
    if (!std::isfinite(tau_max) || !(tau_max > 0.0))
        throw ConfigError("tau-max: must be positive and finite");
    if (tau_steps < 2)
        throw ConfigError("tau-steps: at least 2 grid points required");
    if (!observables.any()) throw ConfigError("observables: empty selection");
    if (!std::isfinite(alpha_sq) || !(alpha_sq >= 0.0))
        throw ConfigError("alpha-sq: must be nonnegative and finite");
    if (!std::isfinite(alpha_phase))
        throw ConfigError("alpha-phase: must be finite");
    if (!std::isfinite(lambda) || !(lambda > 0.0))
        throw ConfigError("lambda: must be positive and finite");
    for (double v : {chi_over_lambda, delta2_over_lambda, delta3_over_lambda})
        if (!std::isfinite(v))
            throw ConfigError("chi/delta ratios: must be finite");
    try {
        truncation.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("epsilon/nmax-margin: {}", e.what()));
    }
    if (husimi) {
        if (!std::isfinite(husimi->tau) || !(husimi->tau >= 0.0))
            throw ConfigError("husimi-tau: must be nonnegative and finite");
        if (!std::isfinite(husimi->range) || !(husimi->range > 0.0))
            throw ConfigError("husimi-range: must be positive and finite");
        if (husimi->resolution < 2)
            throw ConfigError("husimi-res: at least 2 points per axis");
    }
    if (f_kind == FKind::custom && f_table.empty())
        throw ConfigError("f-kind: custom excitation table is empty");
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (char fig = '2'; fig <= '6'; ++fig)
        for (char var : {'a', 'b', 'c'})
            for (const char* side : {"-left", "-right"})
                names.push_back(fmt::format("fig{}{}{}", fig, var, side));
    for (char var : {'a', 'b', 'c'}) names.push_back(fmt::format("fig7{}", var));
    return names;
}

RunConfig preset_config(const std::string& name) {
    auto unknown = [&] {
        return ConfigError(fmt::format(
            "preset: unknown name '{}' (fig2a-left ... fig6c-right, fig7a, "
            "fig7b, fig7c)", name));
    };
    if (name.size() < 5 || name.compare(0, 3, "fig") != 0) throw unknown();
    const char fig = name[3];
    const char var = name[4];
    if (fig < '2' || fig > '7' || var < 'a' || var > 'c') throw unknown();

    RunConfig cfg;
    cfg.preset = name;
    cfg.alpha_sq = 10.0;
    cfg.observables = ObservableSelection{};

    if (fig == '7') {
        // Snapshot presets: constant-coupling reference, intensity-dependent
        // coupling, and the Kerr case, all at resonance and tau = pi/2.
        if (name.size() != 5)
            throw ConfigError(fmt::format(
                "preset: '{}' takes no -left/-right suffix", name));
        cfg.f_kind = var == 'b' ? FKind::inverse_sqrt : FKind::constant;
        cfg.chi_over_lambda = var == 'c' ? 0.4 : 0.0;
        cfg.tau_max = kPi / 2.0;
        cfg.tau_steps = 2;
        cfg.observables.moments = true;
        cfg.husimi = HusimiRequest{kPi / 2.0, 7.0, 201};
        return cfg;
    }

    if (name.size() == 10 && name.compare(5, 5, "-left") == 0)
        cfg.f_kind = FKind::constant;
    else if (name.size() == 11 && name.compare(5, 6, "-right") == 0)
        cfg.f_kind = FKind::inverse_sqrt;
    else if (name.size() == 5)
        throw ConfigError(fmt::format(
            "preset: '{}' needs a -left (constant coupling) or -right "
            "(1/sqrt(n) coupling) suffix", name));
    else
        throw unknown();

    switch (var) {
        case 'a': break;  // resonance, no Kerr
        case 'b': cfg.chi_over_lambda = 0.4; break;
        case 'c':
            cfg.delta2_over_lambda = 7.0;
            cfg.delta3_over_lambda = 15.0;
            break;
    }
    switch (fig) {
        case '2': cfg.observables.entropy = true; break;
        case '3': cfg.observables.mandel = true; break;
        case '4': cfg.observables.squeeze1 = true; break;
        case '5': cfg.observables.squeeze2 = true; break;
        case '6': cfg.observables.squeeze3 = true; break;
    }
    return cfg;
}

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{
        "Closed-form dynamics of a Lambda-type three-level atom coupled to a "
        "Kerr-modified cavity mode with intensity-dependent coupling; writes "
        "observable time series and Husimi grids as plot data."};
    app.name("lambda-jcm");

    std::string preset_s, config_path, f_kind_s, observables_s, out_s, format_s;
    double alpha_sq = 0, alpha_phase = 0, chi = 0, d2 = 0, d3 = 0, tau_max = 0;
    double h_tau_v = 0, h_range_v = 0, epsilon = 0;
    int tau_steps = 0, h_res_v = 0, nmax_margin = 0;
    bool oracle_check = false;

    app.add_option("--preset", preset_s,
                   "Figure preset: fig{2..6}{a,b,c}-{left,right} or fig7{a,b,c}");
    app.add_option("--config", config_path,
                   "JSON config file; flat keys mirror the flags, flags win");
    app.add_option("--f-kind", f_kind_s,
                   "Coupling profile: constant | inverse-sqrt | custom:<path> "
                   "(JSON array of e_n = n f^2(n))");
    app.add_option("--alpha-sq", alpha_sq,
                   "Mean photon number |alpha|^2 of the initial coherent field [10]");
    app.add_option("--alpha-phase", alpha_phase, "Phase of alpha in radians [0]");
    app.add_option("--chi-over-lambda", chi, "Kerr strength ratio chi/lambda [0]");
    app.add_option("--delta2-over-lambda", d2, "Detuning ratio Delta2/lambda [0]");
    app.add_option("--delta3-over-lambda", d3, "Detuning ratio Delta3/lambda [0]");
    app.add_option("--tau-max", tau_max, "End of the scaled-time grid tau = lambda t [25]");
    app.add_option("--tau-steps", tau_steps, "Grid points including tau = 0 [2500]");
    app.add_option("--observables", observables_s,
                   "Comma list from entropy,mandel,squeeze1,squeeze2,squeeze3,"
                   "moments [all]");
    app.add_option("--husimi-tau", h_tau_v,
                   "Husimi snapshot time tau (enables the phase-space grid)");
    app.add_option("--husimi-range", h_range_v, "Husimi grid half-width [7]");
    app.add_option("--husimi-res", h_res_v, "Husimi grid points per axis [201]");
    app.add_option("--epsilon", epsilon, "Fock-space truncation tail bound [1e-12]");
    app.add_option("--nmax-margin", nmax_margin,
                   "Extra Fock levels beyond the tail cut [8]");
    app.add_flag("--oracle-check", oracle_check,
                 "Cross-check ten grid points against the brute-force integrator");
    app.add_option("--out", out_s, "Output path [series.csv | series.json]");
    app.add_option("--format", format_s, "Output format: csv | json [csv]");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    nlohmann::json file;
    if (app.count("--config") > 0) {
        std::ifstream in(config_path);
        if (!in)
            throw ConfigError(fmt::format("config: cannot open '{}'", config_path));
        try {
            in >> file;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(fmt::format("config: '{}' is not valid JSON: {}",
                                          config_path, e.what()));
        }
        if (!file.is_object())
            throw ConfigError(
                fmt::format("config: '{}' must hold a JSON object", config_path));
        static const std::set<std::string> known = {
            "preset", "f-kind", "alpha-sq", "alpha-phase", "chi-over-lambda",
            "delta2-over-lambda", "delta3-over-lambda", "tau-max", "tau-steps",
            "observables", "husimi-tau", "husimi-range", "husimi-res",
            "epsilon", "nmax-margin", "oracle-check", "out", "format"};
        for (const auto& item : file.items())
            if (known.find(item.key()) == known.end())
                throw ConfigError(
                    fmt::format("config: unknown key '{}'", item.key()));
    }

    auto file_has = [&](const char* key) {
        return file.is_object() && file.contains(key) && !file.at(key).is_null();
    };
    auto file_num = [&](const char* key) -> double {
        const auto& v = file.at(key);
        if (!v.is_number())
            throw ConfigError(fmt::format("config: key '{}' must be a number", key));
        return v.get<double>();
    };
    auto file_int = [&](const char* key) -> int {
        const auto& v = file.at(key);
        if (!v.is_number_integer())
            throw ConfigError(
                fmt::format("config: key '{}' must be an integer", key));
        return v.get<int>();
    };
    auto file_str = [&](const char* key) -> std::string {
        const auto& v = file.at(key);
        if (!v.is_string())
            throw ConfigError(fmt::format("config: key '{}' must be a string", key));
        return v.get<std::string>();
    };
    auto file_bool = [&](const char* key) -> bool {
        const auto& v = file.at(key);
        if (!v.is_boolean())
            throw ConfigError(
                fmt::format("config: key '{}' must be a boolean", key));
        return v.get<bool>();
    };

    // The preset seeds the config; the flag form wins over the file key.
    std::string preset_name;
    if (app.count("--preset") > 0) preset_name = preset_s;
    else if (file_has("preset")) preset_name = file_str("preset");

    RunConfig cfg;
    if (!preset_name.empty()) cfg = preset_config(preset_name);

    auto apply_f_kind = [&](const std::string& s) {
        std::string path;
        const FKind kind = parse_f_kind(s, path);
        cfg.f_kind = kind;
        cfg.f_table_path = path;
        cfg.f_table.clear();
    };

    if (file_has("f-kind")) apply_f_kind(file_str("f-kind"));
    if (file_has("alpha-sq")) cfg.alpha_sq = file_num("alpha-sq");
    if (file_has("alpha-phase")) cfg.alpha_phase = file_num("alpha-phase");
    if (file_has("chi-over-lambda")) cfg.chi_over_lambda = file_num("chi-over-lambda");
    if (file_has("delta2-over-lambda"))
        cfg.delta2_over_lambda = file_num("delta2-over-lambda");
    if (file_has("delta3-over-lambda"))
        cfg.delta3_over_lambda = file_num("delta3-over-lambda");
    if (file_has("tau-max")) cfg.tau_max = file_num("tau-max");
    if (file_has("tau-steps")) cfg.tau_steps = file_int("tau-steps");
    if (file_has("observables"))
        cfg.observables = ObservableSelection::parse(file_str("observables"));
    if (file_has("epsilon")) cfg.truncation.epsilon = file_num("epsilon");
    if (file_has("nmax-margin")) cfg.truncation.margin = file_int("nmax-margin");
    if (file_has("oracle-check")) cfg.oracle_check = file_bool("oracle-check");
    if (file_has("out")) cfg.out = file_str("out");
    if (file_has("format")) cfg.format = parse_format(file_str("format"));

    if (app.count("--f-kind") > 0) apply_f_kind(f_kind_s);
    if (app.count("--alpha-sq") > 0) cfg.alpha_sq = alpha_sq;
    if (app.count("--alpha-phase") > 0) cfg.alpha_phase = alpha_phase;
    if (app.count("--chi-over-lambda") > 0) cfg.chi_over_lambda = chi;
    if (app.count("--delta2-over-lambda") > 0) cfg.delta2_over_lambda = d2;
    if (app.count("--delta3-over-lambda") > 0) cfg.delta3_over_lambda = d3;
    if (app.count("--tau-max") > 0) cfg.tau_max = tau_max;
    if (app.count("--tau-steps") > 0) cfg.tau_steps = tau_steps;
    if (app.count("--observables") > 0)
        cfg.observables = ObservableSelection::parse(observables_s);
    if (app.count("--epsilon") > 0) cfg.truncation.epsilon = epsilon;
    if (app.count("--nmax-margin") > 0) cfg.truncation.margin = nmax_margin;
    if (app.count("--oracle-check") > 0) cfg.oracle_check = oracle_check;
    if (app.count("--out") > 0) cfg.out = out_s;
    if (app.count("--format") > 0) cfg.format = parse_format(format_s);

    // Husimi settings merge last so that range/res can come from a different
    // layer than the snapshot time that enables the grid.
    std::optional<double> h_tau, h_range;
    std::optional<int> h_res;
    if (file_has("husimi-tau")) h_tau = file_num("husimi-tau");
    if (file_has("husimi-range")) h_range = file_num("husimi-range");
    if (file_has("husimi-res")) h_res = file_int("husimi-res");
    if (app.count("--husimi-tau") > 0) h_tau = h_tau_v;
    if (app.count("--husimi-range") > 0) h_range = h_range_v;
    if (app.count("--husimi-res") > 0) h_res = h_res_v;
    if (h_tau) {
        if (!cfg.husimi) cfg.husimi = HusimiRequest{};
        cfg.husimi->tau = *h_tau;
    }
    if (h_range) {
        if (!cfg.husimi)
            throw ConfigError("husimi-range: needs husimi-tau (or a fig7 preset)");
        cfg.husimi->range = *h_range;
    }
    if (h_res) {
        if (!cfg.husimi)
            throw ConfigError("husimi-res: needs husimi-tau (or a fig7 preset)");
        cfg.husimi->resolution = *h_res;
    }

    if (cfg.f_kind == FKind::custom && cfg.f_table.empty())
        cfg.f_table = load_f_table(cfg.f_table_path);

    cfg.validate();
    return cfg;
}

std::string config_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    if (cfg.preset.empty()) j["preset"] = nullptr;
    else j["preset"] = cfg.preset;
    j["f-kind"] = f_kind_string(cfg);
    j["alpha-sq"] = cfg.alpha_sq;
    j["alpha-phase"] = cfg.alpha_phase;
    j["chi-over-lambda"] = cfg.chi_over_lambda;
    j["delta2-over-lambda"] = cfg.delta2_over_lambda;
    j["delta3-over-lambda"] = cfg.delta3_over_lambda;
    j["tau-max"] = cfg.tau_max;
    j["tau-steps"] = cfg.tau_steps;
    j["observables"] = cfg.observables.to_string();
    if (cfg.husimi) {
        j["husimi-tau"] = cfg.husimi->tau;
        j["husimi-range"] = cfg.husimi->range;
        j["husimi-res"] = cfg.husimi->resolution;
    } else {
        j["husimi-tau"] = nullptr;
        j["husimi-range"] = nullptr;
        j["husimi-res"] = nullptr;
    }
    j["epsilon"] = cfg.truncation.epsilon;
    j["nmax-margin"] = cfg.truncation.margin;
    j["oracle-check"] = cfg.oracle_check;
    j["out"] = cfg.out_path();
    j["format"] = cfg.format == OutFormat::csv ? "csv" : "json";
    return j.dump();
}

NonlinearityFn make_nonlinearity(const RunConfig& cfg) {
    switch (cfg.f_kind) {
        case FKind::constant: return NonlinearityFn::constant();
        case FKind::inverse_sqrt: return NonlinearityFn::inverse_sqrt();
        case FKind::custom:
            try {
                return NonlinearityFn::from_excitations(cfg.f_table);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(fmt::format("f-kind: {}", e.what()));
            }
    }
    throw ConfigError("f-kind: unset");
}

ModelParams make_params(const RunConfig& cfg) {
    return ModelParams::scaled(cfg.lambda, cfg.chi_over_lambda,
                               cfg.delta2_over_lambda, cfg.delta3_over_lambda);
}

ScenarioResult run_scenario(const RunConfig& cfg) {
    cfg.validate();

    const NonlinearityFn f = make_nonlinearity(cfg);
    const ModelParams params = make_params(cfg);
    const cplx alpha = std::polar(std::sqrt(cfg.alpha_sq), cfg.alpha_phase);
    const FieldState field = coherent_field(alpha, cfg.truncation);

    // Couplings are needed through f(n_max + 1).
    if (cfg.f_kind == FKind::custom && f.table_size() < field.n_max() + 1)
        throw ConfigError(fmt::format(
            "f-kind: custom table has {} entries but the truncated field "
            "needs f(n) up to n = {} (extend the table or lower "
            "alpha-sq/epsilon)", f.table_size(), field.n_max() + 1));

    SystemEvolution sys(field, params, f);

    ScenarioResult result;
    result.nudged_sectors = sys.nudged_sectors();

    const int N = cfg.tau_steps;
    result.series.resize(static_cast<size_t>(N));
    auto tau_at = [&](int i) { return cfg.tau_max * double(i) / double(N - 1); };

    const ObservableSelection& sel = cfg.observables;
    auto evaluate = [&](int i) {
        ObservableRecord rec;
        rec.tau = tau_at(i);
        const JointState st = sys.at(rec.tau / cfg.lambda);
        if (sel.entropy) rec.entropy = field_entropy(st);
        if (sel.moments) {
            rec.mean_n = photon_moments(st, 1);
            rec.mean_n2 = photon_moments(st, 2);
            rec.mean_n3 = photon_moments(st, 3);
        }
        if (sel.mandel) rec.mandel_q = mandel_q(st);
        if (sel.squeeze1) {
            const SqueezingPair s = squeezing(st, 1);
            rec.s_x1 = s.s_x;
            rec.s_y1 = s.s_y;
        }
        if (sel.squeeze2) {
            const SqueezingPair s = squeezing(st, 2);
            rec.s_x2 = s.s_x;
            rec.s_y2 = s.s_y;
        }
        if (sel.squeeze3) {
            const SqueezingPair s = squeezing(st, 3);
            rec.s_x3 = s.s_x;
            rec.s_y3 = s.s_y;
        }
        return rec;
    };

    unsigned n_threads = std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min(n_threads, static_cast<unsigned>(N));

    if (n_threads <= 1) {
        for (int i = 0; i < N; ++i) result.series[static_cast<size_t>(i)] = evaluate(i);
    } else {
        std::atomic<int> cursor{0};
        std::mutex err_mutex;
        std::exception_ptr err;
        auto worker = [&] {
            while (true) {
                const int i = cursor.fetch_add(1);
                if (i >= N) break;
                try {
                    result.series[static_cast<size_t>(i)] = evaluate(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                    cursor.store(N);
                    break;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
        if (err) std::rethrow_exception(err);
    }

    if (cfg.oracle_check) {
        std::vector<int> checks;
        for (int j = 1; j <= 10; ++j) {
            const int i = static_cast<int>(std::lround(j * (N - 1) / 10.0));
            if (checks.empty() || checks.back() != i) checks.push_back(i);
        }
        const Eigen::MatrixXcd H =
            oracle::build_hamiltonian(params, f, field.n_max() + 1);
        const oracle::Propagator prop(H);
        const Eigen::VectorXcd psi0 = oracle::embed_initial(field);
        for (int i : checks) {
            const double t = tau_at(i) / cfg.lambda;
            const double gap = oracle::fidelity_gap(sys.at(t), prop.at(psi0, t));
            result.series[static_cast<size_t>(i)].oracle_gap = gap;
            result.worst_oracle_gap = std::max(result.worst_oracle_gap, gap);
        }
        result.oracle_failed = result.worst_oracle_gap > 1e-6;
    }

    if (cfg.husimi) {
        const double r = cfg.husimi->range;
        result.husimi = husimi_grid(sys.at(cfg.husimi->tau / cfg.lambda),
                                    {-r, r}, {-r, r}, cfg.husimi->resolution);
    }
    return result;
}

namespace {

struct Column {
    const char* name;
    std::optional<double> ObservableRecord::*field;
};

std::vector<Column> active_columns(const ObservableSelection& sel, bool oracle) {
    std::vector<Column> cols;
    if (sel.entropy) cols.push_back({"entropy", &ObservableRecord::entropy});
    if (sel.moments) {
        cols.push_back({"mean_n", &ObservableRecord::mean_n});
        cols.push_back({"mean_n2", &ObservableRecord::mean_n2});
        cols.push_back({"mean_n3", &ObservableRecord::mean_n3});
    }
    if (sel.mandel) cols.push_back({"mandel_q", &ObservableRecord::mandel_q});
    if (sel.squeeze1) {
        cols.push_back({"s_x1", &ObservableRecord::s_x1});
        cols.push_back({"s_y1", &ObservableRecord::s_y1});
    }
    if (sel.squeeze2) {
        cols.push_back({"s_x2", &ObservableRecord::s_x2});
        cols.push_back({"s_y2", &ObservableRecord::s_y2});
    }
    if (sel.squeeze3) {
        cols.push_back({"s_x3", &ObservableRecord::s_x3});
        cols.push_back({"s_y3", &ObservableRecord::s_y3});
    }
    if (oracle) cols.push_back({"oracle_gap", &ObservableRecord::oracle_gap});
    return cols;
}

}  // namespace

void write_series(const std::vector<ObservableRecord>& records,
                  const std::string& path, OutFormat format,
                  const RunConfig& cfg) {
    if (records.empty())
        throw std::invalid_argument("write_series: no records");
    const std::vector<Column> cols =
        active_columns(cfg.observables, cfg.oracle_check);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));

    if (format == OutFormat::csv) {
        out << "tau";
        for (const Column& c : cols) out << ',' << c.name;
        out << '\n';
        for (const ObservableRecord& rec : records) {
            out << fmt::format("{:.11e}", rec.tau);
            for (const Column& c : cols) {
                out << ',';
                if (const auto& v = rec.*(c.field)) out << fmt::format("{:.11e}", *v);
            }
            out << '\n';
        }
    } else {
        nlohmann::ordered_json j;
        j["config"] = nlohmann::ordered_json::parse(config_json(cfg));
        auto names = nlohmann::ordered_json::array();
        names.push_back("tau");
        for (const Column& c : cols) names.push_back(c.name);
        j["columns"] = std::move(names);
        auto taus = nlohmann::ordered_json::array();
        for (const ObservableRecord& rec : records) taus.push_back(rec.tau);
        j["tau"] = std::move(taus);
        for (const Column& c : cols) {
            auto arr = nlohmann::ordered_json::array();
            for (const ObservableRecord& rec : records) {
                if (const auto& v = rec.*(c.field)) arr.push_back(*v);
                else arr.push_back(nullptr);
            }
            j[c.name] = std::move(arr);
        }
        out << j.dump(2) << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path));
}

void write_husimi(const HusimiGrid& grid, const std::string& path,
                  OutFormat format) {
    if (grid.resolution < 2 ||
        grid.values.size() != static_cast<size_t>(grid.resolution) *
                              static_cast<size_t>(grid.resolution))
        throw std::invalid_argument("write_husimi: malformed grid");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));

    if (format == OutFormat::csv) {
        out << "x,y,q\n";
        for (int iy = 0; iy < grid.resolution; ++iy)
            for (int ix = 0; ix < grid.resolution; ++ix)
                out << fmt::format("{:.11e},{:.11e},{:.11e}\n", grid.x_at(ix),
                                   grid.y_at(iy), grid.value(ix, iy));
    } else {
        nlohmann::ordered_json j;
        j["x_min"] = grid.x_min;
        j["x_max"] = grid.x_max;
        j["y_min"] = grid.y_min;
        j["y_max"] = grid.y_max;
        j["resolution"] = grid.resolution;
        auto arr = nlohmann::ordered_json::array();
        for (double v : grid.values) arr.push_back(v);
        j["values"] = std::move(arr);
        out << j.dump(2) << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path));
}

std::string husimi_out_path(const std::string& series_path) {
    const size_t slash = series_path.find_last_of("/\\");
    const size_t dot = series_path.find_last_of('.');
    if (dot == std::string::npos ||
        (slash != std::string::npos && dot < slash))
        return series_path + ".husimi";
    return series_path.substr(0, dot) + ".husimi" + series_path.substr(dot);
}

}  // namespace ljcm::run
