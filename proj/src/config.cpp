#include "posw/config.hpp"

#include <cmath>
#include <fstream>

#include "posw/errors.hpp"
#include "posw/noise.hpp"

namespace posw {

using nlohmann::json;

namespace {

template <class T>
T get(const json& cfg, const char* section, const char* key) {
    try {
        return cfg.at(section).at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config ") + section + "." + key + ": " + e.what());
    }
}

cplx get_complex_pair(const json& sec, const char* key) {
    const json& v = sec.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ValidationError(std::string("config sigma.") + key + " must be [re, im]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

std::uint64_t get_count(const json& cfg, const char* section, const char* key) {
    const json& v = cfg.at(section).at(key);
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d == std::floor(d)) return static_cast<std::uint64_t>(d);
    }
    throw ValidationError(std::string("config ") + section + "." + key +
                          " must be a non-negative integer");
}

}  // namespace

json default_config() {
    return json{
        {"model", {{"kappa", 1.0}, {"gamma1", 1.0}, {"gamma2", 1.0},
                   {"epsilon_re", 1.5}, {"epsilon_im", 0.0}}},
        {"run", {{"representation", "positive_w"}, {"dt", 0.01}, {"t_end", 1.0},
                 {"n_traj", 10000}, {"record_every", 5}, {"seed", 1}, {"chi", 0.33},
                 {"threads", 0}, {"wiener_noise", true}, {"sigma_noise", true}}},
        {"initial", {{"mode", "coherent"}, {"alpha0_re", 1.0}, {"alpha0_im", 0.0},
                     {"beta0_re", 1.0}, {"beta0_im", 0.0}}},
        {"oracle", {{"n_a", 15}, {"n_b", 10}, {"dt", 1e-3}, {"truncation_tol", 1e-6}}},
        {"sigma", {{"mode", "closed_form"}, {"p", {0.0, 0.0}}, {"p_dag", {0.0, 0.0}},
                   {"q", {0.0, 0.0}}, {"q_dag", {0.0, 0.0}}, {"r", {0.0, 0.0}},
                   {"r_dag", {0.0, 0.0}}, {"s", {0.0, 0.0}}, {"s_dag", {0.0, 0.0}}}},
        {"cumulants", {{"samples", 1000000}, {"blocks", 100}}},
        {"scan", {{"dts", {0.02, 0.01, 0.005, 0.0025}}}},
    };
}

void merge_config(json& base, const json& patch) {
    if (!patch.is_object()) throw ValidationError("config must be a JSON object");
    for (const auto& [section, body] : patch.items()) {
        if (!base.contains(section)) throw ValidationError("unknown config section '" + section + "'");
        if (!body.is_object()) {
            throw ValidationError("config section '" + section + "' must be an object");
        }
        for (const auto& [key, value] : body.items()) {
            if (!base[section].contains(key)) {
                throw ValidationError("unknown config key '" + section + "." + key + "'");
            }
            base[section][key] = value;
        }
    }
}

json load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());
    json file;
    try {
        file = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("config file " + path.string() + ": " + e.what());
    }
    if (file.is_object() && file.contains("config") && file.contains("timestamp")) {
        file = file["config"];
    }
    json cfg = default_config();
    merge_config(cfg, file);
    return cfg;
}

void apply_override(json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw ValidationError("override must look like section.key=value, got '" + assignment + "'");
    }
    const std::string section = assignment.substr(0, dot);
    const std::string key = assignment.substr(dot + 1, eq - dot - 1);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    merge_config(cfg, json{{section, {{key, value}}}});
}

RunConfig run_config_from(const json& cfg) {
    try {
        const ModelParams model(get<double>(cfg, "model", "kappa"),
                                get<double>(cfg, "model", "gamma1"),
                                get<double>(cfg, "model", "gamma2"),
                                {get<double>(cfg, "model", "epsilon_re"),
                                 get<double>(cfg, "model", "epsilon_im")});
        const Representation rep =
            representation_from_string(get<std::string>(cfg, "run", "representation"));
        const NoiseSwitches noise{get<bool>(cfg, "run", "wiener_noise"),
                                  get<bool>(cfg, "run", "sigma_noise")};

        InitialStateSpec initial;
        const auto mode = get<std::string>(cfg, "initial", "mode");
        if (mode == "coherent") {
            initial.mode = InitialMode::coherent;
        } else if (mode == "deterministic") {
            initial.mode = InitialMode::deterministic;
        } else {
            throw ValidationError("initial.mode must be 'coherent' or 'deterministic'");
        }
        initial.alpha0 = {get<double>(cfg, "initial", "alpha0_re"),
                          get<double>(cfg, "initial", "alpha0_im")};
        initial.beta0 = {get<double>(cfg, "initial", "beta0_re"),
                         get<double>(cfg, "initial", "beta0_im")};

        RunConfig run{
            .model = model,
            .step = StepConfig(get<double>(cfg, "run", "dt"), rep, noise),
            .initial = initial,
            .n_traj = get_count(cfg, "run", "n_traj"),
            .t_end = get<double>(cfg, "run", "t_end"),
            .record_every = get_count(cfg, "run", "record_every"),
            .seed = get_count(cfg, "run", "seed"),
            .chi = get<double>(cfg, "run", "chi"),
            .sigma = std::nullopt,
            .threads = static_cast<unsigned>(get_count(cfg, "run", "threads")),
        };

        const auto sigma_mode = get<std::string>(cfg, "sigma", "mode");
        if (sigma_mode == "numerical") {
            run.sigma = numerical_sigma_params(model.kappa(), run.chi);
        } else if (sigma_mode == "explicit") {
            const json& s = cfg.at("sigma");
            run.sigma = SigmaParams{get_complex_pair(s, "p"),     get_complex_pair(s, "p_dag"),
                                    get_complex_pair(s, "q"),     get_complex_pair(s, "q_dag"),
                                    get_complex_pair(s, "r"),     get_complex_pair(s, "r_dag"),
                                    get_complex_pair(s, "s"),     get_complex_pair(s, "s_dag"),
                                    run.chi};
        } else if (sigma_mode != "closed_form") {
            throw ValidationError("sigma.mode must be closed_form, numerical or explicit");
        }
        validate(run);
        return run;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
}

OracleSettings oracle_settings_from(const json& cfg) {
    OracleSettings o;
    o.dims.n_a = static_cast<int>(get_count(cfg, "oracle", "n_a"));
    o.dims.n_b = static_cast<int>(get_count(cfg, "oracle", "n_b"));
    o.dt = get<double>(cfg, "oracle", "dt");
    o.truncation_tol = get<double>(cfg, "oracle", "truncation_tol");
    if (o.dims.n_a < 2 || o.dims.n_b < 2) throw ValidationError("oracle cutoffs must be >= 2");
    if (!(o.dt > 0.0)) throw ValidationError("oracle.dt must be positive");
    if (!(o.truncation_tol > 0.0)) throw ValidationError("oracle.truncation_tol must be positive");
    return o;
}

CumulantSettings cumulant_settings_from(const json& cfg) {
    CumulantSettings c{get_count(cfg, "cumulants", "samples"),
                       get_count(cfg, "cumulants", "blocks")};
    if (c.samples < 10000) throw ValidationError("cumulants.samples must be at least 10000");
    if (c.blocks < 2 || c.blocks > c.samples) {
        throw ValidationError("cumulants.blocks must be between 2 and samples");
    }
    return c;
}

std::vector<double> scan_dts_from(const json& cfg) {
    try {
        auto dts = cfg.at("scan").at("dts").get<std::vector<double>>();
        if (dts.size() < 4) throw ValidationError("scan.dts needs at least 4 entries");
        for (double dt : dts) {
            if (!(dt > 0.0)) throw ValidationError("scan.dts entries must be positive");
        }
        return dts;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config scan.dts: ") + e.what());
    }
}

const char* version_string() { return POSW_VERSION_STRING; }

}  // namespace posw
