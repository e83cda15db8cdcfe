#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "posw/ensemble.hpp"
#include "posw/oracle.hpp"

namespace posw {

/// Configuration file schema (JSON). Every key has a default; a file only needs the keys
/// it changes. Unknown sections or keys are rejected.
///
///   model    { kappa, gamma1, gamma2, epsilon_re, epsilon_im }
///   run      { representation, dt, t_end, n_traj, record_every, seed, chi, threads,
///              wiener_noise, sigma_noise }
///   initial  { mode, alpha0_re, alpha0_im, beta0_re, beta0_im }
///   oracle   { n_a, n_b, dt, truncation_tol }
///   sigma    { mode: "closed_form" | "numerical" | "explicit",
///              p, p_dag, q, q_dag, r, r_dag, s, s_dag: [re, im] (explicit mode only) }
///   cumulants{ samples, blocks }
///   scan     { dts: [...] }
nlohmann::json default_config();

/// Defaults overlaid with a config file. A metadata sidecar written by the CLI is also
/// accepted: its "config" member is used.
nlohmann::json load_config(const std::filesystem::path& path);

/// Overlays `patch` onto `base`, rejecting keys absent from the defaults.
void merge_config(nlohmann::json& base, const nlohmann::json& patch);

/// Applies "section.key=value"; the value is parsed as JSON when possible, otherwise
/// taken as a string.
void apply_override(nlohmann::json& cfg, const std::string& assignment);

struct OracleSettings {
    FockDims dims;
    double dt = 1e-3;
    double truncation_tol = 1e-6;
};

struct CumulantSettings {
    std::uint64_t samples = 1000000;
    std::uint64_t blocks = 100;
};

/// Typed views of a resolved config. All throw ValidationError on bad values.
RunConfig run_config_from(const nlohmann::json& cfg);
OracleSettings oracle_settings_from(const nlohmann::json& cfg);
CumulantSettings cumulant_settings_from(const nlohmann::json& cfg);
std::vector<double> scan_dts_from(const nlohmann::json& cfg);

/// Project version with the git revision it was configured from.
const char* version_string();

}  // namespace posw
