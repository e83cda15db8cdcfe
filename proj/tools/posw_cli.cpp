// Command-line front end: simulate, cumulants, oracle, compare, scan-dt.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "posw/config.hpp"
#include "posw/cumulants.hpp"
#include "posw/ensemble.hpp"
#include "posw/errors.hpp"
#include "posw/oracle.hpp"
#include "posw/series_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode : int { kOk = 0, kValidation = 2, kNumerical = 3, kComparisonFailed = 4 };

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir = ".";
    std::string name;
    std::int64_t seed = -1;
};

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json resolve_config(const CommonOptions& opt) {
    json cfg = opt.config_path.empty() ? posw::default_config() : posw::load_config(opt.config_path);
    for (const auto& o : opt.overrides) posw::apply_override(cfg, o);
    if (opt.seed >= 0) cfg["run"]["seed"] = opt.seed;
    return cfg;
}

void write_sidecar(const fs::path& path, const std::string& subcommand, const json& cfg,
                   double diverged_fraction, double wall_seconds, json extra) {
    json meta{
        {"timestamp", iso8601_now()},
        {"version", posw::version_string()},
        {"subcommand", subcommand},
        {"config", cfg},
        {"diverged_fraction", diverged_fraction},
        {"wall_time_s", wall_seconds},
    };
    for (auto& [k, v] : extra.items()) meta[k] = v;
    posw::write_file_atomic(path, meta.dump(2) + "\n");
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int run_simulate(const CommonOptions& opt) {
    const json cfg = resolve_config(opt);
    const posw::RunConfig run = posw::run_config_from(cfg);
    Stopwatch clock;
    const posw::ObservableSeries series = posw::run_ensemble(run);
    const double wall = clock.seconds();

    const std::string stem =
        opt.name.empty() ? std::string(posw::to_string(run.step.representation())) : opt.name;
    fs::create_directories(opt.output_dir);
    const fs::path csv = fs::path(opt.output_dir) / (stem + ".csv");
    posw::write_file_atomic(csv, posw::series_csv(series));
    write_sidecar(fs::path(opt.output_dir) / (stem + ".json"), "simulate", cfg,
                  series.diverged_fraction, wall,
                  {{"output", csv.filename().string()}, {"truncated", series.truncated}});
    if (series.truncated) {
        std::cerr << "error: every trajectory diverged before t_end; series truncated at t = "
                  << (series.times.empty() ? 0.0 : series.times.back()) << "\n";
        return kNumerical;
    }
    std::cout << csv.string() << "\n";
    return kOk;
}

int run_cumulants(const CommonOptions& opt) {
    const json cfg = resolve_config(opt);
    const posw::RunConfig run = posw::run_config_from(cfg);
    const posw::CumulantSettings settings = posw::cumulant_settings_from(cfg);
    const posw::SigmaParams sp = run.resolved_sigma();
    posw::validate_sigma_params(sp, run.model.kappa());

    Stopwatch clock;
    const posw::CumulantTable table =
        posw::sigma_cumulant_table(sp, settings.samples, settings.blocks, run.seed);
    const double wall = clock.seconds();

    const std::string stem = opt.name.empty() ? "cumulants" : opt.name;
    fs::create_directories(opt.output_dir);
    const fs::path csv = fs::path(opt.output_dir) / (stem + ".csv");
    posw::write_file_atomic(csv, posw::cumulant_csv(table, run.model.kappa()));
    write_sidecar(fs::path(opt.output_dir) / (stem + ".json"), "cumulants", cfg, 0.0, wall,
                  {{"output", csv.filename().string()}});
    std::cout << csv.string() << "\n";
    return kOk;
}

int run_oracle(const CommonOptions& opt) {
    const json cfg = resolve_config(opt);
    const posw::RunConfig run = posw::run_config_from(cfg);
    const posw::OracleSettings o = posw::oracle_settings_from(cfg);

    const double interval = run.step.dt() * static_cast<double>(run.record_every);
    const double ratio = interval / o.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
        throw posw::ValidationError(
            "oracle.dt must divide the recording interval run.dt * run.record_every");
    }
    const auto record_every = static_cast<std::size_t>(std::round(ratio));
    const auto steps = static_cast<std::size_t>(posw::grid_size(run) - 1) * record_every;

    Stopwatch clock;
    const posw::DensityMatrix rho0 =
        posw::coherent_density(run.initial.alpha0, run.initial.beta0, o.dims);
    const posw::Evolution ev =
        posw::evolve(rho0, run.model, o.dt, steps, {record_every, o.truncation_tol, false});
    const posw::ObservableSeries series = posw::oracle_series(ev);
    const double wall = clock.seconds();

    const std::string stem = opt.name.empty() ? "oracle" : opt.name;
    fs::create_directories(opt.output_dir);
    const fs::path csv = fs::path(opt.output_dir) / (stem + ".csv");
    posw::write_file_atomic(csv, posw::series_csv(series));
    write_sidecar(fs::path(opt.output_dir) / (stem + ".json"), "oracle", cfg, 0.0, wall,
                  {{"output", csv.filename().string()},
                   {"max_trace_deviation", ev.max_trace_deviation},
                   {"max_hermiticity_error", ev.max_hermiticity_error},
                   {"max_top_population", ev.max_top_population}});
    std::cout << csv.string() << "\n";
    return kOk;
}

std::vector<double> common_times(const posw::ObservableSeries& a, const posw::ObservableSeries& b) {
    std::vector<double> out;
    std::size_t j = 0;
    for (double t : a.times) {
        while (j < b.size() && b.times[j] < t - 1e-9 * std::max(1.0, std::abs(t))) ++j;
        if (j < b.size() && std::abs(b.times[j] - t) <= 1e-9 * std::max(1.0, std::abs(t))) {
            out.push_back(t);
        }
    }
    return out;
}

int run_compare(const std::string& path_a, const std::string& path_b, double threshold,
                const std::string& observable, bool common_grid, const std::string& report) {
    posw::ObservableSeries a = posw::read_series_csv(fs::path(path_a));
    posw::ObservableSeries b = posw::read_series_csv(fs::path(path_b));
    if (common_grid) {
        const auto times = common_times(a, b);
        a = posw::restrict_to(a, times);
        b = posw::restrict_to(b, times);
    }
    posw::Observable obs = posw::Observable::Xa;
    if (observable == "n_a") obs = posw::Observable::Na;
    else if (observable == "Xb") obs = posw::Observable::Xb;
    else if (observable != "Xa") throw posw::ValidationError("unknown observable " + observable);

    const posw::SeriesComparison cmp = posw::compare_series(a, b, obs);
    const bool pass = cmp.max_deviation <= threshold;
    const json out{
        {"series_a", path_a},
        {"series_b", path_b},
        {"observable", observable},
        {"grid_points", a.size()},
        {"max_deviation", cmp.max_deviation},
        {"argmax_time", cmp.time},
        {"threshold", threshold},
        {"pass", pass},
    };
    const std::string text = out.dump(2) + "\n";
    if (!report.empty()) posw::write_file_atomic(report, text);
    std::cout << text;
    return pass ? kOk : kComparisonFailed;
}

int run_scan(const CommonOptions& opt) {
    const json cfg = resolve_config(opt);
    const posw::RunConfig run = posw::run_config_from(cfg);
    const std::vector<double> dts = posw::scan_dts_from(cfg);
    Stopwatch clock;
    const posw::ScanResult scan = posw::divergence_scan(run, dts);
    const double wall = clock.seconds();

    std::ostringstream csv;
    csv << "dt,scaled_variance,diverged_fraction,excluded\n";
    csv << std::setprecision(std::numeric_limits<double>::max_digits10);
    json points = json::array();
    double worst_diverged = 0.0;
    for (const auto& p : scan.points) {
        csv << p.dt << ',' << p.scaled_variance << ',' << p.diverged_fraction << ','
            << (p.excluded ? 1 : 0) << '\n';
        worst_diverged = std::max(worst_diverged, p.diverged_fraction);
    }
    const std::string stem = opt.name.empty() ? "scan_dt" : opt.name;
    fs::create_directories(opt.output_dir);
    const fs::path path = fs::path(opt.output_dir) / (stem + ".csv");
    posw::write_file_atomic(path, csv.str());
    write_sidecar(fs::path(opt.output_dir) / (stem + ".json"), "scan-dt", cfg, worst_diverged,
                  wall, {{"output", path.filename().string()}, {"slope", scan.slope}});
    std::cout << path.string() << "\nslope " << scan.slope << "\n";
    return kOk;
}

void add_common(CLI::App* sub, CommonOptions& opt) {
    sub->add_option("-c,--config", opt.config_path, "JSON config file (or a metadata sidecar)");
    sub->add_option("-s,--set", opt.overrides, "Override, e.g. run.dt=0.005 (repeatable)");
    sub->add_option("-o,--output-dir", opt.output_dir, "Directory for CSV and JSON outputs");
    sub->add_option("-n,--name", opt.name, "Output file stem");
    sub->add_option("--seed", opt.seed, "Override run.seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-space stochastic simulation of the degenerate OPO"};
    app.set_version_flag("--version", posw::version_string());
    app.require_subcommand(1);

    CommonOptions sim_opt, cum_opt, oracle_opt, scan_opt;
    auto* sim = app.add_subcommand("simulate", "Run a trajectory ensemble and write its series");
    add_common(sim, sim_opt);
    auto* cum = app.add_subcommand("cumulants", "Estimate joint cumulants of the sigma noises");
    add_common(cum, cum_opt);
    auto* orc = app.add_subcommand("oracle", "Integrate the truncated Fock-space master equation");
    add_common(orc, oracle_opt);
    auto* scan = app.add_subcommand("scan-dt", "Sampling variance of X_a against the time step");
    add_common(scan, scan_opt);

    std::string path_a, path_b, observable = "Xa", report;
    double threshold = 3.0;
    bool common_grid = false;
    auto* cmp = app.add_subcommand("compare", "Max normalised deviation between two series");
    cmp->add_option("series_a", path_a, "First series CSV")->required();
    cmp->add_option("series_b", path_b, "Second series CSV")->required();
    cmp->add_option("--threshold", threshold, "Pass if max deviation <= threshold");
    cmp->add_option("--observable", observable, "Xa, n_a or Xb");
    cmp->add_flag("--common-grid", common_grid, "Compare only grid times present in both");
    cmp->add_option("-r,--report", report, "Also write the JSON report to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*sim) return run_simulate(sim_opt);
        if (*cum) return run_cumulants(cum_opt);
        if (*orc) return run_oracle(oracle_opt);
        if (*scan) return run_scan(scan_opt);
        if (*cmp) return run_compare(path_a, path_b, threshold, observable, common_grid, report);
    } catch (const posw::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const posw::ContractError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const posw::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kValidation;
}
