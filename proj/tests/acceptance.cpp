// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--output-dir DIR] [--only A1,A3,...]
//
// Criteria that share runs (A2/A3/A4/A8 all use the positive-P or oracle series) compute
// them once, on first use.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "posw/cumulants.hpp"
#include "posw/ensemble.hpp"
#include "posw/oracle.hpp"
#include "posw/series_io.hpp"

using namespace posw;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const ModelParams kOpo(1.0, 1.0, 1.0, 1.5);
constexpr double kChi = 0.33;
constexpr double kOracleDt = 1e-3;
constexpr double kRecordInterval = 0.05;

// Numerical loosening for the oracle run that feeds A2. The default 1e-6 adequacy bound is
// already exceeded by the initial coherent pump state at n_b = 10 (e^-1 / 9! > 1e-6), so
// the strict bound is checked, and reported, under A8 instead of aborting the run here.
constexpr double kA2OracleTruncationTol = 1e-4;

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double x, int digits = 4) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

RunConfig opo_run(Representation rep, double dt, double t_end, std::uint64_t n,
                  InitialMode mode, std::uint64_t seed) {
    const auto every = static_cast<std::uint64_t>(std::llround(kRecordInterval / dt));
    return RunConfig{.model = kOpo,
                     .step = StepConfig(dt, rep),
                     .initial = {mode, 1.0, 1.0},
                     .n_traj = n,
                     .t_end = t_end,
                     .record_every = every,
                     .seed = seed,
                     .chi = kChi,
                     .threads = 0};
}

class Suite {
public:
    explicit Suite(fs::path out) : out_(std::move(out)) { fs::create_directories(out_); }

    Outcome a1();
    Outcome a2();
    Outcome a3();
    Outcome a4();
    Outcome a5();
    Outcome a6();
    Outcome a7();
    Outcome a8();

    json summary = json::object();

private:
    const ObservableSeries& positive_p_series();
    const Evolution& oracle_evolution();
    const ObservableSeries& oracle_full();
    const ObservableSeries& positive_w_series();

    void save(const std::string& name, const ObservableSeries& s) {
        write_file_atomic(out_ / (name + ".csv"), series_csv(s));
    }

    fs::path out_;
    std::optional<ObservableSeries> positive_p_;
    std::optional<Evolution> oracle_;
    std::optional<ObservableSeries> oracle_series_;
    std::optional<ObservableSeries> positive_w_;
};

const ObservableSeries& Suite::positive_p_series() {
    if (!positive_p_) {
        Timer t;
        positive_p_ = run_ensemble(
            opo_run(Representation::positive_p, 0.002, 2.0, 200000, InitialMode::deterministic, 2));
        save("a2_positive_p", *positive_p_);
        std::cout << "  [positive-P, 2e5 trajectories, dt 0.002: " << fmt(t.seconds(), 3)
                  << " s]\n";
    }
    return *positive_p_;
}

const Evolution& Suite::oracle_evolution() {
    if (!oracle_) {
        Timer t;
        const FockDims dims{15, 10};
        const auto every = static_cast<std::size_t>(std::llround(kRecordInterval / kOracleDt));
        oracle_ = evolve(coherent_density(1.0, 1.0, dims), kOpo, kOracleDt, 2000,
                         {.record_every = every,
                          .truncation_tol = kA2OracleTruncationTol,
                          .track_positivity = true});
        std::cout << "  [oracle (15,10), t in [0,2]: " << fmt(t.seconds(), 3) << " s]\n";
    }
    return *oracle_;
}

const ObservableSeries& Suite::oracle_full() {
    if (!oracle_series_) {
        oracle_series_ = oracle_series(oracle_evolution());
        save("oracle_15x10", *oracle_series_);
    }
    return *oracle_series_;
}

const ObservableSeries& Suite::positive_w_series() {
    if (!positive_w_) {
        Timer t;
        positive_w_ = run_ensemble(
            opo_run(Representation::positive_w, 0.01, 1.0, 1000000, InitialMode::coherent, 3));
        save("a3_positive_w", *positive_w_);
        std::cout << "  [positive-W, 1e6 trajectories, dt 0.01: " << fmt(t.seconds(), 3)
                  << " s]\n";
    }
    return *positive_w_;
}

Outcome Suite::a1() {
    const double kappa = 1.0;
    const CumulantTable table =
        sigma_cumulant_table(optimal_sigma_params(kappa, kChi), 10000000, 100, 1);
    write_file_atomic(out_ / "a1_cumulants.csv", cumulant_csv(table, kappa));
    double worst = 0.0;
    std::string worst_name;
    for (const auto& e : table.entries) {
        const cplx target = sigma_cumulant_target(e.indices, kappa);
        const double zr = std::abs(e.value.real() - target.real()) / e.se_real;
        const double zi = std::abs(e.value.imag() - target.imag()) / e.se_imag;
        if (std::max(zr, zi) > worst) {
            worst = std::max(zr, zi);
            worst_name = monomial_name(e.indices);
        }
    }
    const auto& k1 = table.at({0, 0, 3});
    const auto& k2 = table.at({1, 1, 2});
    summary["A1"] = {{"max_z", worst}, {"worst", worst_name},
                     {"s1_s1_s2dag", {k1.value.real(), k1.value.imag(), k1.se_real}},
                     {"s1dag_s1dag_s2", {k2.value.real(), k2.value.imag(), k2.se_real}}};
    return {worst <= 5.0, "<<s1 s1 s2+>> = " + fmt(k1.value.real(), 5) + " +- " +
                              fmt(k1.se_real, 2) + ", <<s1+ s1+ s2>> = " +
                              fmt(k2.value.real(), 5) + " +- " + fmt(k2.se_real, 2) +
                              "; max |z| over 34 cumulants = " + fmt(worst, 3) + " (" +
                              worst_name + "), limit 5"};
}

Outcome Suite::a2() {
    const ObservableSeries& pp = positive_p_series();
    const ObservableSeries& oracle = oracle_full();
    const SeriesComparison c = compare_series(pp, oracle);
    summary["A2"] = {{"max_deviation", c.max_deviation}, {"argmax_time", c.time},
                     {"diverged_fraction", pp.diverged_fraction}};
    const bool pass = c.max_deviation <= 3.0 && pp.diverged_fraction < 0.01;
    return {pass, "max normalised deviation " + fmt(c.max_deviation, 3) + " at t = " +
                      fmt(c.time, 3) + " (limit 3), diverged " + fmt(pp.diverged_fraction, 3) +
                      " (limit 0.01)"};
}

Outcome Suite::a3() {
    const ObservableSeries& pw = positive_w_series();
    const ObservableSeries pp = restrict_to(positive_p_series(), pw.times);
    const SeriesComparison c = compare_series(pw, pp);
    summary["A3"] = {{"max_deviation", c.max_deviation}, {"argmax_time", c.time},
                     {"diverged_fraction", pw.diverged_fraction}};

    // Initial-state convention: the unsmeared start, checked against the oracle.
    Timer t;
    const ObservableSeries bare = run_ensemble(
        opo_run(Representation::positive_w, 0.01, 1.0, 100000, InitialMode::deterministic, 4));
    const ObservableSeries oracle = restrict_to(oracle_full(), pw.times);
    const double smeared = compare_series(restrict_to(pw, pw.times), oracle).max_deviation;
    const double unsmeared = compare_series(bare, oracle).max_deviation;
    summary["A3"]["initial_state_vs_oracle"] = {{"smeared_1e6", smeared},
                                                {"unsmeared_1e5", unsmeared}};
    std::cout << "  [initial-state check vs oracle: vacuum-smeared start " << fmt(smeared, 3)
              << ", unsmeared start (1e5) " << fmt(unsmeared, 3) << "; " << fmt(t.seconds(), 3)
              << " s]\n";

    const bool pass = c.max_deviation <= 3.0 && pw.diverged_fraction < 0.01;
    return {pass, "max normalised deviation " + fmt(c.max_deviation, 3) + " at t = " +
                      fmt(c.time, 3) + " (limit 3), diverged " + fmt(pw.diverged_fraction, 3) +
                      " (limit 0.01)"};
}

Outcome Suite::a4() {
    Timer t;
    const ObservableSeries tw = run_ensemble(
        opo_run(Representation::truncated_wigner, 0.01, 1.0, 1000000, InitialMode::coherent, 5));
    save("a4_truncated_wigner", tw);
    std::cout << "  [truncated Wigner, 1e6 trajectories: " << fmt(t.seconds(), 3) << " s]\n";
    const ObservableSeries oracle = restrict_to(oracle_full(), tw.times);
    const auto tw_dev = deviation_profile(tw, oracle);
    const auto pw_dev = deviation_profile(positive_w_series(), oracle);
    const double max_tw = *std::max_element(tw_dev.begin(), tw_dev.end());

    auto grows = [&](const std::vector<double>& d) {
        for (std::size_t k = 1; k < d.size(); ++k) {
            if (tw.times[k - 1] >= 0.5 && d[k] < d[k - 1]) return false;
        }
        return true;
    };
    const bool tw_grows = grows(tw_dev);
    const bool pw_grows = grows(pw_dev);
    summary["A4"] = {{"max_deviation", max_tw}, {"tw_profile", tw_dev}, {"pw_profile", pw_dev},
                     {"tw_grows_late", tw_grows}, {"pw_grows_late", pw_grows}};
    if (max_tw > 5.0) {
        return {true, "max normalised deviation vs oracle " + fmt(max_tw, 3) + " (needs > 5)"};
    }
    const bool fallback = tw_grows && !pw_grows;
    return {fallback, "max normalised deviation vs oracle " + fmt(max_tw, 3) +
                          " (no 5-SE separation); late-window growth: truncated Wigner " +
                          (tw_grows ? "monotone" : "not monotone") + ", positive-W " +
                          (pw_grows ? "monotone" : "not monotone")};
}

Outcome Suite::a5() {
    const std::vector<double> dts{0.02, 0.01, 0.005, 0.0025};
    RunConfig base = opo_run(Representation::positive_w, 0.01, 0.5, 100000,
                             InitialMode::coherent, 6);
    const ScanResult with = divergence_scan(base, dts);
    base.step = StepConfig(0.01, Representation::positive_w, NoiseSwitches{true, false});
    const ScanResult without = divergence_scan(base, dts);

    bool monotone = true;
    json pts = json::array();
    std::string vars;
    for (std::size_t k = 0; k < with.points.size(); ++k) {
        const auto& p = with.points[k];
        pts.push_back({p.dt, p.scaled_variance, without.points[k].scaled_variance});
        vars += (k ? ", " : "") + fmt(p.scaled_variance, 4);
        // Points are ordered by decreasing dt; variance must not drop as dt shrinks.
        if (k > 0 && p.scaled_variance < with.points[k - 1].scaled_variance) monotone = false;
    }
    summary["A5"] = {{"points", pts}, {"slope", with.slope}, {"slope_no_sigma", without.slope}};
    const bool pass = monotone && with.slope >= -0.6 && with.slope <= -0.1 &&
                      without.slope >= -0.1 && without.slope <= 0.1;
    return {pass, "n*var at dt 0.02..0.0025: " + vars + (monotone ? " (monotone)" : " (NOT monotone)") +
                      "; slope " + fmt(with.slope, 3) + " in [-0.6,-0.1]; without sigma " +
                      fmt(without.slope, 3) + " in [-0.1,0.1]"};
}

Outcome Suite::a6() {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto in_disk = [&] { return std::polar(0.5 * std::sqrt(u(gen)), 2.0 * M_PI * u(gen)); };
    int good = 0;
    double worst = 0.0;
    json errs = json::array();
    for (int i = 0; i < 20; ++i) {
        const cplx x = in_disk(), y = in_disk();
        RngStream stream(7, static_cast<std::uint64_t>(i));
        const double err = hubbard_stratonovich_check(x, y, 1000000, stream);
        errs.push_back(err);
        worst = std::max(worst, err);
        if (err < 1e-2) ++good;
    }
    summary["A6"] = {{"relative_errors", errs}, {"passing", good}};
    return {good >= 19, std::to_string(good) + "/20 cases below 1e-2 (need 19), worst " +
                            fmt(worst, 3)};
}

Outcome Suite::a7() {
    bool pass = true;
    std::string detail;
    json rows = json::array();
    for (double chi : {0.33, 1.0, 4.0}) {
        const SigmaParams sp = numerical_sigma_params(1.0, chi);
        const double ds = std::abs(sp.s.real() - std::pow(chi, 0.25));
        bool constraints = true;
        for (const SigmaParams& set : {sp, optimal_sigma_params(1.0, chi)}) {
            const double c1 = std::abs(set.p * set.q_dag + 0.125) / 0.125;
            const double c2 = std::abs(set.p_dag * set.q + 0.125) / 0.125;
            const double c3 = std::abs(set.r * set.s_dag - 1.0);
            const double c4 = std::abs(set.r_dag * set.s - 1.0);
            if (std::max({c1, c2, c3, c4}) > 1e-12) constraints = false;
        }
        pass = pass && ds <= 1e-6 && constraints;
        rows.push_back({{"chi", chi}, {"p", sp.p.real()}, {"s", sp.s.real()}, {"ds", ds}});
        detail += (detail.empty() ? "" : "; ") + std::string("chi ") + fmt(chi, 2) + ": |s - chi^1/4| " +
                  fmt(ds, 2) + (constraints ? ", products ok" : ", products VIOLATED");
    }
    summary["A7"] = rows;
    return {pass, detail};
}

Outcome Suite::a8() {
    const Evolution& ev = oracle_evolution();
    const ObservableSeries& base = oracle_full();
    const bool trace_ok = ev.max_trace_deviation < 1e-8;
    const bool herm_ok = ev.max_hermiticity_error < 1e-10;
    const bool pos_ok = ev.min_eigenvalue > -1e-8;
    const bool trunc_ok = ev.max_top_population < 1e-6;

    const auto every = static_cast<std::size_t>(std::llround(kRecordInterval / kOracleDt));
    Timer t;
    const FockDims big{20, 14};
    const ObservableSeries larger = oracle_series(
        evolve(coherent_density(1.0, 1.0, big), kOpo, kOracleDt, 2000,
               {.record_every = every, .truncation_tol = 1e-6}));
    save("oracle_20x14", larger);
    double dims_diff = 0.0;
    for (std::size_t k = 0; k < base.size(); ++k) {
        dims_diff = std::max(dims_diff, std::abs(base.mean[k][0] - larger.mean[k][0]));
    }
    const ObservableSeries flipped = oracle_series(
        evolve(coherent_density(-1.0, 1.0, FockDims{15, 10}), kOpo, kOracleDt, 2000,
               {.record_every = every, .truncation_tol = kA2OracleTruncationTol}));
    double parity = 0.0;
    for (std::size_t k = 0; k < base.size(); ++k) {
        parity = std::max(parity, std::abs(base.mean[k][0] + flipped.mean[k][0]));
    }
    std::cout << "  [oracle (20,14) and parity-flipped runs: " << fmt(t.seconds(), 3) << " s]\n";
    const bool dims_ok = dims_diff < 1e-6;
    const bool parity_ok = parity < 1e-10;

    summary["A8"] = {{"max_trace_deviation", ev.max_trace_deviation},
                     {"max_hermiticity_error", ev.max_hermiticity_error},
                     {"min_eigenvalue", ev.min_eigenvalue},
                     {"max_top_population", ev.max_top_population},
                     {"dims_15x10_vs_20x14", dims_diff},
                     {"parity_error", parity}};
    auto mark = [](bool ok) { return ok ? std::string(" ok") : std::string(" FAIL"); };
    const std::string detail =
        "trace " + fmt(ev.max_trace_deviation, 2) + mark(trace_ok) + "; hermiticity " +
        fmt(ev.max_hermiticity_error, 2) + mark(herm_ok) + "; min eigenvalue " +
        fmt(ev.min_eigenvalue, 2) + mark(pos_ok) + "; top population " +
        fmt(ev.max_top_population, 3) + " < 1e-6" + mark(trunc_ok) +
        "; |X_a(15,10) - X_a(20,14)| " + fmt(dims_diff, 3) + " < 1e-6" + mark(dims_ok) +
        "; parity " + fmt(parity, 2) + mark(parity_ok);
    return {trace_ok && herm_ok && pos_ok && trunc_ok && dims_ok && parity_ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria A1-A8"};
    std::string out = "acceptance_out";
    std::string only;
    app.add_option("-o,--output-dir", out, "Directory for series, tables and summary.json");
    app.add_option("--only", only, "Comma-separated subset, e.g. A1,A7");
    CLI11_PARSE(app, argc, argv);

    std::set<std::string> selected;
    std::stringstream ss(only);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) selected.insert(item);
    }

    Suite suite{fs::path(out)};
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"A1", [&] { return suite.a1(); }}, {"A2", [&] { return suite.a2(); }},
        {"A3", [&] { return suite.a3(); }}, {"A4", [&] { return suite.a4(); }},
        {"A5", [&] { return suite.a5(); }}, {"A6", [&] { return suite.a6(); }},
        {"A7", [&] { return suite.a7(); }}, {"A8", [&] { return suite.a8(); }},
    };

    int failures = 0;
    json results = json::object();
    for (const auto& [name, run] : criteria) {
        if (!selected.empty() && !selected.contains(name)) continue;
        Timer t;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = t.seconds();
        if (!o.pass) ++failures;
        results[name] = {{"pass", o.pass}, {"detail", o.detail}, {"seconds", secs}};
        std::cout << name << (o.pass ? " PASS " : " FAIL ") << o.detail << " [" << fmt(secs, 3)
                  << " s]" << std::endl;
    }
    suite.summary["results"] = results;
    write_file_atomic(fs::path(out) / "summary.json", suite.summary.dump(2) + "\n");
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
