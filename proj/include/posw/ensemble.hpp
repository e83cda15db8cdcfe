#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "posw/integrators.hpp"
#include "posw/model.hpp"
#include "posw/noise.hpp"

namespace posw {

/// Recorded observables, in column order.
enum class Observable : std::size_t { Xa = 0, Na = 1, Xb = 2 };
inline constexpr std::size_t kObservableCount = 3;
using ObservableValues = std::array<double, kObservableCount>;

/// Observables of one phase point: Re(alpha + alpha_dag), the normally ordered photon
/// number Re(alpha_dag alpha) (minus 1/2 for Wigner-family samples, which estimate the
/// symmetrically ordered product), and Re(beta + beta_dag).
ObservableValues observe(const PhasePoint& x, Representation representation);

struct RunConfig {
    ModelParams model;
    StepConfig step;
    InitialStateSpec initial;
    std::uint64_t n_traj = 1;
    double t_end = 1.0;
    std::uint64_t record_every = 1;
    std::uint64_t seed = 0;
    double chi = 0.33;
    /// Explicit sigma parameters; optimal_sigma_params(kappa, chi) when empty.
    std::optional<SigmaParams> sigma;
    /// Worker threads; 0 picks the hardware concurrency. Never affects results.
    unsigned threads = 0;

    SigmaParams resolved_sigma() const;
};

/// Throws ValidationError on any invalid field (including sigma constraints for
/// positive-W runs).
void validate(const RunConfig& cfg);

/// floor(t_end / (dt * record_every)) + 1.
std::size_t grid_size(const RunConfig& cfg);
std::vector<double> grid_times(const RunConfig& cfg);

/// Per-grid-point sums over live trajectories. Sums make merge exactly commutative;
/// merging in a fixed order makes results independent of worker count.
struct Accumulator {
    std::vector<std::uint64_t> count;
    std::vector<ObservableValues> sum;
    std::vector<ObservableValues> sum_sq;
    std::uint64_t trajectories = 0;
    std::uint64_t diverged_count = 0;

    Accumulator() = default;
    explicit Accumulator(std::size_t grid_points);

    std::size_t grid_points() const { return count.size(); }
    void record(std::size_t k, const ObservableValues& v);

    friend bool operator==(const Accumulator&, const Accumulator&) = default;
};

/// Combined statistics of both inputs. A default-constructed accumulator is an identity
/// element; otherwise grids must match (ContractError).
Accumulator merge(const Accumulator& a, const Accumulator& b);

/// Integrates trajectories [first, last) sequentially. Trajectory i uses stream
/// (seed, i), so any partition of the index range merges to the same statistics.
Accumulator accumulate_trajectories(const RunConfig& cfg, std::uint64_t first,
                                    std::uint64_t last);

struct ObservableSeries {
    std::vector<double> times;
    std::vector<ObservableValues> mean;
    std::vector<ObservableValues> std_error;
    std::vector<std::uint64_t> n_effective;
    std::uint64_t n_traj = 0;
    double diverged_fraction = 0.0;
    /// Set when every trajectory escaped before t_end; the series stops at the last grid
    /// point that still had live trajectories.
    bool truncated = false;

    std::size_t size() const { return times.size(); }
};

/// Means and standard errors (sample std / sqrt(n_effective)) from an accumulator.
ObservableSeries finalize(const Accumulator& acc, std::span<const double> times);

/// Runs cfg.n_traj trajectories, in parallel blocks, and reduces them deterministically.
ObservableSeries run_ensemble(const RunConfig& cfg);

struct SeriesComparison {
    double max_deviation = 0.0;
    double time = 0.0;
    std::size_t index = 0;
};

/// Standard-error floor used when both series are exact at a grid point.
inline constexpr double kDefaultSeFloor = 1e-8;

/// |a - b| / sqrt(se_a^2 + se_b^2) at each grid point (denominator floored at se_floor).
/// Grids must match to 1e-9 (ContractError otherwise).
std::vector<double> deviation_profile(const ObservableSeries& a, const ObservableSeries& b,
                                      Observable obs = Observable::Xa,
                                      double se_floor = kDefaultSeFloor);

SeriesComparison compare_series(const ObservableSeries& a, const ObservableSeries& b,
                                Observable obs = Observable::Xa,
                                double se_floor = kDefaultSeFloor);

/// Subset of `s` at the given times (each must be present to 1e-9; ContractError
/// otherwise).
ObservableSeries restrict_to(const ObservableSeries& s, std::span<const double> times);

struct ScanPoint {
    double dt = 0.0;
    /// n_traj * (standard error of the X_a mean at t_end)^2.
    double scaled_variance = 0.0;
    double diverged_fraction = 0.0;
    bool excluded = false;
};

struct ScanResult {
    std::vector<ScanPoint> points;
    /// Least-squares slope of log(scaled_variance) against log(dt) over included points.
    double slope = 0.0;
};

/// Repeats `base` at each dt (positive-W only, >= 4 values) recording only t = 0 and
/// t = t_end, which must be a whole number of steps for every dt.
ScanResult divergence_scan(const RunConfig& base, std::span<const double> dts);

}  // namespace posw
