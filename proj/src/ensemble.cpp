#include "posw/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "posw/errors.hpp"

namespace posw {

namespace {

constexpr std::uint64_t kBlockSize = 4096;
constexpr double kGridTol = 1e-9;

bool same_time(double a, double b) {
    return std::abs(a - b) <= kGridTol * std::max(1.0, std::abs(a));
}

void require_same_grid(const ObservableSeries& a, const ObservableSeries& b) {
    if (a.size() != b.size()) {
        throw ContractError("series grids differ in length: " + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()));
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!same_time(a.times[k], b.times[k])) {
            throw ContractError("series grids differ at index " + std::to_string(k));
        }
    }
}

}  // namespace

ObservableValues observe(const PhasePoint& x, Representation representation) {
    const double ordering_shift = is_wigner_family(representation) ? 0.5 : 0.0;
    return {
        (x.alpha + x.alpha_dag).real(),
        (x.alpha_dag * x.alpha).real() - ordering_shift,
        (x.beta + x.beta_dag).real(),
    };
}

SigmaParams RunConfig::resolved_sigma() const {
    return sigma ? *sigma : optimal_sigma_params(model.kappa(), chi);
}

void validate(const RunConfig& cfg) {
    if (cfg.n_traj < 1) throw ValidationError("n_traj must be at least 1");
    if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) {
        throw ValidationError("t_end must be positive");
    }
    if (cfg.record_every < 1) throw ValidationError("record_every must be at least 1");
    if (grid_size(cfg) < 2) {
        throw ValidationError("t_end shorter than one recording interval (dt * record_every)");
    }
    if (!(cfg.chi > 0.0)) throw ValidationError("chi must be positive");
    if (cfg.step.representation() == Representation::positive_w) {
        validate_sigma_params(cfg.resolved_sigma(), cfg.model.kappa());
    }
}

std::size_t grid_size(const RunConfig& cfg) {
    const double interval = cfg.step.dt() * static_cast<double>(cfg.record_every);
    return static_cast<std::size_t>(std::floor(cfg.t_end / interval + kGridTol)) + 1;
}

std::vector<double> grid_times(const RunConfig& cfg) {
    const std::size_t n = grid_size(cfg);
    const double interval = cfg.step.dt() * static_cast<double>(cfg.record_every);
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = static_cast<double>(k) * interval;
    return t;
}

Accumulator::Accumulator(std::size_t grid_points)
    : count(grid_points, 0), sum(grid_points, ObservableValues{}),
      sum_sq(grid_points, ObservableValues{}) {}

void Accumulator::record(std::size_t k, const ObservableValues& v) {
    ++count[k];
    for (std::size_t i = 0; i < kObservableCount; ++i) {
        sum[k][i] += v[i];
        sum_sq[k][i] += v[i] * v[i];
    }
}

Accumulator merge(const Accumulator& a, const Accumulator& b) {
    if (a.grid_points() == 0 && a.trajectories == 0) return b;
    if (b.grid_points() == 0 && b.trajectories == 0) return a;
    if (a.grid_points() != b.grid_points()) {
        throw ContractError("cannot merge accumulators over different grids");
    }
    Accumulator out(a.grid_points());
    for (std::size_t k = 0; k < a.grid_points(); ++k) {
        out.count[k] = a.count[k] + b.count[k];
        for (std::size_t i = 0; i < kObservableCount; ++i) {
            out.sum[k][i] = a.sum[k][i] + b.sum[k][i];
            out.sum_sq[k][i] = a.sum_sq[k][i] + b.sum_sq[k][i];
        }
    }
    out.trajectories = a.trajectories + b.trajectories;
    out.diverged_count = a.diverged_count + b.diverged_count;
    return out;
}

Accumulator accumulate_trajectories(const RunConfig& cfg, std::uint64_t first,
                                    std::uint64_t last) {
    const std::size_t n_grid = grid_size(cfg);
    const SigmaParams sp = cfg.resolved_sigma();
    const Representation rep = cfg.step.representation();
    Accumulator acc(n_grid);
    for (std::uint64_t traj = first; traj < last; ++traj) {
        RngStream stream(cfg.seed, traj);
        PhasePoint x = sample_initial(cfg.initial, rep, stream);
        ++acc.trajectories;
        bool alive = !escaped(x);
        if (alive) acc.record(0, observe(x, rep));
        for (std::size_t k = 1; k < n_grid && alive; ++k) {
            for (std::uint64_t s = 0; s < cfg.record_every; ++s) {
                x = step(x, cfg.model, sp, cfg.step, stream);
                if (escaped(x)) {
                    alive = false;
                    break;
                }
            }
            if (alive) acc.record(k, observe(x, rep));
        }
        if (!alive) ++acc.diverged_count;
    }
    return acc;
}

ObservableSeries finalize(const Accumulator& acc, std::span<const double> times) {
    if (times.size() != acc.grid_points()) {
        throw ContractError("time grid does not match accumulator");
    }
    ObservableSeries out;
    out.n_traj = acc.trajectories;
    out.diverged_fraction = acc.trajectories > 0 ? static_cast<double>(acc.diverged_count) /
                                                       static_cast<double>(acc.trajectories)
                                                 : 0.0;
    for (std::size_t k = 0; k < acc.grid_points(); ++k) {
        const std::uint64_t n = acc.count[k];
        if (n == 0) {
            out.truncated = true;
            break;
        }
        const double nd = static_cast<double>(n);
        ObservableValues mean{}, se{};
        for (std::size_t i = 0; i < kObservableCount; ++i) {
            mean[i] = acc.sum[k][i] / nd;
            if (n > 1) {
                const double var =
                    std::max(0.0, (acc.sum_sq[k][i] - acc.sum[k][i] * mean[i]) / (nd - 1.0));
                se[i] = std::sqrt(var / nd);
            }
        }
        out.times.push_back(times[k]);
        out.mean.push_back(mean);
        out.std_error.push_back(se);
        out.n_effective.push_back(n);
    }
    return out;
}

ObservableSeries run_ensemble(const RunConfig& cfg) {
    validate(cfg);
    const std::uint64_t n_blocks = (cfg.n_traj + kBlockSize - 1) / kBlockSize;
    std::vector<Accumulator> blocks(n_blocks);
    std::atomic<std::uint64_t> next{0};

    auto worker = [&] {
        for (std::uint64_t b = next++; b < n_blocks; b = next++) {
            const std::uint64_t first = b * kBlockSize;
            const std::uint64_t last = std::min(cfg.n_traj, first + kBlockSize);
            blocks[b] = accumulate_trajectories(cfg, first, last);
        }
    };

    unsigned n_threads = cfg.threads > 0 ? cfg.threads : std::thread::hardware_concurrency();
    n_threads = static_cast<unsigned>(
        std::clamp<std::uint64_t>(n_threads, 1, std::max<std::uint64_t>(n_blocks, 1)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }

    Accumulator total;
    for (const auto& b : blocks) total = merge(total, b);
    return finalize(total, grid_times(cfg));
}

std::vector<double> deviation_profile(const ObservableSeries& a, const ObservableSeries& b,
                                      Observable obs, double se_floor) {
    require_same_grid(a, b);
    const auto i = static_cast<std::size_t>(obs);
    std::vector<double> dev(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double se = std::hypot(a.std_error[k][i], b.std_error[k][i]);
        dev[k] = std::abs(a.mean[k][i] - b.mean[k][i]) / std::max(se, se_floor);
    }
    return dev;
}

SeriesComparison compare_series(const ObservableSeries& a, const ObservableSeries& b,
                                Observable obs, double se_floor) {
    const auto dev = deviation_profile(a, b, obs, se_floor);
    SeriesComparison out;
    for (std::size_t k = 0; k < dev.size(); ++k) {
        if (k == 0 || dev[k] > out.max_deviation) {
            out.max_deviation = dev[k];
            out.time = a.times[k];
            out.index = k;
        }
    }
    return out;
}

ObservableSeries restrict_to(const ObservableSeries& s, std::span<const double> times) {
    ObservableSeries out;
    out.n_traj = s.n_traj;
    out.diverged_fraction = s.diverged_fraction;
    out.truncated = s.truncated;
    std::size_t k = 0;
    for (double t : times) {
        while (k < s.size() && !same_time(s.times[k], t) && s.times[k] < t) ++k;
        if (k == s.size() || !same_time(s.times[k], t)) {
            throw ContractError("series has no grid point at t = " + std::to_string(t));
        }
        out.times.push_back(s.times[k]);
        out.mean.push_back(s.mean[k]);
        out.std_error.push_back(s.std_error[k]);
        out.n_effective.push_back(s.n_effective[k]);
    }
    return out;
}

ScanResult divergence_scan(const RunConfig& base, std::span<const double> dts) {
    if (dts.size() < 4) throw ValidationError("divergence scan needs at least 4 time steps");
    if (base.step.representation() != Representation::positive_w) {
        throw ValidationError("divergence scan is defined for positive_w runs");
    }
    ScanResult result;
    std::vector<double> xs, ys;
    for (double dt : dts) {
        RunConfig cfg = base;
        cfg.step = StepConfig(dt, Representation::positive_w, base.step.noise());
        const double steps = std::round(base.t_end / dt);
        if (steps < 1.0 || !same_time(steps * dt, base.t_end)) {
            throw ValidationError("t_end is not a whole number of steps for dt = " +
                                  std::to_string(dt));
        }
        cfg.record_every = static_cast<std::uint64_t>(steps);
        const ObservableSeries s = run_ensemble(cfg);

        ScanPoint pt;
        pt.dt = dt;
        pt.diverged_fraction = s.diverged_fraction;
        if (s.truncated || s.size() < 2) {
            pt.excluded = true;
        } else {
            const double se = s.std_error.back()[static_cast<std::size_t>(Observable::Xa)];
            pt.scaled_variance = se * se * static_cast<double>(cfg.n_traj);
            pt.excluded = !(pt.scaled_variance > 0.0);
        }
        if (!pt.excluded) {
            xs.push_back(std::log(dt));
            ys.push_back(std::log(pt.scaled_variance));
        }
        result.points.push_back(pt);
    }
    if (xs.size() < 2) throw NumericalError("divergence scan: fewer than two usable runs");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / n;
        my += ys[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    result.slope = sxy / sxx;
    return result;
}

}  // namespace posw
