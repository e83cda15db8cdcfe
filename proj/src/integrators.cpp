#include "posw/integrators.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "posw/errors.hpp"

namespace posw {

std::string_view to_string(Representation r) {
    switch (r) {
        case Representation::positive_w: return "positive_w";
        case Representation::positive_p: return "positive_p";
        case Representation::truncated_wigner: return "truncated_wigner";
        case Representation::classical: return "classical";
    }
    return "unknown";
}

Representation representation_from_string(std::string_view name) {
    if (name == "positive_w") return Representation::positive_w;
    if (name == "positive_p") return Representation::positive_p;
    if (name == "truncated_wigner") return Representation::truncated_wigner;
    if (name == "classical") return Representation::classical;
    throw ValidationError("unknown representation '" + std::string(name) + "'");
}

bool is_wigner_family(Representation r) {
    return r == Representation::positive_w || r == Representation::truncated_wigner;
}

StepConfig::StepConfig(double dt, Representation representation, NoiseSwitches noise)
    : dt_(dt), representation_(representation), noise_(noise) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("time step must be positive, got " + std::to_string(dt));
    }
    sqrt_dt_ = std::sqrt(dt);
    cbrt_dt_ = std::cbrt(dt);
}

bool escaped(const PhasePoint& x) {
    for (const cplx& z : {x.alpha, x.alpha_dag, x.beta, x.beta_dag}) {
        const double m = std::abs(z);
        if (!std::isfinite(m) || m > kEscapeBound) return true;
    }
    return false;
}

PhasePoint step_classical(const PhasePoint& x, const ModelParams& params, const StepConfig& cfg) {
    return x + cfg.dt() * classical_drift(x, params);
}

PhasePoint step_positive_w(const PhasePoint& x, const ModelParams& params,
                           const SigmaParams& sp, const StepConfig& cfg, RngStream& stream) {
    PhasePoint next = step_classical(x, params, cfg);
    if (cfg.noise().wiener) {
        const cplx eta1 = standard_complex_gaussian(stream);
        const cplx eta2 = standard_complex_gaussian(stream);
        const double a1 = std::sqrt(params.gamma1()) * cfg.sqrt_dt();
        const double a2 = std::sqrt(params.gamma2()) * cfg.sqrt_dt();
        next.alpha += a1 * eta1;
        next.alpha_dag += a1 * std::conj(eta1);
        next.beta += a2 * eta2;
        next.beta_dag += a2 * std::conj(eta2);
    }
    if (cfg.noise().sigma) {
        const SigmaTuple s = draw_sigma(sp, stream);
        const double h = cfg.cbrt_dt();
        next.alpha += h * s.sigma1;
        next.alpha_dag += h * s.sigma1_dag;
        next.beta += h * s.sigma2;
        next.beta_dag += h * s.sigma2_dag;
    }
    return next;
}

PhasePoint step_positive_p(const PhasePoint& x, const ModelParams& params,
                           const StepConfig& cfg, RngStream& stream) {
    PhasePoint next = step_classical(x, params, cfg);
    if (cfg.noise().wiener) {
        // Real and imaginary parts of a standard complex Gaussian, rescaled, are two
        // independent real standard normals.
        const cplx z = standard_complex_gaussian(stream) * std::numbers::sqrt2;
        const double k = params.kappa();
        next.alpha += std::sqrt(k * x.beta) * (z.real() * cfg.sqrt_dt());
        next.alpha_dag += std::sqrt(k * x.beta_dag) * (z.imag() * cfg.sqrt_dt());
    }
    return next;
}

PhasePoint step_truncated_wigner(const PhasePoint& x, const ModelParams& params,
                                 const StepConfig& cfg, RngStream& stream) {
    if (!x.is_conjugate_pair()) {
        throw ContractError("truncated Wigner step needs alpha_dag = conj(alpha) and "
                            "beta_dag = conj(beta)");
    }
    const PhasePoint drift = classical_drift(x, params);
    cplx alpha = x.alpha + cfg.dt() * drift.alpha;
    cplx beta = x.beta + cfg.dt() * drift.beta;
    if (cfg.noise().wiener) {
        const cplx eta1 = standard_complex_gaussian(stream);
        const cplx eta2 = standard_complex_gaussian(stream);
        alpha += std::sqrt(params.gamma1()) * cfg.sqrt_dt() * eta1;
        beta += std::sqrt(params.gamma2()) * cfg.sqrt_dt() * eta2;
    }
    return PhasePoint::conjugate_pair(alpha, beta);
}

PhasePoint step(const PhasePoint& x, const ModelParams& params, const SigmaParams& sp,
                const StepConfig& cfg, RngStream& stream) {
    switch (cfg.representation()) {
        case Representation::positive_w: return step_positive_w(x, params, sp, cfg, stream);
        case Representation::positive_p: return step_positive_p(x, params, cfg, stream);
        case Representation::truncated_wigner:
            return step_truncated_wigner(x, params, cfg, stream);
        case Representation::classical: return step_classical(x, params, cfg);
    }
    throw std::logic_error("unhandled representation");
}

PhasePoint sample_initial(const InitialStateSpec& spec, Representation representation,
                          RngStream& stream) {
    cplx alpha = spec.alpha0;
    cplx beta = spec.beta0;
    if (spec.mode == InitialMode::coherent && is_wigner_family(representation)) {
        alpha += std::numbers::sqrt2 / 2.0 * standard_complex_gaussian(stream);
        beta += std::numbers::sqrt2 / 2.0 * standard_complex_gaussian(stream);
    }
    return PhasePoint::conjugate_pair(alpha, beta);
}

}  // namespace posw
