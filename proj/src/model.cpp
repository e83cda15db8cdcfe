#include "posw/model.hpp"

#include <cmath>
#include <string>

#include "posw/errors.hpp"

namespace posw {

ModelParams::ModelParams(double kappa, double gamma1, double gamma2, cplx epsilon)
    : kappa_(kappa), gamma1_(gamma1), gamma2_(gamma2), epsilon_(epsilon) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw ValidationError("kappa must be positive and finite, got " + std::to_string(kappa));
    }
    if (!(gamma1 >= 0.0) || !std::isfinite(gamma1)) {
        throw ValidationError("gamma1 must be non-negative, got " + std::to_string(gamma1));
    }
    if (!(gamma2 >= 0.0) || !std::isfinite(gamma2)) {
        throw ValidationError("gamma2 must be non-negative, got " + std::to_string(gamma2));
    }
    if (!std::isfinite(epsilon.real()) || !std::isfinite(epsilon.imag())) {
        throw ValidationError("epsilon must be finite");
    }
}

double critical_pump(const ModelParams& params) {
    return params.gamma1() * params.gamma2() / params.kappa();
}

PhasePoint classical_drift(const PhasePoint& x, const ModelParams& params) {
    const double k = params.kappa();
    const double g1 = params.gamma1();
    const double g2 = params.gamma2();
    const cplx eps = params.epsilon();
    return {
        -g1 * x.alpha + k * x.alpha_dag * x.beta,
        -g1 * x.alpha_dag + k * x.alpha * x.beta_dag,
        eps - g2 * x.beta - 0.5 * k * x.alpha * x.alpha,
        std::conj(eps) - g2 * x.beta_dag - 0.5 * k * x.alpha_dag * x.alpha_dag,
    };
}

PhasePoint semiclassical_steady_state(const ModelParams& params, Branch branch) {
    const cplx eps = params.epsilon();
    if (eps.imag() != 0.0) {
        throw UnsupportedInput("closed-form steady state needs a real pump amplitude");
    }
    const double e = eps.real();
    if (e < 0.0) {
        throw ValidationError("closed-form steady state needs a non-negative pump amplitude");
    }
    const double k = params.kappa();
    const double ec = critical_pump(params);
    if (e > ec) {
        const double sign = branch == Branch::positive ? 1.0 : -1.0;
        const double a = sign * std::sqrt(2.0 * (e - ec) / k);
        return PhasePoint::conjugate_pair(a, params.gamma1() / k);
    }
    // gamma2 == 0 forces e == ec == 0 here; any beta is stationary, take zero.
    const double b = params.gamma2() > 0.0 ? e / params.gamma2() : 0.0;
    return PhasePoint::conjugate_pair(0.0, b);
}

}  // namespace posw
