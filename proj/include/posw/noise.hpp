#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "posw/errors.hpp"
#include "posw/model.hpp"
#include "posw/rng.hpp"

namespace posw {

/// Standardised complex Gaussian: density exp(-|xi|^2)/pi, so E[xi] = E[xi^2] = 0 and
/// E[|xi|^2] = 1. Consumes exactly one Philox block (Box-Muller on two 53-bit uniforms).
cplx standard_complex_gaussian(RngStream& stream);

/// E|xi| for the standardised complex Gaussian above.
inline constexpr double kMeanAbsComplexGaussian = 0.886226925452758013649;  // sqrt(pi)/2

/// Factorisation constants of the third-order noise. The products p*q_dag, p_dag*q must
/// equal -kappa/8 and r*s_dag, r_dag*s must equal 1; within that constraint the values are
/// free and only change how sampling noise is distributed.
struct SigmaParams {
    cplx p, p_dag, q, q_dag, r, r_dag, s, s_dag;
    double chi = 1.0;
};

/// Relative tolerance for the product constraints.
inline constexpr double kSigmaConstraintTol = 1e-12;

/// Throws ValidationError if the product constraints fail for this kappa or chi <= 0.
void validate_sigma_params(const SigmaParams& sp, double kappa);

/// Closed-form minimiser: p = p_dag = kappa^(1/3) / (4 (chi pi)^(1/6)), s = s_dag = chi^(1/4),
/// with q, r fixed by the product constraints.
SigmaParams optimal_sigma_params(double kappa, double chi);

/// Noise-power objective E|s1|^2 + E|s1_dag|^2 + chi (E|s2|^2 + E|s2_dag|^2) for real,
/// symmetric parameters (p = p_dag, s = s_dag) with q, r eliminated through the constraints.
double sigma_objective(double kappa, double chi, double p, double s);

/// Reported when the numerical minimiser fails; carries the last iterate.
class OptimizerError : public NumericalError {
public:
    OptimizerError(const std::string& what, double last_p, double last_s)
        : NumericalError(what), last_p(last_p), last_s(last_s) {}
    double last_p;
    double last_s;
};

/// Minimises sigma_objective over p, s > 0 by damped Newton iteration in (log p, log s),
/// where the objective is convex, then fixes q and r from the constraints.
SigmaParams numerical_sigma_params(double kappa, double chi);

struct SigmaTuple {
    cplx sigma1;
    cplx sigma1_dag;
    cplx sigma2;
    cplx sigma2_dag;
};

/// One realisation of the four third-order noises, without the dt^(1/3) factor.
///
/// Draws xi1, xi1_dag, xi2, xi2_dag (in that order) and forms
///   sigma1     = q xi2         + s conj(xi1_dag) * root_a
///   sigma1_dag = q_dag xi2_dag + s_dag conj(xi1) * root_b
///   sigma2     = r xi1 * root_b
///   sigma2_dag = r_dag xi1_dag * root_a
/// with root_a = sqrt(p_dag conj(xi2)) and root_b = sqrt(p conj(xi2_dag)) on the principal
/// branch. Each root is evaluated once and shared by its two consumers; the nonzero third
/// cumulants come entirely from that sharing.
SigmaTuple draw_sigma(const SigmaParams& sp, RngStream& stream);

/// Monte Carlo check of exp(x y) = E[exp(x xi + y conj(xi))]. Returns the relative error of
/// the n-sample mean. Requires |x y| <= 1 and n >= 1e5.
double hubbard_stratonovich_check(cplx x, cplx y, std::size_t n, RngStream& stream);

}  // namespace posw
