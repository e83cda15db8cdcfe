#pragma once

#include <string_view>

#include "posw/model.hpp"
#include "posw/noise.hpp"
#include "posw/rng.hpp"

namespace posw {

enum class Representation { positive_w, positive_p, truncated_wigner, classical };

std::string_view to_string(Representation r);
/// Throws ValidationError on an unknown name.
Representation representation_from_string(std::string_view name);

/// True for the symmetric-ordering family (truncated Wigner and positive-W), whose
/// coherent states carry vacuum half-width noise.
bool is_wigner_family(Representation r);

/// Which stochastic terms a kernel applies. Disabling both reduces every kernel to the
/// classical Euler map.
struct NoiseSwitches {
    bool wiener = true;  // Delta t^(1/2) terms
    bool sigma = true;   // Delta t^(1/3) terms (positive-W only)
};

class StepConfig {
public:
    /// Throws ValidationError unless dt > 0 and finite.
    StepConfig(double dt, Representation representation, NoiseSwitches noise = {});

    double dt() const { return dt_; }
    double sqrt_dt() const { return sqrt_dt_; }
    double cbrt_dt() const { return cbrt_dt_; }
    Representation representation() const { return representation_; }
    const NoiseSwitches& noise() const { return noise_; }

private:
    double dt_;
    double sqrt_dt_;
    double cbrt_dt_;
    Representation representation_;
    NoiseSwitches noise_;
};

/// Amplitude bound beyond which a trajectory counts as escaped.
inline constexpr double kEscapeBound = 1e6;

/// True if any amplitude is non-finite or exceeds kEscapeBound in modulus.
bool escaped(const PhasePoint& x);

/// Positive-W Euler step. Draws eta1, eta2 and then one sigma tuple:
///   d alpha     = drift dt + sqrt(g1) eta1 dt^(1/2)       + sigma1 dt^(1/3)
///   d alpha_dag = drift dt + sqrt(g1) conj(eta1) dt^(1/2) + sigma1_dag dt^(1/3)
///   d beta      = drift dt + sqrt(g2) eta2 dt^(1/2)       + sigma2 dt^(1/3)
///   d beta_dag  = drift dt + sqrt(g2) conj(eta2) dt^(1/2) + sigma2_dag dt^(1/3)
PhasePoint step_positive_w(const PhasePoint& x, const ModelParams& params,
                           const SigmaParams& sp, const StepConfig& cfg, RngStream& stream);

/// Positive-P Euler-Ito step with diagonal diffusion sqrt(kappa beta) w1, sqrt(kappa beta_dag) w2
/// on the signal amplitudes; w1, w2 are independent real standard normals.
PhasePoint step_positive_p(const PhasePoint& x, const ModelParams& params,
                           const StepConfig& cfg, RngStream& stream);

/// Truncated-Wigner Euler step. Input must satisfy the conjugation constraint
/// (ContractError otherwise); the output satisfies it exactly.
PhasePoint step_truncated_wigner(const PhasePoint& x, const ModelParams& params,
                                 const StepConfig& cfg, RngStream& stream);

/// Deterministic Euler step x + drift(x) dt.
PhasePoint step_classical(const PhasePoint& x, const ModelParams& params, const StepConfig& cfg);

/// Dispatches on cfg.representation().
PhasePoint step(const PhasePoint& x, const ModelParams& params, const SigmaParams& sp,
                const StepConfig& cfg, RngStream& stream);

enum class InitialMode { coherent, deterministic };

struct InitialStateSpec {
    InitialMode mode = InitialMode::coherent;
    cplx alpha0{};
    cplx beta0{};
};

/// Initial phase point for one trajectory. Deterministic mode, and coherent mode for the
/// P family and the classical map, return (alpha0, conj alpha0, beta0, conj beta0).
/// Coherent mode in the Wigner family adds independent complex Gaussians with
/// E|zeta|^2 = 1/2 to each mode, keeping the dagger components conjugate.
PhasePoint sample_initial(const InitialStateSpec& spec, Representation representation,
                          RngStream& stream);

}  // namespace posw
