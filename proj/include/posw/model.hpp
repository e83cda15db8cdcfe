#pragma once

#include <complex>

namespace posw {

using cplx = std::complex<double>;

/// Physical constants of the degenerate OPO. All rates are in the same inverse-time
/// unit; the pump amplitude may be complex.
class ModelParams {
public:
    /// Throws ValidationError unless kappa > 0 and both loss rates are >= 0 and finite.
    ModelParams(double kappa, double gamma1, double gamma2, cplx epsilon);

    double kappa() const { return kappa_; }
    double gamma1() const { return gamma1_; }
    double gamma2() const { return gamma2_; }
    cplx epsilon() const { return epsilon_; }

    ModelParams with_epsilon(cplx epsilon) const { return {kappa_, gamma1_, gamma2_, epsilon}; }

private:
    double kappa_;
    double gamma1_;
    double gamma2_;
    cplx epsilon_;
};

/// Amplitudes in the doubled phase space. For single-phase-space representations the
/// dagger components are kept equal to the conjugates of their partners.
struct PhasePoint {
    cplx alpha{};
    cplx alpha_dag{};
    cplx beta{};
    cplx beta_dag{};

    static PhasePoint conjugate_pair(cplx alpha, cplx beta) {
        return {alpha, std::conj(alpha), beta, std::conj(beta)};
    }

    bool is_conjugate_pair() const {
        return alpha_dag == std::conj(alpha) && beta_dag == std::conj(beta);
    }

    PhasePoint& operator+=(const PhasePoint& o) {
        alpha += o.alpha;
        alpha_dag += o.alpha_dag;
        beta += o.beta;
        beta_dag += o.beta_dag;
        return *this;
    }

    friend PhasePoint operator+(PhasePoint a, const PhasePoint& b) { return a += b; }

    friend PhasePoint operator*(double c, const PhasePoint& x) {
        return {c * x.alpha, c * x.alpha_dag, c * x.beta, c * x.beta_dag};
    }

    friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

enum class Branch { positive, negative };

/// Pump threshold gamma1*gamma2/kappa.
double critical_pump(const ModelParams& params);

/// Deterministic part of the amplitude equations (rates, not yet multiplied by dt).
PhasePoint classical_drift(const PhasePoint& x, const ModelParams& params);

/// Fixed point of the classical drift for a real, non-negative pump. Above threshold
/// returns the symmetry-broken solution on the requested branch; at or below threshold
/// returns the trivial signal-off solution. Throws UnsupportedInput for a complex pump
/// and ValidationError for a negative one.
PhasePoint semiclassical_steady_state(const ModelParams& params, Branch branch);

}  // namespace posw
