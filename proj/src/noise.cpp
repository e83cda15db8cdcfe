#include "posw/noise.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace posw {

namespace {

inline std::uint64_t join(std::uint32_t lo, std::uint32_t hi) {
    return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
}

bool close_rel(cplx value, cplx target, double tol) {
    return std::abs(value - target) <= tol * std::max(std::abs(target), 1e-300);
}

SigmaParams from_p_s(double kappa, double chi, double p, double s) {
    const double q = -kappa / (8.0 * p);
    const double r = 1.0 / s;
    return {p, p, q, q, r, r, s, s, chi};
}

void require_positive(double kappa, double chi) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw ValidationError("sigma parameters need kappa > 0");
    }
    if (!(chi > 0.0) || !std::isfinite(chi)) {
        throw ValidationError("sigma parameters need chi > 0");
    }
}

}  // namespace

cplx standard_complex_gaussian(RngStream& stream) {
    const auto b = stream.next_block();
    const double u1 = u64_to_open_unit(join(b[0], b[1]));
    const double u2 = u64_to_open_unit(join(b[2], b[3]));
    const double radius = std::sqrt(-std::log(u1));
    const double phase = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(phase), radius * std::sin(phase)};
}

void validate_sigma_params(const SigmaParams& sp, double kappa) {
    if (!(sp.chi > 0.0)) {
        throw ValidationError("sigma parameters need chi > 0");
    }
    const cplx pq_target = -kappa / 8.0;
    if (!close_rel(sp.p * sp.q_dag, pq_target, kSigmaConstraintTol) ||
        !close_rel(sp.p_dag * sp.q, pq_target, kSigmaConstraintTol)) {
        std::ostringstream msg;
        msg << "sigma parameters violate p*q_dag = p_dag*q = -kappa/8: p*q_dag = "
            << sp.p * sp.q_dag << ", p_dag*q = " << sp.p_dag * sp.q << ", expected " << pq_target;
        throw ValidationError(msg.str());
    }
    if (!close_rel(sp.r * sp.s_dag, 1.0, kSigmaConstraintTol) ||
        !close_rel(sp.r_dag * sp.s, 1.0, kSigmaConstraintTol)) {
        std::ostringstream msg;
        msg << "sigma parameters violate r*s_dag = r_dag*s = 1: r*s_dag = " << sp.r * sp.s_dag
            << ", r_dag*s = " << sp.r_dag * sp.s;
        throw ValidationError(msg.str());
    }
}

SigmaParams optimal_sigma_params(double kappa, double chi) {
    require_positive(kappa, chi);
    const double p = std::cbrt(kappa) / (4.0 * std::pow(chi * std::numbers::pi, 1.0 / 6.0));
    const double s = std::pow(chi, 0.25);
    return from_p_s(kappa, chi, p, s);
}

double sigma_objective(double kappa, double chi, double p, double s) {
    const double c = kappa / (8.0 * p);
    return 2.0 * (c * c + p * kMeanAbsComplexGaussian * (s * s + chi / (s * s)));
}

SigmaParams numerical_sigma_params(double kappa, double chi) {
    require_positive(kappa, chi);
    const double c2 = (kappa / 8.0) * (kappa / 8.0);
    const double e = kMeanAbsComplexGaussian;

    // f(u, v) = 2 [c2 e^{-2u} + e e^u (e^{2v} + chi e^{-2v})], u = log p, v = log s.
    auto value = [&](double u, double v) {
        return 2.0 * (c2 * std::exp(-2.0 * u) +
                      e * std::exp(u) * (std::exp(2.0 * v) + chi * std::exp(-2.0 * v)));
    };

    double u = 0.0;
    double v = 0.0;
    constexpr int kMaxIter = 200;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        const double pw = std::exp(-2.0 * u);
        const double eu = e * std::exp(u);
        const double sp = std::exp(2.0 * v);
        const double sm = chi * std::exp(-2.0 * v);
        const double gu = 2.0 * (-2.0 * c2 * pw + eu * (sp + sm));
        const double gv = 2.0 * eu * (2.0 * sp - 2.0 * sm);
        const double huu = 2.0 * (4.0 * c2 * pw + eu * (sp + sm));
        const double huv = gv;
        const double hvv = 2.0 * eu * (4.0 * sp + 4.0 * sm);
        const double det = huu * hvv - huv * huv;
        if (!(det > 0.0)) {
            throw OptimizerError("sigma minimiser hit a non-convex point", std::exp(u),
                                 std::exp(v));
        }
        const double du = -(hvv * gu - huv * gv) / det;
        const double dv = -(huu * gv - huv * gu) / det;

        const double f0 = value(u, v);
        const double slope = gu * du + gv * dv;
        double t = 1.0;
        while (value(u + t * du, v + t * dv) > f0 + 1e-4 * t * slope && t > 1e-12) {
            t *= 0.5;
        }
        u += t * du;
        v += t * dv;
        if (std::abs(t * du) < 1e-15 && std::abs(t * dv) < 1e-15) {
            return from_p_s(kappa, chi, std::exp(u), std::exp(v));
        }
        if (!std::isfinite(u) || !std::isfinite(v)) break;
    }
    // Newton in these coordinates stalls at ~1e-16 steps; accept if the gradient is tiny.
    const double eu = e * std::exp(u);
    const double gu = 2.0 * (-2.0 * c2 * std::exp(-2.0 * u) +
                             eu * (std::exp(2.0 * v) + chi * std::exp(-2.0 * v)));
    const double gv = 2.0 * eu * (2.0 * std::exp(2.0 * v) - 2.0 * chi * std::exp(-2.0 * v));
    const double scale = value(u, v);
    if (std::isfinite(scale) && std::abs(gu) < 1e-12 * scale && std::abs(gv) < 1e-12 * scale) {
        return from_p_s(kappa, chi, std::exp(u), std::exp(v));
    }
    throw OptimizerError("sigma minimiser did not converge", std::exp(u), std::exp(v));
}

SigmaTuple draw_sigma(const SigmaParams& sp, RngStream& stream) {
    const cplx xi1 = standard_complex_gaussian(stream);
    const cplx xi1_dag = standard_complex_gaussian(stream);
    const cplx xi2 = standard_complex_gaussian(stream);
    const cplx xi2_dag = standard_complex_gaussian(stream);

    const cplx root_a = std::sqrt(sp.p_dag * std::conj(xi2));
    const cplx root_b = std::sqrt(sp.p * std::conj(xi2_dag));

    return {
        sp.q * xi2 + sp.s * std::conj(xi1_dag) * root_a,
        sp.q_dag * xi2_dag + sp.s_dag * std::conj(xi1) * root_b,
        sp.r * xi1 * root_b,
        sp.r_dag * xi1_dag * root_a,
    };
}

double hubbard_stratonovich_check(cplx x, cplx y, std::size_t n, RngStream& stream) {
    if (std::abs(x * y) > 1.0) {
        throw ValidationError("Hubbard-Stratonovich check requires |x y| <= 1");
    }
    if (n < 100000) {
        throw ValidationError("Hubbard-Stratonovich check requires n >= 1e5 samples");
    }
    cplx sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx xi = standard_complex_gaussian(stream);
        sum += std::exp(x * xi + y * std::conj(xi));
    }
    const cplx exact = std::exp(x * y);
    return std::abs(sum / static_cast<double>(n) - exact) / std::abs(exact);
}

}  // namespace posw
