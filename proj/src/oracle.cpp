#include "posw/oracle.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace posw {

namespace {

SparseOp lowering(FockDims dims, bool signal) {
    std::vector<Eigen::Triplet<cplx>> t;
    for (int na = 0; na < dims.n_a; ++na) {
        for (int nb = 0; nb < dims.n_b; ++nb) {
            const int level = signal ? na : nb;
            if (level == 0) continue;
            const int col = na * dims.n_b + nb;
            const int row = signal ? (na - 1) * dims.n_b + nb : na * dims.n_b + (nb - 1);
            t.emplace_back(row, col, std::sqrt(static_cast<double>(level)));
        }
    }
    SparseOp op(dims.size(), dims.size());
    op.setFromTriplets(t.begin(), t.end());
    return op;
}

Eigen::VectorXcd coherent_vector(cplx amplitude, int levels, const char* mode) {
    Eigen::VectorXcd c(levels);
    cplx term = std::exp(-0.5 * std::norm(amplitude));
    for (int n = 0; n < levels; ++n) {
        if (n > 0) term *= amplitude / std::sqrt(static_cast<double>(n));
        c[n] = term;
    }
    const double kept = c.squaredNorm();
    if (1.0 - kept > 1e-6) {
        std::ostringstream msg;
        msg << "coherent amplitude " << amplitude << " too large for " << levels << " levels of mode "
            << mode << " (discarded probability " << 1.0 - kept << ")";
        throw ValidationError(msg.str());
    }
    return c / std::sqrt(kept);
}

}  // namespace

ModeOperators::ModeOperators(FockDims d) : dims(d) {
    if (d.n_a < 2 || d.n_b < 2) throw ValidationError("Fock cutoffs must be at least 2");
    a = lowering(d, true);
    b = lowering(d, false);
    a_dag = a.adjoint();
    b_dag = b.adjoint();
}

DensityMatrix::DensityMatrix(FockDims dims, Eigen::MatrixXcd matrix)
    : dims_(dims), matrix_(std::move(matrix)) {
    if (matrix_.rows() != dims.size() || matrix_.cols() != dims.size()) {
        throw ValidationError("density matrix shape does not match Fock dims");
    }
}

double DensityMatrix::hermiticity_error() const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    const Eigen::MatrixXcd herm = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double DensityMatrix::top_population_a() const {
    double p = 0.0;
    const int na = dims_.n_a - 1;
    for (int nb = 0; nb < dims_.n_b; ++nb) {
        const int i = na * dims_.n_b + nb;
        p += matrix_(i, i).real();
    }
    return p;
}

double DensityMatrix::top_population_b() const {
    double p = 0.0;
    const int nb = dims_.n_b - 1;
    for (int na = 0; na < dims_.n_a; ++na) {
        const int i = na * dims_.n_b + nb;
        p += matrix_(i, i).real();
    }
    return p;
}

BandedOp::BandedOp(const SparseOp& op) : dim_(static_cast<int>(op.rows())) {
    std::map<int, Eigen::VectorXcd> by_offset;
    for (int col = 0; col < op.outerSize(); ++col) {
        for (SparseOp::InnerIterator it(op, col); it; ++it) {
            if (it.value() == cplx(0.0)) continue;
            const int row = static_cast<int>(it.row());
            auto [pos, inserted] = by_offset.try_emplace(col - row, Eigen::VectorXcd::Zero(dim_));
            pos->second[row] += it.value();
        }
    }
    for (auto& [offset, coef] : by_offset) {
        Band band;
        band.offset = offset;
        band.first = std::max(0, -offset);
        band.length = dim_ - std::abs(offset);
        band.coef = coef.segment(band.first, band.length);
        band.outer = band.coef * band.coef.adjoint();
        bands_.push_back(std::move(band));
    }
}

void BandedOp::apply_left(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
    for (const auto& b : bands_) {
        out.middleRows(b.first, b.length).noalias() +=
            b.coef.asDiagonal() * rho.middleRows(b.first + b.offset, b.length);
    }
}

void BandedOp::apply_right_adjoint(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
    for (const auto& b : bands_) {
        out.middleCols(b.first, b.length).noalias() +=
            rho.middleCols(b.first + b.offset, b.length) * b.coef.conjugate().asDiagonal();
    }
}

void BandedOp::apply_sandwich(const Eigen::MatrixXcd& rho, double scale,
                              Eigen::MatrixXcd& out) const {
    if (bands_.size() != 1) throw std::logic_error("sandwich needs a single-band operator");
    const Band& b = bands_.front();
    out.block(b.first, b.first, b.length, b.length).array() +=
        scale * b.outer.array() *
        rho.block(b.first + b.offset, b.first + b.offset, b.length, b.length).array();
}

namespace {

SparseOp build_generator(const ModelParams& params, const ModeOperators& ops) {
    const SparseOp a2 = ops.a * ops.a;
    const SparseOp a2_dag = ops.a_dag * ops.a_dag;
    const SparseOp n_a = ops.a_dag * ops.a;
    const SparseOp n_b = ops.b_dag * ops.b;
    const cplx eps = params.epsilon();
    // -i/hbar H for the coupling and the classical pump, then the damping anticommutator.
    SparseOp m = cplx(0.5 * params.kappa()) * (a2_dag * ops.b - a2 * ops.b_dag) +
                 eps * ops.b_dag - std::conj(eps) * ops.b - cplx(params.gamma1()) * n_a -
                 cplx(params.gamma2()) * n_b;
    m.prune(cplx(0.0));
    return m;
}

}  // namespace

Liouvillian::Liouvillian(const ModelParams& params, FockDims dims)
    : ops_(dims),
      generator_(build_generator(params, ops_)),
      jump_a_(ops_.a),
      jump_b_(ops_.b),
      gamma1_(params.gamma1()),
      gamma2_(params.gamma2()) {}

Eigen::MatrixXcd Liouvillian::apply(const Eigen::MatrixXcd& rho) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    generator_.apply_left(rho, out);
    generator_.apply_right_adjoint(rho, out);
    if (gamma1_ != 0.0) jump_a_.apply_sandwich(rho, 2.0 * gamma1_, out);
    if (gamma2_ != 0.0) jump_b_.apply_sandwich(rho, 2.0 * gamma2_, out);
    return out;
}

DensityMatrix liouvillian_rhs(const DensityMatrix& rho, const ModelParams& params) {
    const Liouvillian l(params, rho.dims());
    return {rho.dims(), l.apply(rho.matrix())};
}

DensityMatrix coherent_density(cplx alpha0, cplx beta0, FockDims dims) {
    const Eigen::VectorXcd ca = coherent_vector(alpha0, dims.n_a, "a");
    const Eigen::VectorXcd cb = coherent_vector(beta0, dims.n_b, "b");
    Eigen::VectorXcd psi(dims.size());
    for (int na = 0; na < dims.n_a; ++na)
        for (int nb = 0; nb < dims.n_b; ++nb) psi[na * dims.n_b + nb] = ca[na] * cb[nb];
    return {dims, psi * psi.adjoint()};
}

cplx expectation(const SparseOp& op, const DensityMatrix& rho) {
    // Tr[op rho] = sum_ij op_ij rho_ji
    cplx acc = 0.0;
    const auto& m = rho.matrix();
    for (int col = 0; col < op.outerSize(); ++col) {
        for (SparseOp::InnerIterator it(op, col); it; ++it) {
            acc += it.value() * m(it.col(), it.row());
        }
    }
    return acc;
}

double expectation_Xa(const DensityMatrix& rho) {
    const ModeOperators ops(rho.dims());
    const cplx x = expectation(ops.a, rho) + expectation(ops.a_dag, rho);
    if (std::abs(x.imag()) > 1e-8) {
        throw ContractError("Tr[(a + a^dagger) rho] has imaginary part " +
                            std::to_string(x.imag()) + "; rho is not Hermitian");
    }
    return x.real();
}

ObservableValues oracle_observables(const DensityMatrix& rho, const ModeOperators& ops) {
    const cplx a = expectation(ops.a, rho);
    const cplx b = expectation(ops.b, rho);
    const cplx n = expectation(SparseOp(ops.a_dag * ops.a), rho);
    return {2.0 * a.real(), n.real(), 2.0 * b.real()};
}

Evolution evolve(const DensityMatrix& rho0, const ModelParams& params, double dt,
                 std::size_t steps, const EvolveOptions& options) {
    if (!(dt > 0.0)) throw ValidationError("oracle dt must be positive");
    if (options.record_every < 1) throw ValidationError("record_every must be at least 1");
    const Liouvillian l(params, rho0.dims());
    const FockDims dims = rho0.dims();
    const double trace0 = rho0.trace().real();

    Evolution ev;
    ev.min_eigenvalue = std::numeric_limits<double>::infinity();
    auto record = [&](double t, const Eigen::MatrixXcd& m) {
        DensityMatrix state(dims, m);
        const double top = state.top_population();
        if (top > options.truncation_tol) {
            std::ostringstream msg;
            msg << "Fock truncation breached at t = " << t
                << ": P(n_a = " << dims.n_a - 1 << ") = " << state.top_population_a()
                << ", P(n_b = " << dims.n_b - 1 << ") = " << state.top_population_b()
                << " (sum " << top << " > " << options.truncation_tol
                << "); increase n_a / n_b";
            throw TruncationError(msg.str());
        }
        ev.max_top_population = std::max(ev.max_top_population, top);
        ev.max_trace_deviation =
            std::max(ev.max_trace_deviation, std::abs(state.trace() - trace0));
        ev.max_hermiticity_error = std::max(ev.max_hermiticity_error, state.hermiticity_error());
        if (options.track_positivity) {
            ev.min_eigenvalue = std::min(ev.min_eigenvalue, state.min_eigenvalue());
        }
        ev.times.push_back(t);
        ev.states.push_back(std::move(state));
    };

    Eigen::MatrixXcd rho = rho0.matrix();
    record(0.0, rho);
    for (std::size_t s = 1; s <= steps; ++s) {
        const Eigen::MatrixXcd k1 = l.apply(rho);
        const Eigen::MatrixXcd k2 = l.apply(rho + (0.5 * dt) * k1);
        const Eigen::MatrixXcd k3 = l.apply(rho + (0.5 * dt) * k2);
        const Eigen::MatrixXcd k4 = l.apply(rho + dt * k3);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (s % options.record_every == 0) record(static_cast<double>(s) * dt, rho);
    }
    return ev;
}

ObservableSeries oracle_series(const Evolution& evolution) {
    ObservableSeries out;
    if (evolution.states.empty()) return out;
    const ModeOperators ops(evolution.states.front().dims());
    for (std::size_t k = 0; k < evolution.states.size(); ++k) {
        out.times.push_back(evolution.times[k]);
        out.mean.push_back(oracle_observables(evolution.states[k], ops));
        out.std_error.push_back(ObservableValues{});
        out.n_effective.push_back(0);
    }
    return out;
}

}  // namespace posw
