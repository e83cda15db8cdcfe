#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "posw/ensemble.hpp"
#include "posw/errors.hpp"
#include "posw/model.hpp"

namespace posw {

/// Fock cutoffs: signal levels 0..n_a-1, pump levels 0..n_b-1. Basis index is
/// n_a_level * n_b + n_b_level.
struct FockDims {
    int n_a = 15;
    int n_b = 10;
    int size() const { return n_a * n_b; }
    friend bool operator==(const FockDims&, const FockDims&) = default;
};

using SparseOp = Eigen::SparseMatrix<cplx>;

/// Truncated ladder operators on the two-mode space.
struct ModeOperators {
    explicit ModeOperators(FockDims dims);
    FockDims dims;
    SparseOp a, a_dag, b, b_dag;
};

class DensityMatrix {
public:
    /// Throws ValidationError if the matrix shape does not match dims.
    DensityMatrix(FockDims dims, Eigen::MatrixXcd matrix);

    FockDims dims() const { return dims_; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    Eigen::MatrixXcd& matrix() { return matrix_; }

    cplx trace() const { return matrix_.trace(); }
    /// max |rho - rho^dagger| entry.
    double hermiticity_error() const;
    /// Smallest eigenvalue of the Hermitian part.
    double min_eigenvalue() const;
    /// Population of the highest retained level of each mode.
    double top_population_a() const;
    double top_population_b() const;
    double top_population() const { return top_population_a() + top_population_b(); }

private:
    FockDims dims_;
    Eigen::MatrixXcd matrix_;
};

/// Operator stored by diagonals: op(i, i + offset) = coef[i]. Ladder-operator products on
/// the flattened two-mode basis have only a handful of distinct offsets, so applying them
/// as scaled row/column shifts of a dense matrix avoids sparse indexing entirely.
class BandedOp {
public:
    explicit BandedOp(const SparseOp& op);

    /// out += op * rho
    void apply_left(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;
    /// out += rho * op^dagger
    void apply_right_adjoint(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;
    /// out += scale * op * rho * op^dagger (single-band operators only)
    void apply_sandwich(const Eigen::MatrixXcd& rho, double scale, Eigen::MatrixXcd& out) const;

private:
    struct Band {
        int offset;
        int first;  // first row with a valid column
        int length;
        Eigen::VectorXcd coef;
        Eigen::MatrixXcd outer;  // coef * coef^H, sandwich only
    };
    int dim_;
    std::vector<Band> bands_;
};

/// Master-equation generator for the pumped, damped degenerate OPO:
///   drho/dt = (kappa/2)[a†² b - a² b†, rho] + [eps b† - eps* b, rho]
///           + g1 (2 a rho a† - a†a rho - rho a†a) + g2 (2 b rho b† - b†b rho - rho b†b)
/// so that amplitudes decay as exp(-g t) and d<a>/dt = -g1 <a> + kappa <a† b>.
class Liouvillian {
public:
    Liouvillian(const ModelParams& params, FockDims dims);

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
    FockDims dims() const { return ops_.dims; }
    const ModeOperators& operators() const { return ops_; }

private:
    ModeOperators ops_;
    BandedOp generator_;  // M = -i H - g1 a†a - g2 b†b; drho = M rho + rho M† + jumps
    BandedOp jump_a_;
    BandedOp jump_b_;
    double gamma1_;
    double gamma2_;
};

DensityMatrix liouvillian_rhs(const DensityMatrix& rho, const ModelParams& params);

/// Product of truncated, renormalised coherent states. Throws ValidationError if more
/// than 1e-6 of either coherent state's probability lies beyond the cutoff.
DensityMatrix coherent_density(cplx alpha0, cplx beta0, FockDims dims);

/// Tr[op rho] for a sparse operator.
cplx expectation(const SparseOp& op, const DensityMatrix& rho);

/// Tr[(a + a†) rho]. Throws ContractError if the imaginary part exceeds 1e-8.
double expectation_Xa(const DensityMatrix& rho);

/// X_a, normally ordered a†a, X_b.
ObservableValues oracle_observables(const DensityMatrix& rho, const ModeOperators& ops);

class TruncationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct EvolveOptions {
    std::size_t record_every = 1;
    /// Largest allowed top_population() at a recorded point.
    double truncation_tol = 1e-6;
    /// Also track the minimum eigenvalue at recorded points (one dense eigensolve each).
    bool track_positivity = false;
};

struct Evolution {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    double max_trace_deviation = 0.0;
    double max_hermiticity_error = 0.0;
    double max_top_population = 0.0;
    double min_eigenvalue = 0.0;  // only meaningful with track_positivity
};

/// Classical RK4 on the master equation. Records the initial state and every
/// record_every-th step. Trace drift is measured, never renormalised away. Throws
/// TruncationError when a recorded state exceeds the truncation tolerance.
Evolution evolve(const DensityMatrix& rho0, const ModelParams& params, double dt,
                 std::size_t steps, const EvolveOptions& options = {});

/// Evolution reduced to the ensemble series schema with zero standard errors.
ObservableSeries oracle_series(const Evolution& evolution);

}  // namespace posw
