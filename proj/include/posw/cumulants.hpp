#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "posw/model.hpp"
#include "posw/noise.hpp"

namespace posw {

/// One joint sample of (sigma1, sigma1_dag, sigma2, sigma2_dag).
using Sample4 = std::array<cplx, 4>;

inline constexpr std::array<const char*, 4> kSigmaNames{"sigma1", "sigma1_dag", "sigma2",
                                                        "sigma2_dag"};

/// Sorted component indices of a joint cumulant, e.g. {0, 0, 3} for <<s1 s1 s2_dag>>.
using Monomial = std::vector<int>;

/// "sigma1*sigma1*sigma2_dag" style label.
std::string monomial_name(const Monomial& m);

/// All sorted monomials of order 1..max_order over the four components, ordered by
/// order and then lexicographically.
std::vector<Monomial> monomials_up_to(int max_order);

struct CumulantEntry {
    Monomial indices;
    cplx value;
    double se_real = 0.0;
    double se_imag = 0.0;
};

struct CumulantTable {
    std::vector<CumulantEntry> entries;
    std::size_t samples = 0;
    std::size_t blocks = 0;

    /// Throws std::out_of_range if the monomial is not in the table.
    const CumulantEntry& at(const Monomial& m) const;
};

/// Streaming estimator of joint cumulants (complex conjugates never enter) with block
/// jackknife errors. The total sample count is fixed up front so that blocks are equal
/// contiguous ranges of the input order.
class CumulantEstimator {
public:
    static constexpr std::size_t kMinSamples = 10000;

    /// Throws ValidationError if n_samples < kMinSamples, max_order outside 1..3 or
    /// blocks < 2.
    CumulantEstimator(std::size_t n_samples, int max_order = 3, std::size_t blocks = 100);

    void add(const Sample4& x);

    /// Throws ContractError unless exactly n_samples were added.
    CumulantTable finish() const;

private:
    std::size_t n_samples_;
    std::size_t n_blocks_;
    std::vector<Monomial> monomials_;
    std::size_t added_ = 0;
    Sample4 shift_{};
    std::vector<std::size_t> block_counts_;
    std::vector<cplx> block_sums_;  // n_blocks x monomials
};

/// Convenience wrapper over CumulantEstimator for in-memory samples.
CumulantTable empirical_cumulants(std::span<const Sample4> samples, int max_order = 3,
                                  std::size_t blocks = 100);

/// Exact joint cumulant of the sigma noises: -kappa/4 for <<s1 s1 s2_dag>> and
/// <<s1_dag s1_dag s2>>, zero for every other monomial of order <= 3.
cplx sigma_cumulant_target(const Monomial& m, double kappa);

/// Cumulant table of n draws of draw_sigma from stream (seed, 0).
CumulantTable sigma_cumulant_table(const SigmaParams& sp, std::size_t n, std::size_t blocks,
                                   std::uint64_t seed);

}  // namespace posw
