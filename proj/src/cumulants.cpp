#include "posw/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "posw/errors.hpp"

namespace posw {

namespace {

// Joint cumulants from raw moments of the shifted sample; `moment` looks up E[prod].
template <class MomentFn>
cplx cumulant_from_moments(const Monomial& m, MomentFn moment) {
    switch (m.size()) {
        case 1:
            return moment(m);
        case 2:
            return moment(m) - moment({m[0]}) * moment({m[1]});
        case 3: {
            const cplx m0 = moment({m[0]});
            const cplx m1 = moment({m[1]});
            const cplx m2 = moment({m[2]});
            return moment(m) - moment({m[0], m[1]}) * m2 - moment({m[0], m[2]}) * m1 -
                   moment({m[1], m[2]}) * m0 + 2.0 * m0 * m1 * m2;
        }
        default:
            throw std::logic_error("cumulant order must be 1..3");
    }
}

}  // namespace

std::string monomial_name(const Monomial& m) {
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i > 0) out += '*';
        out += kSigmaNames.at(static_cast<std::size_t>(m[i]));
    }
    return out;
}

std::vector<Monomial> monomials_up_to(int max_order) {
    std::vector<Monomial> out;
    for (int i = 0; i < 4; ++i) out.push_back({i});
    if (max_order >= 2) {
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) out.push_back({i, j});
    }
    if (max_order >= 3) {
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j)
                for (int k = j; k < 4; ++k) out.push_back({i, j, k});
    }
    return out;
}

const CumulantEntry& CumulantTable::at(const Monomial& m) const {
    Monomial key = m;
    std::sort(key.begin(), key.end());
    for (const auto& e : entries) {
        if (e.indices == key) return e;
    }
    throw std::out_of_range("no cumulant for " + monomial_name(key));
}

CumulantEstimator::CumulantEstimator(std::size_t n_samples, int max_order, std::size_t blocks)
    : n_samples_(n_samples), n_blocks_(blocks) {
    if (n_samples < kMinSamples) {
        throw ValidationError("cumulant estimation needs at least 10000 samples, got " +
                              std::to_string(n_samples));
    }
    if (max_order < 1 || max_order > 3) {
        throw ValidationError("cumulant order must be between 1 and 3");
    }
    if (blocks < 2 || blocks > n_samples) {
        throw ValidationError("jackknife needs between 2 and n_samples blocks");
    }
    monomials_ = monomials_up_to(max_order);
    block_counts_.assign(n_blocks_, 0);
    block_sums_.assign(n_blocks_ * monomials_.size(), cplx{});
}

void CumulantEstimator::add(const Sample4& x) {
    if (added_ >= n_samples_) {
        throw ContractError("more samples added than announced");
    }
    if (added_ == 0) shift_ = x;
    const std::size_t block = added_ * n_blocks_ / n_samples_;
    ++added_;
    ++block_counts_[block];

    Sample4 y;
    for (int i = 0; i < 4; ++i) y[i] = x[i] - shift_[i];
    cplx* sums = &block_sums_[block * monomials_.size()];
    for (std::size_t k = 0; k < monomials_.size(); ++k) {
        const auto& m = monomials_[k];
        cplx prod = y[m[0]];
        for (std::size_t j = 1; j < m.size(); ++j) prod *= y[m[j]];
        sums[k] += prod;
    }
}

CumulantTable CumulantEstimator::finish() const {
    if (added_ != n_samples_) {
        throw ContractError("cumulant estimator received " + std::to_string(added_) +
                            " samples, expected " + std::to_string(n_samples_));
    }
    const std::size_t nm = monomials_.size();

    std::vector<cplx> total(nm, cplx{});
    for (std::size_t b = 0; b < n_blocks_; ++b)
        for (std::size_t k = 0; k < nm; ++k) total[k] += block_sums_[b * nm + k];

    auto index_of = [&](const Monomial& m) {
        return static_cast<std::size_t>(
            std::find(monomials_.begin(), monomials_.end(), m) - monomials_.begin());
    };

    // Cumulants of every monomial from sums over `count` samples.
    auto estimate = [&](const std::vector<cplx>& sums, double count) {
        std::vector<cplx> out(nm);
        auto moment = [&](const Monomial& m) { return sums[index_of(m)] / count; };
        for (std::size_t k = 0; k < nm; ++k) {
            out[k] = cumulant_from_moments(monomials_[k], moment);
            if (monomials_[k].size() == 1) out[k] += shift_[monomials_[k][0]];
        }
        return out;
    };

    const auto full = estimate(total, static_cast<double>(n_samples_));

    std::vector<std::vector<cplx>> leave_out(n_blocks_);
    std::vector<cplx> partial(nm);
    for (std::size_t b = 0; b < n_blocks_; ++b) {
        for (std::size_t k = 0; k < nm; ++k) partial[k] = total[k] - block_sums_[b * nm + k];
        leave_out[b] =
            estimate(partial, static_cast<double>(n_samples_ - block_counts_[b]));
    }

    CumulantTable table;
    table.samples = n_samples_;
    table.blocks = n_blocks_;
    const double nb = static_cast<double>(n_blocks_);
    for (std::size_t k = 0; k < nm; ++k) {
        cplx mean{};
        for (const auto& lo : leave_out) mean += lo[k];
        mean /= nb;
        double vr = 0.0, vi = 0.0;
        for (const auto& lo : leave_out) {
            const cplx d = lo[k] - mean;
            vr += d.real() * d.real();
            vi += d.imag() * d.imag();
        }
        const double f = (nb - 1.0) / nb;
        table.entries.push_back({monomials_[k], full[k], std::sqrt(f * vr), std::sqrt(f * vi)});
    }
    return table;
}

CumulantTable empirical_cumulants(std::span<const Sample4> samples, int max_order,
                                  std::size_t blocks) {
    CumulantEstimator est(samples.size(), max_order, blocks);
    for (const auto& x : samples) est.add(x);
    return est.finish();
}

cplx sigma_cumulant_target(const Monomial& m, double kappa) {
    Monomial key = m;
    std::sort(key.begin(), key.end());
    if (key == Monomial{0, 0, 3} || key == Monomial{1, 1, 2}) return -kappa / 4.0;
    return 0.0;
}

CumulantTable sigma_cumulant_table(const SigmaParams& sp, std::size_t n, std::size_t blocks,
                                   std::uint64_t seed) {
    CumulantEstimator est(n, 3, blocks);
    RngStream stream(seed, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const SigmaTuple s = draw_sigma(sp, stream);
        est.add({s.sigma1, s.sigma1_dag, s.sigma2, s.sigma2_dag});
    }
    return est.finish();
}

}  // namespace posw
