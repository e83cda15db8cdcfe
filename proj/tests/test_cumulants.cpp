#include "doctest.h"

#include <cmath>
#include <random>

#include "posw/cumulants.hpp"
#include "posw/errors.hpp"

using namespace posw;

TEST_CASE("monomial enumeration") {
    CHECK(monomials_up_to(1).size() == 4);
    CHECK(monomials_up_to(2).size() == 14);
    CHECK(monomials_up_to(3).size() == 34);
    CHECK(monomial_name({0, 0, 3}) == "sigma1*sigma1*sigma2_dag");
    CHECK(monomial_name({2}) == "sigma2");
}

TEST_CASE("estimator preconditions") {
    CHECK_THROWS_AS(CumulantEstimator(9999), ValidationError);
    CHECK_THROWS_AS(CumulantEstimator(10000, 4), ValidationError);
    CHECK_THROWS_AS(CumulantEstimator(10000, 3, 1), ValidationError);
    CumulantEstimator est(10000);
    est.add({});
    CHECK_THROWS_AS(est.finish(), ContractError);
}

TEST_CASE("cumulants of a known non-Gaussian sample") {
    // Component 0: centred exponential (k2 = 1, k3 = 2). Component 1: the same variable.
    // Component 2: complex Gaussian (E z^2 = 0). Component 3: constant 5.
    const std::size_t n = 400000;
    std::mt19937_64 gen(17);
    std::exponential_distribution<double> expo(1.0);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    std::vector<Sample4> xs(n);
    for (auto& x : xs) {
        const double e = expo(gen) - 1.0;
        x = {e, e, cplx(normal(gen), normal(gen)), 5.0};
    }
    const CumulantTable t = empirical_cumulants(xs);
    auto near = [&](const Monomial& m, cplx target) {
        const auto& e = t.at(m);
        return std::abs(e.value.real() - target.real()) <= 5.0 * e.se_real + 1e-12 &&
               std::abs(e.value.imag() - target.imag()) <= 5.0 * e.se_imag + 1e-12;
    };
    CHECK(near({0, 0}, 1.0));
    CHECK(near({0, 1}, 1.0));
    CHECK(near({0, 0, 0}, 2.0));
    CHECK(near({0, 0, 1}, 2.0));
    CHECK(near({2, 2}, 0.0));
    CHECK(near({2, 2, 2}, 0.0));
    CHECK(near({0, 2}, 0.0));
    CHECK(t.at({3}).value == cplx(5.0));
    CHECK(std::abs(t.at({3, 3}).value) == 0.0);
    CHECK(std::abs(t.at({0, 3, 3}).value) == 0.0);
    CHECK(t.at({1, 0}).indices == Monomial{0, 1});
}

TEST_CASE("sigma cumulant targets") {
    CHECK(sigma_cumulant_target({0, 0, 3}, 1.0) == cplx(-0.25));
    CHECK(sigma_cumulant_target({2, 1, 1}, 2.0) == cplx(-0.5));
    CHECK(sigma_cumulant_target({0, 0, 2}, 1.0) == cplx(0.0));
    CHECK(sigma_cumulant_target({0, 1}, 1.0) == cplx(0.0));
}

TEST_CASE("sampled sigma third cumulants") {
    const double kappa = 1.0;
    const CumulantTable t = sigma_cumulant_table(optimal_sigma_params(kappa, 0.33), 400000,
                                                 100, 21);
    for (const auto& e : t.entries) {
        const cplx target = sigma_cumulant_target(e.indices, kappa);
        CAPTURE(monomial_name(e.indices));
        CHECK(std::abs(e.value.real() - target.real()) <= 5.0 * e.se_real);
        CHECK(std::abs(e.value.imag() - target.imag()) <= 5.0 * e.se_imag);
    }
}
