#include <doctest.h>

#include <cmath>
#include <random>

#include "ccl/zigzag.hpp"
#include "oracles.hpp"

using namespace ccl;

namespace {

std::vector<double> to_vector(const IonChain& c) { return {c.positions().begin(), c.positions().end()}; }

}  // namespace

TEST_CASE("two-ion smallest eigenpair") {
    const double d = std::pow(8.0, 0.2);
    const auto e = smallest_eigenpair(transverse_hessian_base(IonChain({-d / 2, d / 2})));
    CHECK(e.value == doctest::Approx(-2 / (d * d * d)).epsilon(1e-14));
    CHECK(e.value == doctest::Approx(-0.574349).epsilon(1e-6));
    CHECK(e.vector[0] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(e.vector[1] == doctest::Approx(-1 / std::sqrt(2.0)).epsilon(1e-14));

    const double d2 = std::cbrt(2.0);
    CHECK(smallest_eigenpair(transverse_hessian_base(IonChain({-d2 / 2, d2 / 2}))).value ==
          doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("all-ones vector is a zero mode and the smallest eigenvalue is not positive") {
    std::mt19937_64 rng(31);
    for (int n : {2, 5, 17, 40}) {
        const auto b = transverse_hessian_base(IonChain(oracle::random_chain(rng, n))).entries;
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        CHECK((b * ones).cwiseAbs().maxCoeff() < 1e-10 * b.cwiseAbs().maxCoeff());
        CHECK(smallest_eigenpair({b}).value <= 0.0);
    }
}

TEST_CASE("critical beta of the two-ion chains") {
    CHECK(std::abs(critical_beta(ground_state(2, PotentialSpec::quadratic()).chain).beta_c - 1.0) < 1e-10);
    CHECK(std::abs(critical_beta(ground_state(2, PotentialSpec::quartic()).chain).beta_c - std::pow(2.0, -0.4)) <
          1e-10);
    CHECK_THROWS_AS(critical_beta(IonChain({0.0})), DomainError);
}

TEST_CASE("critical beta agrees with Cholesky bisection") {
    for (int p : {2, 4}) {
        for (int n : {3, 10, 40}) {
            const auto gs = ground_state(n, PotentialSpec(p));
            const double bc = critical_beta(gs.chain).beta_c;
            CHECK(bc == doctest::Approx(oracle::beta_c_by_bisection(to_vector(gs.chain))).epsilon(1e-9));
        }
    }
    // three harmonic ions: beta_c^2 = 12/5 at z^3 = 5/4
    CHECK(critical_beta(ground_state(3, PotentialSpec::quadratic()).chain).beta_c ==
          doctest::Approx(std::sqrt(2.4)).epsilon(1e-9));
}

TEST_CASE("sign bracketing around beta_c") {
    for (int p : {2, 4}) {
        for (int n : {10, 50}) {
            const auto gs = ground_state(n, PotentialSpec(p));
            const double bc = critical_beta(gs.chain).beta_c;
            CHECK(mode_spectrum(gs.chain, 1.01 * bc).eigenvalues.minCoeff() > 0.0);
            CHECK(mode_spectrum(gs.chain, 0.99 * bc).eigenvalues.minCoeff() < 0.0);
            CHECK(mode_spectrum(gs.chain, 0.99 * bc).unstable);
            CHECK_FALSE(mode_spectrum(gs.chain, 1.01 * bc).unstable);
        }
    }
}

TEST_CASE("mode spectrum") {
    const auto one = mode_spectrum(IonChain({0.0}), 0.8);
    CHECK(one.frequencies.size() == 1);
    CHECK(one.frequencies[0] == doctest::Approx(0.8));

    const auto two = mode_spectrum(ground_state(2, PotentialSpec::quartic()).chain, 1.0);
    CHECK(two.eigenvalues[0] == doctest::Approx(1 - 0.574349).epsilon(1e-6));
    CHECK(two.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(two.frequencies[0] == doctest::Approx(0.65241).epsilon(1e-5));
    CHECK(two.frequencies[1] == doctest::Approx(1.0).epsilon(1e-12));

    const auto gs = ground_state(20, PotentialSpec::quartic());
    const double bc = critical_beta(gs.chain).beta_c;
    const auto at = mode_spectrum(gs.chain, bc);
    CHECK(std::abs(at.eigenvalues.minCoeff()) < 1e-8 * at.eigenvalues.cwiseAbs().maxCoeff());

    CHECK_THROWS_AS(mode_spectrum(gs.chain, 0.0), DomainError);
    CHECK_THROWS_AS(mode_spectrum(gs.chain, NAN), DomainError);
}

TEST_CASE("shift identity and orthonormality") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ub(0.1, 5.0);
    const auto gs = ground_state(30, PotentialSpec::quartic());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(transverse_hessian_base(gs.chain).entries);
    for (int trial = 0; trial < 5; ++trial) {
        const double beta = ub(rng);
        const auto m = mode_spectrum(gs.chain, beta);
        const Eigen::VectorXd shifted = es.eigenvalues().array() + beta * beta;
        CHECK((m.eigenvalues - shifted).cwiseAbs().maxCoeff() < 1e-10 * shifted.cwiseAbs().maxCoeff());
        const Eigen::MatrixXd gram = m.eigenvectors.transpose() * m.eigenvectors;
        CHECK((gram - Eigen::MatrixXd::Identity(30, 30)).cwiseAbs().maxCoeff() < 1e-12);
        for (Eigen::Index k = 0; k < m.frequencies.size(); ++k) {
            CHECK(m.frequencies[k] == doctest::Approx(std::sqrt(std::max(m.eigenvalues[k], 0.0))));
        }
    }
}

TEST_CASE("zigzag mode alternates in the quartic trap") {
    for (int n = 4; n <= 100; n += 8) {
        const auto gs = ground_state(n, PotentialSpec::quartic());
        const auto z = critical_beta(gs.chain);
        CAPTURE(n);
        CHECK(sign_changes(z.mode) == n - 1);
    }
}

TEST_CASE("sign changes with a noise floor") {
    Eigen::VectorXd v(5);
    v << 1.0, -1.0, 1e-17, -1e-17, 1.0;
    CHECK(sign_changes(v) == 4);
    CHECK(sign_changes(v, 1e-10) == 2);
    CHECK(resolved_components(v, 1e-10) == 3);
    CHECK(sign_changes(Eigen::VectorXd()) == 0);
}

TEST_CASE("beta_c scan") {
    const int two[] = {2};
    const auto s = beta_c_scan(two, PotentialSpec::quartic());
    REQUIRE(s.rows.size() == 1);
    CHECK(s.rows[0].beta_c == doctest::Approx(0.757858).epsilon(1e-6));
    CHECK_FALSE(s.fit.has_value());
    const int one[] = {1};
    CHECK_THROWS_AS(beta_c_scan(one, PotentialSpec::quartic()), DomainError);
}

TEST_CASE("beta_c tracks the minimum spacing") {
    // Near the chain centre the critical mode is an alternating pattern set by the local spacing,
    // so beta_c * dz_min^{3/2} stays within a modest band as N grows.
    const int ns[] = {20, 60, 120, 200, 300};
    const auto s = beta_c_scan(ns, PotentialSpec::quartic());
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : s.rows) {
        REQUIRE(r.ok);
        const double v = r.beta_c * std::pow(r.dz_min, 1.5);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo < 1.5);
}
