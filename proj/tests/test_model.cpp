#include <doctest.h>

#include <cmath>
#include <random>

#include "ccl/model.hpp"
#include "oracles.hpp"

using namespace ccl;

namespace {

std::vector<double> two_ion(double d) { return {-d / 2, d / 2}; }

}  // namespace

TEST_CASE("potential exponent must be even and at least 2") {
    CHECK_THROWS_AS(PotentialSpec(0), DomainError);
    CHECK_THROWS_AS(PotentialSpec(3), DomainError);
    CHECK_THROWS_AS(PotentialSpec(-2), DomainError);
    CHECK_NOTHROW(PotentialSpec(6));
    const auto q = PotentialSpec::quartic();
    CHECK(q.trap_energy(2.0) == doctest::Approx(4.0));
    CHECK(q.trap_force(2.0) == doctest::Approx(8.0));
    CHECK(q.trap_curvature(2.0) == doctest::Approx(12.0));
}

TEST_CASE("chain validation") {
    CHECK_THROWS_AS(IonChain({}), InvalidChainError);
    CHECK_THROWS_AS(IonChain({1.0, 0.0}), InvalidChainError);
    CHECK_THROWS_AS(IonChain({0.0, 0.0}), InvalidChainError);
    CHECK_THROWS_AS(IonChain({0.0, 1e-13}), InvalidChainError);
    CHECK_THROWS_AS(IonChain({0.0, NAN}), InvalidChainError);
    CHECK_NOTHROW(IonChain({0.0, 1e-11}));
    CHECK(IonChain::validate(std::vector<double>{0.0, 1.0}).empty());
    CHECK_FALSE(IonChain::validate(std::vector<double>{1.0, 0.0}).empty());

    IonChain c({0.0, 1.0, 3.0});
    CHECK(c.half_length() == 1.5);
    CHECK(c.gaps() == std::vector<double>{1.0, 2.0});
}

TEST_CASE("total energy examples") {
    CHECK(total_energy(IonChain({0.0}), PotentialSpec::quartic()) == 0.0);

    const double d4 = std::pow(8.0, 0.2);
    CHECK(total_energy(IonChain(two_ion(d4)), PotentialSpec::quartic()) == doctest::Approx(0.8246924).epsilon(1e-7));
    CHECK(total_energy(IonChain(two_ion(d4)), PotentialSpec::quartic()) ==
          doctest::Approx(std::pow(d4, 4) / 32 + 1 / d4).epsilon(1e-15));

    const double d2 = std::cbrt(2.0);
    CHECK(total_energy(IonChain(two_ion(d2)), PotentialSpec::quadratic()) == doctest::Approx(1.1905507).epsilon(1e-7));
}

TEST_CASE("energy agrees with the direct transcription") {
    std::mt19937_64 rng(11);
    for (int n : {1, 2, 5, 30}) {
        for (int p : {2, 4, 6}) {
            const auto z = oracle::random_chain(rng, n);
            CHECK(total_energy(IonChain(z), PotentialSpec(p)) == doctest::Approx(oracle::energy(z, p)).epsilon(1e-13));
        }
    }
}

TEST_CASE("energy is reflection invariant") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto z = oracle::random_chain(rng, 2 + trial);
        for (double& x : z) x += 0.17;  // off-centre
        std::vector<double> r(z.rbegin(), z.rend());
        for (double& x : r) x = -x;
        for (int p : {2, 4}) {
            CHECK(total_energy(IonChain(z), PotentialSpec(p)) ==
                  doctest::Approx(total_energy(IonChain(r), PotentialSpec(p))).epsilon(1e-14));
        }
    }
}

TEST_CASE("energy diverges as two ions approach") {
    double prev = 0.0;
    for (double gap : {1e-1, 1e-3, 1e-5, 1e-7, 1e-9}) {
        const double e = total_energy(IonChain({-1.0, 0.0, gap, 1.0}), PotentialSpec::quartic());
        CHECK(e > prev);
        prev = e;
    }
    CHECK(prev > 1e8);
}

TEST_CASE("gradient examples") {
    const auto g1 = energy_gradient(IonChain({1.0}), PotentialSpec::quartic());
    REQUIRE(g1.size() == 1);
    CHECK(g1[0] == 1.0);

    const auto g2 = energy_gradient(IonChain(two_ion(std::pow(8.0, 0.2))), PotentialSpec::quartic());
    CHECK(std::abs(g2[0]) < 1e-10);
    CHECK(std::abs(g2[1]) < 1e-10);
}

TEST_CASE("gradient matches central finite differences") {
    std::mt19937_64 rng(7);
    for (int p : {2, 4}) {
        const auto z = oracle::random_chain(rng, 10, 0.2, 1.0);
        const auto g = energy_gradient(IonChain(z), PotentialSpec(p));
        const auto fd = oracle::central_difference_gradient(z, p);
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            num = std::max(num, std::abs(g[i] - fd[i]));
            den = std::max(den, std::abs(fd[i]));
        }
        CHECK(num / den < 1e-6);
    }
}

TEST_CASE("energy difference agrees with the plain difference and stays accurate for tiny moves") {
    std::mt19937_64 rng(5);
    const auto p = PotentialSpec::quartic();
    auto z = oracle::random_chain(rng, 12, 0.2, 0.8);
    auto w = z;
    for (double& x : w) x *= 1.01;
    CHECK(energy_difference(IonChain(z), IonChain(w), p) ==
          doctest::Approx(total_energy(IonChain(w), p) - total_energy(IonChain(z), p)).epsilon(1e-10));

    // Along the gradient, dE ~ -t |g|^2 for small t; the difference form keeps this below roundoff of E.
    const auto g = energy_gradient(IonChain(z), p);
    double g2 = 0.0;
    for (double x : g) g2 += x * x;
    const double t = 1e-12;
    auto v = z;
    for (std::size_t i = 0; i < z.size(); ++i) v[i] -= t * g[i];
    CHECK(energy_difference(IonChain(z), IonChain(v), p) == doctest::Approx(-t * g2).epsilon(1e-3));
}

TEST_CASE("directional curvature matches a second difference of the energy") {
    std::mt19937_64 rng(9);
    const auto z = oracle::random_chain(rng, 8, 0.3, 1.0);
    std::vector<double> d(z.size());
    std::normal_distribution<double> nd;
    for (double& x : d) x = nd(rng);
    for (int p : {2, 4}) {
        const double h = 1e-4;
        auto up = z, down = z;
        for (std::size_t i = 0; i < z.size(); ++i) {
            up[i] += h * d[i];
            down[i] -= h * d[i];
        }
        const double fd = (oracle::energy(up, p) - 2 * oracle::energy(z, p) + oracle::energy(down, p)) / (h * h);
        CHECK(directional_curvature(IonChain(z), PotentialSpec(p), d) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("transverse Hessian base") {
    const double d = 1.7;
    const auto b = transverse_hessian_base(IonChain(two_ion(d))).entries;
    const double c = 1 / (d * d * d);
    CHECK(b(0, 0) == doctest::Approx(-c));
    CHECK(b(0, 1) == doctest::Approx(c));
    CHECK(b(1, 0) == doctest::Approx(c));
    CHECK(b(1, 1) == doctest::Approx(-c));

    const auto b3 = transverse_hessian_base(IonChain({-1.045640, 0.0, 1.045640})).entries;
    for (int r = 0; r < 3; ++r) CHECK(std::abs(b3.row(r).sum()) < 1e-14);

    std::mt19937_64 rng(13);
    const auto z = oracle::random_chain(rng, 9);
    const auto lib = transverse_hessian_base(IonChain(z)).entries;
    const auto ref = oracle::transverse_hessian(z, 0.0);
    CHECK((lib - ref).cwiseAbs().maxCoeff() < 1e-12 * ref.cwiseAbs().maxCoeff());
}
