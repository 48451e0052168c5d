#include <doctest.h>

#include <cmath>
#include <random>

#include "ccl/solver.hpp"
#include "ccl/variational.hpp"
#include "oracles.hpp"

using namespace ccl;

namespace {

bool symmetric(const IonChain& c, double tol) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (std::abs(c[i] + c[c.size() - 1 - i]) > tol) return false;
    }
    return true;
}

bool strictly_increasing(const IonChain& c) {
    for (std::size_t i = 1; i < c.size(); ++i) {
        if (!(c[i] > c[i - 1])) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("solver options are validated") {
    SolverOptions o;
    CHECK_NOTHROW(o.validate());
    o.gradient_tolerance = 0.0;
    CHECK_THROWS_AS(o.validate(), DomainError);
    o = {};
    o.max_iterations = 0;
    CHECK_THROWS_AS(o.validate(), DomainError);
    o = {};
    o.line_search.contraction = 1.0;
    CHECK_THROWS_AS(o.validate(), DomainError);
}

TEST_CASE("initial guess") {
    CHECK(initial_guess(1, PotentialSpec::quartic())[0] == 0.0);

    const auto g2 = initial_guess(2, PotentialSpec::quadratic());
    const double l = optimal_solution(2, AnsatzFamily::InvertedParabola).l_min;
    CHECK(g2[0] == doctest::Approx(-l));
    CHECK(g2[1] == doctest::Approx(l));

    for (int p : {2, 4, 6}) {
        const auto g5 = initial_guess(5, PotentialSpec(p));
        CHECK(strictly_increasing(g5));
        CHECK(symmetric(g5, 0.0));
    }
    CHECK_THROWS_AS(initial_guess(0, PotentialSpec::quartic()), DomainError);
}

TEST_CASE("two- and three-ion closed forms") {
    struct Case {
        int n, p;
        double z_outer, energy;
    };
    const double d4 = std::pow(8.0, 0.2);
    const double d2 = std::cbrt(2.0);
    const double z4 = std::pow(1.25, 0.2);
    const double z2 = std::cbrt(1.25);
    const Case cases[] = {
        {2, 4, d4 / 2, std::pow(d4, 4) / 32 + 1 / d4},
        {2, 2, d2 / 2, d2 * d2 / 4 + 1 / d2},
        {3, 4, z4, std::pow(z4, 4) / 2 + 2.5 / z4},
        {3, 2, z2, z2 * z2 + 2.5 / z2},
    };
    for (const auto& c : cases) {
        CAPTURE(c.n);
        CAPTURE(c.p);
        const auto r = ground_state(c.n, PotentialSpec(c.p));
        CHECK(r.converged);
        CHECK(std::abs(r.energy - c.energy) < 1e-8);
        CHECK(std::abs(r.chain.back() - c.z_outer) < 1e-8);
        CHECK(std::abs(r.chain.front() + c.z_outer) < 1e-8);
        if (c.n == 3) CHECK(std::abs(r.chain[1]) < 1e-8);
    }
    CHECK(std::abs(ground_state(3, PotentialSpec(4)).energy - 2.988601) < 1e-6);
    CHECK(std::abs(ground_state(3, PotentialSpec(2)).energy - 3.4811916) < 1e-7);
}

TEST_CASE("two ions from an arbitrary symmetric start") {
    const auto r = minimize(IonChain({-3.0, 3.0}), PotentialSpec::quartic());
    CHECK(r.converged);
    CHECK(r.chain[1] == doctest::Approx(0.757858).epsilon(1e-6));
    CHECK(r.energy == doctest::Approx(0.8246924).epsilon(1e-7));
}

TEST_CASE("single ion") {
    const auto r = ground_state(1, PotentialSpec::quadratic());
    CHECK(r.converged);
    CHECK(r.chain.size() == 1);
    CHECK(r.chain[0] == 0.0);
    CHECK(r.energy == 0.0);
    const auto m = minimize(IonChain({0.7}), PotentialSpec::quartic());
    CHECK(m.converged);
    CHECK(std::abs(m.chain[0]) < 1e-3);
}

TEST_CASE("brute-force symmetric minimum for small chains") {
    for (int p : {2, 4}) {
        for (int n = 2; n <= 6; ++n) {
            CAPTURE(p);
            CAPTURE(n);
            const auto ref = oracle::symmetric_brute_force(n, p);
            const auto r = ground_state(n, PotentialSpec(p));
            REQUIRE(r.converged);
            CHECK(r.energy == doctest::Approx(ref.energy).epsilon(1e-11));
            for (int i = 0; i < n; ++i) CHECK(std::abs(r.chain[i] - ref.positions[i]) < 1e-6);
        }
    }
}

TEST_CASE("accepted iterates lower the energy and stay ordered") {
    for (int p : {2, 4}) {
        std::vector<double> energies;
        bool ordered = true;
        bool non_positive = true;
        SolverOptions o;
        o.observer = [&](const IterateInfo& it) {
            energies.push_back(it.energy);
            ordered = ordered && strictly_increasing(*it.chain);
            non_positive = non_positive && it.energy_change <= 0.0;
        };
        std::mt19937_64 rng(21);
        const auto start = oracle::random_chain(rng, 40, 0.05, 0.5);
        const auto r = minimize(IonChain(start), PotentialSpec(p), o);
        CHECK(r.converged);
        CHECK(ordered);
        CHECK(non_positive);
        REQUIRE(energies.size() > 2);
        int increases = 0;
        for (std::size_t i = 1; i < energies.size(); ++i) increases += energies[i] > energies[i - 1];
        CHECK(increases == 0);
        CHECK(r.energy <= oracle::energy(start, p));
    }
}

TEST_CASE("minimum is independent of the starting chain") {
    std::mt19937_64 rng(17);
    for (int p : {2, 4}) {
        for (int n : {7, 25, 50}) {
            const auto ref = ground_state(n, PotentialSpec(p));
            REQUIRE(ref.converged);
            CHECK(symmetric(ref.chain, 1e-6 * ref.chain.half_length()));
            CHECK_FALSE(ref.asymmetric);
            std::normal_distribution<double> jitter(0.0, 0.05);
            for (int trial = 0; trial < 10; ++trial) {
                std::vector<double> z(ref.chain.positions().begin(), ref.chain.positions().end());
                // perturb the gaps multiplicatively so the start stays ordered
                std::vector<double> w(n);
                w[0] = z[0] * (1 + jitter(rng)) - 0.1 * trial;
                for (int i = 1; i < n; ++i) w[i] = w[i - 1] + (z[i] - z[i - 1]) * std::exp(jitter(rng));
                const auto r = minimize(IonChain(w), PotentialSpec(p));
                REQUIRE(r.converged);
                for (int i = 0; i < n; ++i) CHECK(std::abs(r.chain[i] - ref.chain[i]) < 1e-8);
            }
        }
    }
}

TEST_CASE("iteration limit is reported, not thrown") {
    SolverOptions o;
    o.max_iterations = 3;
    const auto r = ground_state(30, PotentialSpec::quartic(), o);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 3);
    CHECK_FALSE(r.diagnostics.empty());
}

TEST_CASE("cache hook") {
    struct Memo : GroundStateCache {
        std::optional<GroundStateResult> held;
        int lookups = 0, stores = 0;
        std::optional<GroundStateResult> lookup(int, int, double) override {
            ++lookups;
            return held;
        }
        void store(int, int, double, const GroundStateResult& r) override {
            ++stores;
            held = r;
        }
    } memo;
    const auto a = ground_state(12, PotentialSpec::quartic(), {}, &memo);
    const auto b = ground_state(12, PotentialSpec::quartic(), {}, &memo);
    CHECK(memo.lookups == 2);
    CHECK(memo.stores == 1);
    CHECK(a.energy == b.energy);
}

TEST_CASE("spacing pattern at N = 20") {
    for (int p : {2, 4}) {
        const auto r = ground_state(20, PotentialSpec(p));
        const auto g = r.chain.gaps();
        CHECK(g.front() > g[g.size() / 2]);
        CHECK(g.back() > g[g.size() / 2]);
    }
}
