#include "ccl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ccl/variational.hpp"

namespace ccl {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct Step {
    std::optional<IonChain> chain;
    double energy_change = 0.0;
    double alpha = 0.0;
};

// Backtracking along d from x. Trial points that leave the ordered domain count as +inf.
Step backtrack(const IonChain& x, std::span<const double> d, double slope, const PotentialSpec& potential,
               const SolverOptions& opts) {
    const auto& ls = opts.line_search;
    const double curvature = directional_curvature(x, potential, d);
    double alpha = curvature > 0.0 ? -slope / curvature : ls.initial_step / max_abs(d);
    if (!std::isfinite(alpha) || alpha <= 0.0) alpha = ls.initial_step / max_abs(d);

    const auto z = x.positions();
    std::vector<double> trial(z.size());
    for (int k = 0; k <= ls.max_backtracks; ++k, alpha *= ls.contraction) {
        for (std::size_t i = 0; i < z.size(); ++i) trial[i] = z[i] + alpha * d[i];
        if (!IonChain::validate(trial, opts.min_gap).empty()) continue;
        IonChain candidate(trial, opts.min_gap);
        const double change = energy_difference(x, candidate, potential);
        if (change <= ls.sufficient_decrease * alpha * slope) return {std::move(candidate), change, alpha};
    }
    return {};
}

}  // namespace

void SolverOptions::validate() const {
    if (!(gradient_tolerance > 0.0)) throw DomainError("gradient_tolerance must be positive");
    if (max_iterations < 1) throw DomainError("max_iterations must be positive");
    if (restart_period < 0) throw DomainError("restart_period must be positive (or 0 for N)");
    if (!(min_gap > 0.0)) throw DomainError("min_gap must be positive");
    if (!(line_search.initial_step > 0.0)) throw DomainError("line search initial_step must be positive");
    if (!(line_search.contraction > 0.0 && line_search.contraction < 1.0)) {
        throw DomainError("line search contraction must lie in (0, 1)");
    }
    if (!(line_search.sufficient_decrease > 0.0 && line_search.sufficient_decrease < 0.5)) {
        throw DomainError("line search sufficient_decrease must lie in (0, 0.5)");
    }
    if (line_search.max_backtracks < 1) throw DomainError("line search max_backtracks must be positive");
}

IonChain initial_guess(int n, const PotentialSpec& potential) {
    if (n < 1) throw DomainError("ion number must be positive");
    if (n == 1) return IonChain({0.0});
    double half = 0.0;
    if (auto family = family_for(potential)) {
        half = optimal_solution(n, *family).l_min;
    } else {
        // No closed form for higher exponents; balance the trap force at the edge against ~N ln N
        // Coulomb pressure, which lands within a factor of a few of the true extent.
        const int p = potential.exponent();
        half = std::max(1.0, std::pow(p * n * std::log(n + 1.0), 1.0 / (p + 1)));
    }
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = -half + 2.0 * half * i / (n - 1);
    // exact reflection symmetry
    for (int i = 0; i < n / 2; ++i) z[n - 1 - i] = -z[i];
    if (n % 2 == 1) z[n / 2] = 0.0;
    return IonChain(std::move(z));
}

GroundStateResult minimize(const IonChain& start, const PotentialSpec& potential, const SolverOptions& opts) {
    opts.validate();
    if (auto why = IonChain::validate(start.positions(), opts.min_gap); !why.empty()) {
        throw InvalidChainError("minimize: " + why);
    }
    const std::size_t n = start.size();
    const std::int64_t period = opts.restart_period > 0 ? opts.restart_period : static_cast<std::int64_t>(n);

    IonChain x = start;
    double energy = total_energy(x, potential);
    std::vector<double> g = energy_gradient(x, potential);
    double gmax = max_abs(g);

    GroundStateResult result{x, energy, gmax, 0, gmax <= opts.gradient_tolerance, false, {}};
    if (result.converged) return result;

    std::vector<double> d(n);
    std::transform(g.begin(), g.end(), d.begin(), std::negate<>());
    std::int64_t since_restart = 0;
    std::int64_t iter = 0;
    bool stalled = false;

    while (iter < opts.max_iterations) {
        ++iter;
        bool restarted = false;
        double slope = dot(g, d);
        if (slope >= 0.0) {
            std::transform(g.begin(), g.end(), d.begin(), std::negate<>());
            slope = -dot(g, g);
            restarted = true;
        }
        Step step = backtrack(x, d, slope, potential, opts);
        if (!step.chain && !restarted) {
            std::transform(g.begin(), g.end(), d.begin(), std::negate<>());
            slope = -dot(g, g);
            restarted = true;
            step = backtrack(x, d, slope, potential, opts);
        }
        if (!step.chain) {
            stalled = true;
            break;
        }

        x = std::move(*step.chain);
        energy += step.energy_change;
        std::vector<double> g_new = energy_gradient(x, potential);
        gmax = max_abs(g_new);
        if (opts.observer) {
            opts.observer({iter, energy, step.energy_change, gmax, step.alpha, restarted, &x});
        }
        if (gmax <= opts.gradient_tolerance) {
            g = std::move(g_new);
            break;
        }

        since_restart = restarted ? 1 : since_restart + 1;
        double beta = 0.0;
        if (since_restart < period) {
            double num = 0.0;
            for (std::size_t i = 0; i < n; ++i) num += g_new[i] * (g_new[i] - g[i]);
            beta = std::max(0.0, num / dot(g, g));
        } else {
            since_restart = 0;
        }
        for (std::size_t i = 0; i < n; ++i) d[i] = -g_new[i] + beta * d[i];
        g = std::move(g_new);
    }

    result.chain = x;
    result.energy = total_energy(x, potential);
    result.gradient_max_norm = gmax;
    result.iterations = iter;
    result.converged = gmax <= opts.gradient_tolerance;
    if (!result.converged) {
        std::ostringstream os;
        os.precision(6);
        os << (stalled ? "line search stalled" : "iteration limit reached") << " after " << iter
           << " iterations; gradient max-norm " << gmax << " > tolerance " << opts.gradient_tolerance;
        result.diagnostics = os.str();
    }
    return result;
}

double reflection_asymmetry(const IonChain& chain) {
    const std::size_t n = chain.size();
    if (n < 2) return std::abs(chain[0]);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(chain[i] + chain[n - 1 - i]));
    return worst / chain.half_length();
}

GroundStateResult ground_state(int n, const PotentialSpec& potential, const SolverOptions& opts,
                               GroundStateCache* cache) {
    if (n < 1) throw DomainError("ion number must be positive");
    if (cache) {
        if (auto hit = cache->lookup(potential.exponent(), n, opts.gradient_tolerance);
            hit && hit->chain.size() == static_cast<std::size_t>(n)) {
            return *hit;
        }
    }
    GroundStateResult result = minimize(initial_guess(n, potential), potential, opts);
    result.asymmetric = reflection_asymmetry(result.chain) > 1e-6;
    if (cache && result.converged) cache->store(potential.exponent(), n, opts.gradient_tolerance, result);
    return result;
}

}  // namespace ccl
