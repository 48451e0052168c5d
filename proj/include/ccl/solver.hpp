#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "ccl/model.hpp"

namespace ccl {

/// Backtracking parameters. The first trial step is the one-dimensional Newton step along the
/// search direction when the curvature there is positive, otherwise `initial_step / max|d|`.
struct LineSearchOptions {
    double initial_step = 1.0;
    double contraction = 0.5;
    double sufficient_decrease = 1e-4;
    int max_backtracks = 60;
};

/// Snapshot passed to SolverOptions::observer after every accepted step.
struct IterateInfo {
    std::int64_t iteration;
    double energy;
    double energy_change;  // accurate difference form, never positive for an accepted step
    double gradient_max_norm;
    double step;
    bool restarted;
    const IonChain* chain;
};

struct SolverOptions {
    double gradient_tolerance = 1e-10;  // on the max-norm of the gradient
    std::int64_t max_iterations = 1'000'000;
    std::int64_t restart_period = 0;  // 0 means N
    LineSearchOptions line_search{};
    double min_gap = kDefaultMinGap;
    std::function<void(const IterateInfo&)> observer{};

    void validate() const;
};

struct GroundStateResult {
    IonChain chain;
    double energy = 0.0;
    double gradient_max_norm = 0.0;
    std::int64_t iterations = 0;
    bool converged = false;
    // Set by ground_state when z_i = -z_{N+1-i} fails by more than 1e-6 of the half-length.
    bool asymmetric = false;
    std::string diagnostics{};
};

/// Storage hook consulted by ground_state. The command-line tool provides a file-backed one.
class GroundStateCache {
public:
    virtual ~GroundStateCache() = default;
    virtual std::optional<GroundStateResult> lookup(int exponent, int n, double gradient_tolerance) = 0;
    virtual void store(int exponent, int n, double gradient_tolerance, const GroundStateResult& result) = 0;
};

/// N ions evenly spaced over [-L_min, L_min], L_min taken from the variational closed form.
IonChain initial_guess(int n, const PotentialSpec& potential);

/// Polak-Ribiere conjugate gradients with Armijo backtracking restricted to ordered chains.
GroundStateResult minimize(const IonChain& start, const PotentialSpec& potential, const SolverOptions& opts = {});

/// initial_guess -> minimize -> reflection-symmetry check, with optional caching.
GroundStateResult ground_state(int n, const PotentialSpec& potential, const SolverOptions& opts = {},
                               GroundStateCache* cache = nullptr);

/// Largest |z_i + z_{N+1-i}| relative to the chain half-length (0 for a single ion).
double reflection_asymmetry(const IonChain& chain);

}  // namespace ccl
