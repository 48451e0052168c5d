#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccl/solver.hpp"

namespace ccl {

struct DensitySample {
    double z;
    double n;
};

/// n(z_i) = 1 / (z_{i+1} - z_i) attached to the left ion of each gap; N-1 samples.
struct DensityProfile {
    std::vector<DensitySample> samples;
};

struct PowerLawFit {
    double prefactor;
    double exponent;
    double r_squared;
    std::pair<double, double> n_range;

    double operator()(double n) const;
};

struct PeakLocation {
    double z_peak;    // |z| of the densest sample
    double fraction;  // z_peak / z_N
};

/// Fits below this N are dropped by the scan drivers; the scaling laws are large-N statements.
inline constexpr int kMinFitN = 10;

DensityProfile local_density(const IonChain& chain);

double min_spacing(const IonChain& chain);

/// Ties go to the smaller |z|. The outermost position is taken as the largest |z| over the
/// samples plus the final ion, so the fraction is relative to the chain end.
PeakLocation peak_location(const DensityProfile& profile, double outer_position);
PeakLocation peak_location(const IonChain& chain);

/// Ordinary least squares of ln y against ln N.
PowerLawFit power_law_fit(std::span<const std::pair<double, double>> points);

/// Coefficient of variation (population standard deviation / mean) of the adjacent gaps.
double spacing_uniformity(const IonChain& chain);

struct ScanRow {
    int n = 0;
    bool ok = false;
    std::string error{};  // solver error or non-convergence diagnostics when !ok
    double energy = 0.0;
    double dz_min = 0.0;
    double half_length = 0.0;
    double peak_fraction = 0.0;
    double uniformity = 0.0;  // NaN for N = 2 (a single gap)
    std::int64_t iterations = 0;
};

struct ScanOptions {
    SolverOptions solver{};
    unsigned threads = 0;  // 0: hardware concurrency
    GroundStateCache* cache = nullptr;
};

/// One row per requested N, in input order. Rows are solved concurrently when threads > 1.
std::vector<ScanRow> scan(std::span<const int> ns, const PotentialSpec& potential, const ScanOptions& opts = {});

/// (N, y) pairs from rows that succeeded, N >= kMinFitN.
std::vector<std::pair<double, double>> fit_points(const std::vector<ScanRow>& rows, double ScanRow::*column);

/// Runs `job(i)` for i in [0, count) on up to `threads` workers (0 = hardware concurrency).
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job);

}  // namespace ccl
