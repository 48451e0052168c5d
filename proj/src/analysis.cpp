#include "ccl/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace ccl {

double PowerLawFit::operator()(double n) const { return prefactor * std::pow(n, exponent); }

DensityProfile local_density(const IonChain& chain) {
    if (chain.size() < 2) throw DomainError("local density needs at least two ions");
    DensityProfile profile;
    profile.samples.reserve(chain.size() - 1);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        profile.samples.push_back({chain[i], 1.0 / (chain[i + 1] - chain[i])});
    }
    return profile;
}

double min_spacing(const IonChain& chain) {
    if (chain.size() < 2) throw DomainError("minimum spacing needs at least two ions");
    const auto g = chain.gaps();
    return *std::min_element(g.begin(), g.end());
}

PeakLocation peak_location(const DensityProfile& profile, double outer_position) {
    if (profile.samples.empty()) throw DomainError("peak location of an empty density profile");
    const DensitySample* best = &profile.samples.front();
    for (const auto& s : profile.samples) {
        if (s.n > best->n || (s.n == best->n && std::abs(s.z) < std::abs(best->z))) best = &s;
    }
    const double z_peak = std::abs(best->z);
    return {z_peak, outer_position > 0.0 ? z_peak / outer_position : 0.0};
}

PeakLocation peak_location(const IonChain& chain) { return peak_location(local_density(chain), chain.back()); }

PowerLawFit power_law_fit(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) throw DomainError("power-law fit needs at least three points");
    double n_lo = std::numeric_limits<double>::infinity();
    double n_hi = -n_lo;
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [n, y] : points) {
        if (!(n > 0.0) || !(y > 0.0)) throw DomainError("power-law fit needs strictly positive data");
        mx += std::log(n);
        my += std::log(y);
        n_lo = std::min(n_lo, n);
        n_hi = std::max(n_hi, n);
    }
    const double count = static_cast<double>(points.size());
    mx /= count;
    my /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [n, y] : points) {
        const double dx = std::log(n) - mx;
        const double dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw DomainError("power-law fit needs at least two distinct N");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss_res = 0.0;
    for (const auto& [n, y] : points) {
        const double r = std::log(y) - (intercept + slope * std::log(n));
        ss_res += r * r;
    }
    double r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    r2 = std::clamp(r2, 0.0, 1.0);
    return {std::exp(intercept), slope, r2, {n_lo, n_hi}};
}

double spacing_uniformity(const IonChain& chain) {
    if (chain.size() < 3) throw DomainError("spacing uniformity needs at least three ions");
    const auto g = chain.gaps();
    double mean = 0.0;
    for (double x : g) mean += x;
    mean /= static_cast<double>(g.size());
    double var = 0.0;
    for (double x : g) var += (x - mean) * (x - mean);
    var /= static_cast<double>(g.size());
    return std::sqrt(var) / mean;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) job(i);
        });
    }
}

std::vector<ScanRow> scan(std::span<const int> ns, const PotentialSpec& potential, const ScanOptions& opts) {
    for (int n : ns) {
        if (n < 2) throw DomainError("scan needs N >= 2 for every row");
    }
    std::vector<ScanRow> rows(ns.size());
    parallel_for(ns.size(), opts.threads, [&](std::size_t k) {
        ScanRow& row = rows[k];
        row.n = ns[k];
        try {
            const GroundStateResult gs = ground_state(row.n, potential, opts.solver, opts.cache);
            row.energy = gs.energy;
            row.dz_min = min_spacing(gs.chain);
            row.half_length = gs.chain.half_length();
            row.peak_fraction = peak_location(gs.chain).fraction;
            row.uniformity = row.n >= 3 ? spacing_uniformity(gs.chain) : std::numeric_limits<double>::quiet_NaN();
            row.iterations = gs.iterations;
            row.ok = gs.converged;
            if (!gs.converged) row.error = gs.diagnostics;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    });
    return rows;
}

std::vector<std::pair<double, double>> fit_points(const std::vector<ScanRow>& rows, double ScanRow::*column) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
        if (r.ok && r.n >= kMinFitN) pts.emplace_back(r.n, r.*column);
    }
    return pts;
}

}  // namespace ccl
