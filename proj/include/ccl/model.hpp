#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ccl {

/// Base for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Chain with coincident, misordered or nearly coincident ions.
class InvalidChainError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

inline constexpr double kDefaultMinGap = 1e-12;

/// Axial trap z^p / p in rescaled units. p = 2 is the harmonic trap, p = 4 the quartic one.
class PotentialSpec {
public:
    explicit PotentialSpec(int exponent);

    static PotentialSpec quadratic() { return PotentialSpec(2); }
    static PotentialSpec quartic() { return PotentialSpec(4); }

    int exponent() const { return exponent_; }

    double trap_energy(double z) const;
    double trap_force(double z) const;      // d/dz of trap_energy
    double trap_curvature(double z) const;  // d2/dz2 of trap_energy

    bool operator==(const PotentialSpec&) const = default;

private:
    int exponent_;
};

/// Strictly increasing axial positions of N >= 1 ions.
class IonChain {
public:
    explicit IonChain(std::vector<double> positions, double min_gap = kDefaultMinGap);

    std::size_t size() const { return z_.size(); }
    std::span<const double> positions() const { return z_; }
    double operator[](std::size_t i) const { return z_[i]; }
    double front() const { return z_.front(); }
    double back() const { return z_.back(); }

    /// (z_N - z_1) / 2
    double half_length() const { return 0.5 * (z_.back() - z_.front()); }

    std::vector<double> gaps() const;

    /// Returns an empty string when the positions form a valid chain, otherwise the reason.
    static std::string validate(std::span<const double> positions, double min_gap = kDefaultMinGap);

private:
    std::vector<double> z_;
};

/// Transverse Hessian of the linear chain without the beta^2 diagonal term:
/// B_mn = 1/|z_m - z_n|^3 for m != n, B_nn = -sum_{p != n} B_pn.
struct TransverseHessianBase {
    Eigen::MatrixXd entries;
};

// Summation order for every pair sum below: outer index i ascending, inner j = i+1 ascending.
// Trap terms are accumulated first in index order. Results are therefore bit-reproducible.

double total_energy(const IonChain& chain, const PotentialSpec& potential);

std::vector<double> energy_gradient(const IonChain& chain, const PotentialSpec& potential);

/// E(to) - E(from) evaluated term by term in difference form, so that it stays accurate
/// when the difference is many orders of magnitude below E itself.
double energy_difference(const IonChain& from, const IonChain& to, const PotentialSpec& potential);

/// Second directional derivative d^T H d of the axial energy.
double directional_curvature(const IonChain& chain, const PotentialSpec& potential,
                             std::span<const double> direction);

TransverseHessianBase transverse_hessian_base(const IonChain& chain);

}  // namespace ccl
