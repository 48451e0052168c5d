#include "ccl/variational.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace ccl {

namespace {

double prefactor(AnsatzFamily family) {
    return family == AnsatzFamily::InvertedParabola ? 3.0 / 4.0 : 5.0 / 8.0;
}

double density_slope(double z, int n, double half_length, AnsatzFamily family) {
    if (!(std::abs(z) < half_length)) return 0.0;
    const int p = trap_exponent(family);
    const double u = z / half_length;
    return -prefactor(family) * n / (half_length * half_length) * p * std::pow(u, p - 1);
}

void check_args(int n, double half_length) {
    if (n < 1) throw DomainError("ion number must be positive");
    if (!(half_length > 0.0) || !std::isfinite(half_length)) {
        throw DomainError("half-length must be positive and finite");
    }
}

}  // namespace

const char* to_string(AnsatzFamily family) {
    return family == AnsatzFamily::InvertedParabola ? "inverted-parabola" : "inverted-quartic";
}

std::optional<AnsatzFamily> family_for(const PotentialSpec& potential) {
    switch (potential.exponent()) {
        case 2: return AnsatzFamily::InvertedParabola;
        case 4: return AnsatzFamily::InvertedQuartic;
        default: return std::nullopt;
    }
}

int trap_exponent(AnsatzFamily family) { return family == AnsatzFamily::InvertedParabola ? 2 : 4; }

double ansatz_density(double z, int n, double half_length, AnsatzFamily family) {
    check_args(n, half_length);
    if (!(std::abs(z) < half_length)) return 0.0;
    const double u = z / half_length;
    const double shape = family == AnsatzFamily::InvertedParabola ? 1.0 - u * u : 1.0 - u * u * u * u;
    return std::max(0.0, prefactor(family) * n / half_length * shape);
}

double log_bracket(int n, AnsatzFamily family) {
    if (n < 1) throw DomainError("ion number must be positive");
    const double nn = n;
    if (family == AnsatzFamily::InvertedParabola) return kEulerGamma - 13.0 / 5.0 + std::log(6.0 * nn);
    return kEulerGamma + std::numbers::pi / 2.0 - 85.0 / 18.0 + std::log(10.0 * nn);
}

double closed_form_energy_of_L(int n, double half_length, AnsatzFamily family) {
    if (family != AnsatzFamily::InvertedQuartic) {
        throw DomainError("closed-form E(L) is only available for the inverted-quartic ansatz");
    }
    check_args(n, half_length);
    const double nn = n;
    const double l4 = half_length * half_length * half_length * half_length;
    return nn * l4 / 36.0 + 5.0 / 9.0 * nn * nn / half_length * log_bracket(n, family);
}

VariationalSolution optimal_solution(int n, AnsatzFamily family) {
    const double bracket = log_bracket(n, family);
    if (!(bracket > 0.0)) {
        throw DomainError("no variational minimum for N = " + std::to_string(n) + " (" + to_string(family) +
                          " log factor is " + std::to_string(bracket) + ")");
    }
    const double nn = n;
    if (family == AnsatzFamily::InvertedParabola) {
        const double l = std::cbrt(3.0 * nn * bracket);
        return {family, n, l, 0.3 * nn * l * l};
    }
    const double l = std::pow(5.0 * nn * bracket, 0.2);
    return {family, n, l, 5.0 / 36.0 * nn * l * l * l * l};
}

double functional_energy_numeric(int n, double half_length, AnsatzFamily family,
                                 const QuadratureOptions& quadrature) {
    check_args(n, half_length);
    if (!(quadrature.relative_tolerance > 0.0) || quadrature.max_refinements < 1) {
        throw DomainError("invalid quadrature options");
    }
    const double L = half_length;
    const int p = trap_exponent(family);
    const double inner_tol = quadrature.relative_tolerance * 1e-2;
    boost::math::quadrature::tanh_sinh<double> integrator(quadrature.max_refinements);

    auto n_at = [&](double z) { return ansatz_density(z, n, L, family); };
    auto slope_at = [&](double z) { return density_slope(z, n, L, family); };

    // int_0^inf ln[y n(z)] d/dy [n(z-y) + n(z+y)] dy for 0 <= z < L
    auto inner = [&](double z, double nz) {
        const double log_nz = std::log(nz);
        const double near = L - z;  // z + y leaves the support here
        const double far = L + z;   // z - y leaves the support here
        auto both = [&](double y) { return (std::log(y) + log_nz) * (slope_at(z + y) - slope_at(z - y)); };
        auto left_only = [&](double y) { return -(std::log(y) + log_nz) * slope_at(z - y); };
        double total = integrator.integrate(both, 0.0, near, inner_tol);
        if (far > near) total += integrator.integrate(left_only, near, far, inner_tol);
        return total;
    };

    auto integrand = [&](double z) {
        const double nz = n_at(z);
        if (!(nz > 0.0)) return 0.0;
        double trap = 1.0;
        for (int k = 0; k < p; ++k) trap *= z;
        return trap / p * nz + kEulerGamma * nz * nz - 0.5 * nz * inner(z, nz);
    };

    double error = 0.0;
    double l1 = 0.0;
    double half = 0.0;
    try {
        half = integrator.integrate(integrand, 0.0, L, quadrature.relative_tolerance * 1e-1, &error, &l1);
    } catch (const std::exception& e) {
        throw QuadratureError(std::string("functional quadrature failed: ") + e.what());
    }
    if (!std::isfinite(half) || error > quadrature.relative_tolerance * std::abs(half)) {
        throw QuadratureError("functional quadrature did not reach relative tolerance " +
                              std::to_string(quadrature.relative_tolerance) + " (error estimate " +
                              std::to_string(error) + ")");
    }
    // integrand is even in z
    return 2.0 * half;
}

}  // namespace ccl
