#pragma once

#include <numbers>
#include <optional>

#include "ccl/model.hpp"

namespace ccl {

inline constexpr double kEulerGamma = std::numbers::egamma;  // 0.57721566490153286...

/// Local-density trial profiles for the axial line density n(z).
enum class AnsatzFamily {
    InvertedParabola,  // (3/4)(N/L)(1 - z^2/L^2), harmonic trap
    InvertedQuartic,   // (5/8)(N/L)(1 - z^4/L^4), quartic trap
};

const char* to_string(AnsatzFamily family);

/// The ansatz matched to a trap exponent, if one exists (p = 2 or p = 4).
std::optional<AnsatzFamily> family_for(const PotentialSpec& potential);

/// Trap exponent the family was built for.
int trap_exponent(AnsatzFamily family);

struct VariationalSolution {
    AnsatzFamily family;
    int n;
    double l_min;  // optimal half-length
    double e_min;  // energy at l_min
};

struct QuadratureOptions {
    double relative_tolerance = 1e-4;
    // tanh-sinh halves its step this many times at most before giving up.
    std::size_t max_refinements = 15;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

double ansatz_density(double z, int n, double half_length, AnsatzFamily family);

/// Logarithmic factor of the optimal half-length; positive iff a minimum exists.
///   parabola: gamma - 13/5 + ln(6N)
///   quartic:  gamma + pi/2 - 85/18 + ln(10N)
double log_bracket(int n, AnsatzFamily family);

/// Closed-form functional E(L) = N L^4/36 + (5/9)(N^2/L)[gamma + pi/2 - 85/18 + ln(10N)].
/// Only the inverted-quartic family has this form available.
double closed_form_energy_of_L(int n, double half_length, AnsatzFamily family);

/// L_min and E_min from the closed forms:
///   parabola: L^3 = 3N[...], E = (3/10) N L^2
///   quartic:  L^5 = 5N[...], E = (5/36) N L^4
VariationalSolution optimal_solution(int n, AnsatzFamily family);

/// Direct quadrature of the local-density energy functional
///
///   E[n] = int dz { z^p/p n(z) + gamma n(z)^2
///                   - (1/2) n(z) int_0^inf dy ln[y n(z)] d/dy [n(z-y) + n(z+y)] }
///
/// for the given ansatz. The inner integral is split where z +- y leaves the support, so each
/// piece is smooth apart from the integrable ln(y) endpoint behaviour, and both levels use
/// tanh-sinh quadrature, which never samples the endpoints. Throws QuadratureError when the
/// outer estimate's error exceeds the requested tolerance.
double functional_energy_numeric(int n, double half_length, AnsatzFamily family,
                                 const QuadratureOptions& quadrature = {});

}  // namespace ccl
