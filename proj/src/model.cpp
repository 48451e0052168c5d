#include "ccl/model.hpp"

#include <cmath>
#include <sstream>

namespace ccl {

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

// (a^p - b^p) / p without forming the two large powers separately.
double trap_difference(double a, double b, int p) {
    double sum = 0.0;
    for (int k = 0; k < p; ++k) sum += ipow(a, k) * ipow(b, p - 1 - k);
    return (a - b) * sum / p;
}

}  // namespace

PotentialSpec::PotentialSpec(int exponent) : exponent_(exponent) {
    if (exponent < 2 || exponent % 2 != 0) {
        throw DomainError("trap exponent must be an even integer >= 2, got " + std::to_string(exponent));
    }
}

double PotentialSpec::trap_energy(double z) const { return ipow(z, exponent_) / exponent_; }

double PotentialSpec::trap_force(double z) const { return ipow(z, exponent_ - 1); }

double PotentialSpec::trap_curvature(double z) const {
    return (exponent_ - 1) * ipow(z, exponent_ - 2);
}

IonChain::IonChain(std::vector<double> positions, double min_gap) : z_(std::move(positions)) {
    if (auto why = validate(z_, min_gap); !why.empty()) throw InvalidChainError(why);
}

std::string IonChain::validate(std::span<const double> positions, double min_gap) {
    if (positions.empty()) return "ion chain must contain at least one ion";
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!std::isfinite(positions[i])) {
            std::ostringstream os;
            os << "non-finite position at index " << i;
            return os.str();
        }
    }
    for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
        const double gap = positions[i + 1] - positions[i];
        if (!(gap > min_gap)) {
            std::ostringstream os;
            os.precision(17);
            os << "degenerate gap " << gap << " between ions " << i << " and " << i + 1
               << " (minimum " << min_gap << ")";
            return os.str();
        }
    }
    return {};
}

std::vector<double> IonChain::gaps() const {
    std::vector<double> g;
    g.reserve(z_.size() > 0 ? z_.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < z_.size(); ++i) g.push_back(z_[i + 1] - z_[i]);
    return g;
}

double total_energy(const IonChain& chain, const PotentialSpec& potential) {
    const auto z = chain.positions();
    const std::size_t n = z.size();
    double trap = 0.0;
    for (std::size_t i = 0; i < n; ++i) trap += potential.trap_energy(z[i]);
    double coulomb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) coulomb += 1.0 / (z[j] - z[i]);
    }
    return trap + coulomb;
}

std::vector<double> energy_gradient(const IonChain& chain, const PotentialSpec& potential) {
    const auto z = chain.positions();
    const std::size_t n = z.size();
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = potential.trap_force(z[i]);
    // z is ordered, so for i < j the pair pushes i towards -z and j towards +z.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = z[j] - z[i];
            const double f = 1.0 / (d * d);
            g[i] += f;
            g[j] -= f;
        }
    }
    return g;
}

double energy_difference(const IonChain& from, const IonChain& to, const PotentialSpec& potential) {
    const auto a = from.positions();
    const auto b = to.positions();
    if (a.size() != b.size()) throw DomainError("energy_difference: chains differ in length");
    const std::size_t n = a.size();
    const int p = potential.exponent();
    double trap = 0.0;
    for (std::size_t i = 0; i < n; ++i) trap += trap_difference(b[i], a[i], p);
    // 1/g' - 1/g = (g - g') / (g g')
    double coulomb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = b[i] - a[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double g0 = a[j] - a[i];
            const double g1 = b[j] - b[i];
            const double shrink = da - (b[j] - a[j]);
            coulomb += shrink / (g0 * g1);
        }
    }
    return trap + coulomb;
}

double directional_curvature(const IonChain& chain, const PotentialSpec& potential,
                             std::span<const double> direction) {
    const auto z = chain.positions();
    const std::size_t n = z.size();
    if (direction.size() != n) throw DomainError("directional_curvature: direction has wrong length");
    double trap = 0.0;
    for (std::size_t i = 0; i < n; ++i) trap += potential.trap_curvature(z[i]) * direction[i] * direction[i];
    double coulomb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = z[j] - z[i];
            const double dd = direction[j] - direction[i];
            coulomb += 2.0 * dd * dd / (d * d * d);
        }
    }
    return trap + coulomb;
}

TransverseHessianBase transverse_hessian_base(const IonChain& chain) {
    const auto z = chain.positions();
    const auto n = static_cast<Eigen::Index>(z.size());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = z[j] - z[i];
            const double c = 1.0 / (d * d * d);
            b(i, j) = c;
            b(j, i) = c;
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j != i) row += b(i, j);
        }
        b(i, i) = -row;
    }
    return {std::move(b)};
}

}  // namespace ccl
