#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccl/analysis.hpp"
#include "ccl/model.hpp"

namespace ccl {

class EigensolverError : public Error {
public:
    using Error::Error;
};

struct Eigenpair {
    double value;
    Eigen::VectorXd vector;  // unit norm, first nonzero component positive
};

/// Linear-to-zigzag threshold of a linear chain. beta_c^2 = -lambda_min_base.
struct ZigzagResult {
    double beta_c;
    double lambda_min_base;
    Eigen::VectorXd mode;
};

/// Transverse normal modes at confinement beta: eigenpairs of B + beta^2 I.
struct ModeSpectrum {
    double beta;
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // columns, orthonormal
    Eigen::VectorXd frequencies;   // sqrt(max(lambda, 0))
    bool unstable;                 // some lambda < 0: the linear chain has buckled
};

Eigenpair smallest_eigenpair(const TransverseHessianBase& base);

ZigzagResult critical_beta(const IonChain& chain);

ModeSpectrum mode_spectrum(const IonChain& chain, double beta);

/// Number of sign changes between consecutive components. Components with
/// |v_i| <= noise_floor * max|v| are treated as unresolved and skipped; for the harmonic trap the
/// zigzag mode decays below double precision towards the chain ends.
int sign_changes(const Eigen::VectorXd& v, double noise_floor = 0.0);

/// Components above the noise floor, as used by sign_changes.
int resolved_components(const Eigen::VectorXd& v, double noise_floor);

struct BetaCRow {
    int n = 0;
    bool ok = false;
    std::string error{};
    double beta_c = 0.0;
    double dz_min = 0.0;
};

struct BetaCScan {
    std::vector<BetaCRow> rows;
    std::optional<PowerLawFit> fit;  // over successful rows with N >= kMinFitN, when >= 3 remain
};

BetaCScan beta_c_scan(std::span<const int> ns, const PotentialSpec& potential, const ScanOptions& opts = {});

}  // namespace ccl
