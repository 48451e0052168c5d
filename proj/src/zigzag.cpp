#include "ccl/zigzag.hpp"

#include <cmath>
#include <exception>

#include <Eigen/Eigenvalues>

namespace ccl {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decompose(const Eigen::MatrixXd& m, bool vectors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigensolverError("symmetric eigensolver did not converge");
    return es;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    const double scale = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12 * scale) {
            if (v[i] < 0.0) v = -v;
            return;
        }
    }
}

}  // namespace

Eigenpair smallest_eigenpair(const TransverseHessianBase& base) {
    if (base.entries.rows() == 0 || base.entries.rows() != base.entries.cols()) {
        throw DomainError("smallest_eigenpair needs a non-empty square matrix");
    }
    auto es = decompose(base.entries, true);
    Eigen::VectorXd v = es.eigenvectors().col(0).normalized();
    fix_sign(v);
    return {es.eigenvalues()[0], std::move(v)};
}

ZigzagResult critical_beta(const IonChain& chain) {
    if (chain.size() < 2) throw DomainError("zigzag threshold needs at least two ions");
    auto [lambda, mode] = smallest_eigenpair(transverse_hessian_base(chain));
    if (!(lambda < 0.0)) {
        throw Error("transverse Hessian has no negative eigenvalue; the input is not a valid linear chain");
    }
    return {std::sqrt(-lambda), lambda, std::move(mode)};
}

ModeSpectrum mode_spectrum(const IonChain& chain, double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive and finite");
    Eigen::MatrixXd a = transverse_hessian_base(chain).entries;
    a.diagonal().array() += beta * beta;
    auto es = decompose(a, true);
    ModeSpectrum out{beta, es.eigenvalues(), es.eigenvectors(), {}, false};
    for (Eigen::Index k = 0; k < out.eigenvectors.cols(); ++k) fix_sign(out.eigenvectors.col(k));
    out.frequencies = out.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    out.unstable = out.eigenvalues.minCoeff() < 0.0;
    return out;
}

int sign_changes(const Eigen::VectorXd& v, double noise_floor) {
    const double floor = v.size() > 0 ? noise_floor * v.cwiseAbs().maxCoeff() : 0.0;
    int changes = 0;
    int last = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) <= floor) continue;
        const int s = (v[i] > 0.0) - (v[i] < 0.0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

int resolved_components(const Eigen::VectorXd& v, double noise_floor) {
    if (v.size() == 0) return 0;
    const double floor = noise_floor * v.cwiseAbs().maxCoeff();
    return static_cast<int>((v.array().abs() > floor).count());
}

BetaCScan beta_c_scan(std::span<const int> ns, const PotentialSpec& potential, const ScanOptions& opts) {
    for (int n : ns) {
        if (n < 2) throw DomainError("beta_c scan needs N >= 2 for every row");
    }
    BetaCScan out;
    out.rows.resize(ns.size());
    parallel_for(ns.size(), opts.threads, [&](std::size_t k) {
        BetaCRow& row = out.rows[k];
        row.n = ns[k];
        try {
            const GroundStateResult gs = ground_state(row.n, potential, opts.solver, opts.cache);
            if (!gs.converged) {
                row.error = gs.diagnostics;
                return;
            }
            row.beta_c = critical_beta(gs.chain).beta_c;
            row.dz_min = min_spacing(gs.chain);
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : out.rows) {
        if (r.ok && r.n >= kMinFitN) pts.emplace_back(r.n, r.beta_c);
    }
    if (pts.size() >= 3) out.fit = power_law_fit(pts);
    return out;
}

}  // namespace ccl
