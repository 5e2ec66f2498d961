#include "qps/classical.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace qps::classical {

NotConverged::NotConverged(long max_iters)
    : Error("power iteration did not converge within " + std::to_string(max_iters) +
            " iterations (chain may be periodic or have tied dominant eigenvalues)") {}

StepLimitExceeded::StepLimitExceeded(long limit)
    : Error("walk exceeded the step limit of " + std::to_string(limit)) {}

Vector stationary_distribution(const Matrix& p, double tol, long max_iters) {
    if (p.rows() != p.cols() || p.rows() == 0) {
        throw DimensionMismatch("stationary_distribution: matrix must be square");
    }
    const Eigen::Index n = p.rows();
    // Non-uniform start so that oscillations of periodic chains are not
    // masked by symmetry of the initial vector.
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = 1.0 + static_cast<double>(i + 1) / static_cast<double>(2 * n);
    }
    x /= x.sum();
    for (long it = 0; it < max_iters; ++it) {
        Vector next = p * x;
        next /= next.sum(); // guard drift from accumulated rounding
        if ((next - x).cwiseAbs().sum() <= tol) {
            return next;
        }
        x.swap(next);
    }
    throw NotConverged(max_iters);
}

double spectral_gap(const Matrix& p) {
    if (p.rows() != p.cols() || p.rows() == 0) {
        throw DimensionMismatch("spectral_gap: matrix must be square");
    }
    Eigen::EigenSolver<Matrix> solver(p, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw Error("spectral_gap: eigenvalue computation failed");
    }
    std::vector<double> mags(static_cast<std::size_t>(p.rows()));
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        mags[static_cast<std::size_t>(i)] = std::abs(solver.eigenvalues()(i));
    }
    std::sort(mags.begin(), mags.end(), std::greater<>());
    if (p.rows() == 1) {
        return 1.0;
    }
    const double second = mags[1];
    if (second >= 1.0 - 1e-9) {
        throw NotErgodic("spectral_gap: second eigenvalue on the unit circle (|lambda_2| = " +
                         std::to_string(second) + ")");
    }
    if (second <= 1e-12) {
        return 1.0; // rank-one chain
    }
    return 1.0 - second;
}

Vector tailed_distribution(const Vector& pi, const std::set<int>& targets) {
    double mass = 0.0;
    for (int id : targets) {
        if (id < 1 || id > pi.size()) {
            throw Error("tailed_distribution: target id " + std::to_string(id) + " out of range");
        }
        mass += pi(id - 1);
    }
    if (mass <= 0.0) {
        throw EmptyTail("tailed_distribution: targets carry no stationary mass");
    }
    Vector out = Vector::Zero(pi.size());
    for (int id : targets) {
        out(id - 1) = pi(id - 1) / mass;
    }
    return out;
}

int sample_index(const Vector& distribution, Rng& rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    for (Eigen::Index i = 0; i < distribution.size(); ++i) {
        cum += distribution(i);
        if (u < cum) {
            return static_cast<int>(i);
        }
    }
    return static_cast<int>(distribution.size() - 1); // u landed in rounding slack
}

WalkOutcome standard_ps_deliberate(const ecm::ClipNetwork& network, int start, Rng& rng,
                                   long step_limit) {
    if (start < 1 || start > network.size()) {
        throw Error("standard_ps_deliberate: start clip out of range");
    }
    int current = start;
    for (long step = 1; step <= step_limit; ++step) {
        current = sample_index(network.matrix().col(current - 1), rng) + 1;
        if (network.is_action(current)) {
            return {current, step};
        }
    }
    throw StepLimitExceeded(step_limit);
}

WalkOutcome classical_rps_deliberate(const Vector& pi, const ecm::FlagSet& flags, Rng& rng,
                                     long step_limit) {
    double mass = 0.0;
    for (int id : flags.flagged()) {
        if (id >= 1 && id <= pi.size()) {
            mass += pi(id - 1);
        }
    }
    if (mass <= 0.0) {
        throw EmptyTail("classical_rps_deliberate: flagged actions carry no stationary mass");
    }
    for (long step = 1; step <= step_limit; ++step) {
        const int clip = sample_index(pi, rng) + 1;
        if (flags.is_flagged(clip)) {
            return {clip, step};
        }
    }
    throw StepLimitExceeded(step_limit);
}

} // namespace qps::classical
