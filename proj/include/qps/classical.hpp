#pragma once

#include "qps/ecm.hpp"
#include "qps/linalg.hpp"
#include "qps/rng.hpp"

namespace qps::classical {

// Classical random walks over clip networks: absorption walks of the
// standard PS agent, stationary distributions, spectral gaps, tailed
// distributions, and the resample-until-flagged RPS deliberation loop.

class NotConverged : public Error {
  public:
    explicit NotConverged(long max_iters);
};

class NotErgodic : public Error {
  public:
    using Error::Error;
};

class EmptyTail : public Error {
  public:
    using Error::Error;
};

class StepLimitExceeded : public Error {
  public:
    explicit StepLimitExceeded(long limit);
};

struct WalkOutcome {
    int action = 0; // clip id
    long steps = 0; // matrix applications / samples consumed
};

constexpr long kDefaultMaxIters = 1'000'000;
constexpr long kDefaultStepLimit = 1'000'000;

// Fixed point of P by power iteration: ||P pi - pi||_1 <= tol. Throws
// NotConverged after max_iters sweeps (e.g. periodic chains, or two dominant
// eigenvalues tied within tol).
Vector stationary_distribution(const Matrix& p, double tol = 1e-12, long max_iters = kDefaultMaxIters);

// Spectral gap 1 - |lambda_2|. Exactly 1 for rank-one chains. Throws
// NotErgodic when a second eigenvalue sits on the unit circle.
double spectral_gap(const Matrix& p);

// pi restricted to `targets` and renormalized; zero elsewhere.
Vector tailed_distribution(const Vector& pi, const std::set<int>& targets);

// Random walk from `start` following the column distributions, stopped at
// the first action clip. One uniform draw per step (inverse CDF).
WalkOutcome standard_ps_deliberate(const ecm::ClipNetwork& network, int start, Rng& rng,
                                   long step_limit = kDefaultStepLimit);

// Samples from pi until a flagged action comes up; `steps` counts samples.
// Output over flagged actions follows tailed_distribution(pi, flags).
WalkOutcome classical_rps_deliberate(const Vector& pi, const ecm::FlagSet& flags, Rng& rng,
                                     long step_limit = kDefaultStepLimit);

// Inverse-CDF sample from a distribution with a single uniform draw.
int sample_index(const Vector& distribution, Rng& rng);

} // namespace qps::classical
