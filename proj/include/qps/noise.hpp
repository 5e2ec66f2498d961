#pragma once

#include "qps/ion.hpp"
#include "qps/linalg.hpp"
#include "qps/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace qps::noise {

// Gaussian pulse-angle noise, Monte-Carlo deliberation trials on the
// two-qubit rank-one agent, aggregate statistics, statistical distance,
// and the scaling-model fits.

class BadConfig : public Error {
  public:
    using Error::Error;
};

class AttemptLimitExceeded : public Error {
  public:
    explicit AttemptLimitExceeded(long limit);
};

class LengthMismatch : public Error {
  public:
    using Error::Error;
};

class DegenerateDesign : public Error {
  public:
    using Error::Error;
};

std::set<ion::PulseKind> all_pulse_kinds();

struct NoiseModel {
    double sigma = 0.0;                                    // radians
    std::set<ion::PulseKind> mask = all_pulse_kinds();     // kinds subject to noise

    bool applies_to(ion::PulseKind kind) const { return mask.count(kind) > 0; }
};

// Adds an independent N(0, sigma^2) draw to the angle of every masked pulse,
// in sequence order. With sigma = 0 the sequence is returned unchanged and
// no draws are consumed.
ion::PulseSequence perturb_sequence(const ion::PulseSequence& seq, const NoiseModel& model, Rng& rng);

struct TrialRecord {
    int action = 0;    // clip id of the flagged action that ended the trial
    long n_u = 0;      // applications of U or U-dagger (2m+1 per attempt)
    long attempts = 0; // measure-and-retry rounds
};

// One grid point of the rank-one noise experiments: flagged actions c1, c2
// with stationary masses pi1 = eps*ratio/(1+ratio) and pi2 = eps/(1+ratio).
// `seed` is the experiment-level stream seed; trial i runs on the substream
// derived from (seed, i), which makes aggregation independent of execution
// order.
struct ExperimentConfig {
    double epsilon = 0.05;
    double ratio = 9.0; // pi1 / pi2
    double sigma = 0.0;
    long trials = 10000;
    std::uint64_t seed = 0;
    std::optional<int> m_eps_override; // 0 emulates the classical RPS baseline
    std::set<ion::PulseKind> noise_mask = all_pulse_kinds();
    long attempt_limit = 1'000'000;

    void validate() const; // throws BadConfig naming the offending field
    double pi1() const { return epsilon * ratio / (1.0 + ratio); }
    double pi2() const { return epsilon / (1.0 + ratio); }
    int m_eps() const;
};

// One deliberation: loop { draw m uniform on [0, m_eps]; compile the 4+12m
// pulse program; jitter every masked angle; apply to |00>; sample the clip
// basis } until a flagged action is sampled. Population left in the hide
// state by noisy MS pulses counts as an unflagged outcome.
TrialRecord run_trial(const ExperimentConfig& config, Rng& rng);

struct ExperimentStats {
    double epsilon = 0.0;
    double ratio = 0.0;
    double sigma = 0.0;
    long trials = 0;
    long n1 = 0;
    long n2 = 0;
    double mean_nu = 0.0;
    double std_nu = 0.0;      // sample standard deviation of N_U over trials
    double std_mean_nu = 0.0; // standard deviation of the means of 100 equal batches

    double ratio_empirical() const;
    // Output distribution over the flagged actions (N1, N2)/(N1+N2).
    Vector output_distribution() const;
};

// Runs `trials` independent trials and aggregates them. Deterministic for a
// fixed config.seed regardless of thread count (QPS_THREADS) and scheduling.
ExperimentStats monte_carlo(const ExperimentConfig& config, long trials);

// (1/2) sum_i |p_i - q_i|.
double statistical_distance(const Vector& p, const Vector& q);

// Statistical distance between the empirical flagged-action distribution
// and the tailed distribution (pi1, pi2)/eps.
double distance_to_tailed(const ExperimentStats& stats);

enum class ScalingModel { inverse_sqrt, inverse };

struct FitResult {
    double a = 0.0;
    double b = 0.0;
    double sse = 0.0;
};

// Ordinary least squares of y against a + b*g(eps), g = 1/sqrt(eps) or
// 1/eps, over (eps, y) points.
FitResult fit_scaling(const std::vector<std::pair<double, double>>& points, ScalingModel model);

// Default grids of the figure-reproduction commands.
std::vector<double> log_spaced(double lo, double hi, int count);
std::vector<double> default_epsilon_grid();    // 40 log-spaced points in [0.002, 0.5]
std::vector<double> default_ratio_grid();      // {1, 2, 4, 9}
std::vector<double> default_sigma_grid();      // {pi/100, pi/20, pi/10}
std::vector<double> distance_sigma_grid();     // {0, pi/100, pi/20, pi/10, pi/2, pi}
std::vector<double> tails_epsilon_grid();      // {0.01, 0.05, 0.1, 0.25}

// Worker count for trial loops: QPS_THREADS when set, otherwise the
// hardware concurrency.
int thread_count();

// CSV schemas (one header line, comma separation, 17 significant digits).
struct ScalingRow {
    double epsilon, sigma;
    long trials;
    double mean_nu, std_mean_nu;
};
struct RatioRow {
    double epsilon, ratio_target, sigma;
    long n1, n2;
    double ratio_empirical;
};
struct DistanceRow {
    double epsilon, ratio_target, sigma, statistical_distance;
};
struct CompareRow {
    double epsilon, mean_nu_quantum, mean_nu_classical;
};

std::string format_value(double v);
void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows);
void write_ratio_csv(std::ostream& out, const std::vector<RatioRow>& rows);
void write_distance_csv(std::ostream& out, const std::vector<DistanceRow>& rows);
void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);

} // namespace qps::noise
