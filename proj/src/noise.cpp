#include "qps/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

namespace qps::noise {

AttemptLimitExceeded::AttemptLimitExceeded(long limit)
    : Error("deliberation exceeded the attempt limit of " + std::to_string(limit)) {}

std::set<ion::PulseKind> all_pulse_kinds() {
    return {ion::PulseKind::collective_x,  ion::PulseKind::single_z,
            ion::PulseKind::moelmer_soerensen, ion::PulseKind::detuned_cz,
            ion::PulseKind::detuned_hide,  ion::PulseKind::detuned_switch};
}

ion::PulseSequence perturb_sequence(const ion::PulseSequence& seq, const NoiseModel& model, Rng& rng) {
    if (model.sigma < 0.0) {
        throw BadConfig("NoiseModel.sigma must be non-negative");
    }
    if (model.sigma == 0.0) {
        return seq;
    }
    ion::PulseSequence out(seq.qubits());
    for (const auto& p : seq) {
        ion::Pulse q = p;
        if (model.applies_to(p.kind)) {
            q.angle += rng.normal(0.0, model.sigma);
        }
        out.append(q);
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw BadConfig("epsilon must lie in (0, 1)");
    }
    if (!(ratio > 0.0)) {
        throw BadConfig("ratio must be positive");
    }
    if (trials < 1) {
        throw BadConfig("trials must be at least 1");
    }
    if (sigma < 0.0) {
        throw BadConfig("sigma must be non-negative");
    }
    if (m_eps_override && *m_eps_override < 0) {
        throw BadConfig("m_eps_override must be non-negative");
    }
    if (attempt_limit < 1) {
        throw BadConfig("attempt_limit must be at least 1");
    }
}

int ExperimentConfig::m_eps() const {
    if (m_eps_override) {
        return *m_eps_override;
    }
    return static_cast<int>(std::ceil(1.0 / std::sqrt(epsilon)));
}

namespace {

// Unperturbed pulse programs for every m in [0, m_eps], shared across trials.
struct DeliberationTemplates {
    explicit DeliberationTemplates(const ExperimentConfig& config) {
        const auto angles = ion::deliberation_angles(config.pi1(), config.pi2());
        const int m_eps = config.m_eps();
        by_m.reserve(static_cast<std::size_t>(m_eps) + 1);
        for (int m = 0; m <= m_eps; ++m) {
            by_m.push_back(
                ion::compile_rank_one_deliberation(angles.theta1, angles.theta2, {1, 2}, m));
        }
    }
    std::vector<ion::PulseSequence> by_m;
};

TrialRecord run_trial_impl(const ExperimentConfig& config, const DeliberationTemplates& templates,
                           Rng& rng) {
    const int m_eps = config.m_eps();
    const bool noisy = config.sigma > 0.0;

    TrialRecord record{};
    for (long attempt = 1; attempt <= config.attempt_limit; ++attempt) {
        const int m = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m_eps) + 1));
        const auto& seq = templates.by_m[static_cast<std::size_t>(m)];

        std::array<Complex, 5> amps{1.0, 0.0, 0.0, 0.0, 0.0};
        for (const auto& p : seq) {
            double angle = p.angle;
            if (noisy && config.noise_mask.count(p.kind) > 0) {
                angle += rng.normal(0.0, config.sigma);
            }
            ion::apply_pulse_extended(amps, p.kind, p.target, angle);
        }

        record.n_u += 2 * m + 1;
        record.attempts = attempt;

        // Clip-basis measurement; |10> and |11> decode to c3, and residual
        // population in the hide state counts as an unflagged outcome.
        const double p1 = std::norm(amps[0]);
        const double p2 = std::norm(amps[1]);
        const double u = rng.uniform();
        if (u < p1) {
            record.action = 1;
            return record;
        }
        if (u < p1 + p2) {
            record.action = 2;
            return record;
        }
    }
    throw AttemptLimitExceeded(config.attempt_limit);
}

} // namespace

TrialRecord run_trial(const ExperimentConfig& config, Rng& rng) {
    config.validate();
    const DeliberationTemplates templates(config);
    return run_trial_impl(config, templates, rng);
}

int thread_count() {
    if (const char* env = std::getenv("QPS_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) {
            return n;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

ExperimentStats monte_carlo(const ExperimentConfig& config, long trials) {
    config.validate();
    if (trials < 1) {
        throw BadConfig("monte_carlo: trials must be at least 1");
    }
    const DeliberationTemplates templates(config);
    const std::uint64_t stream = derive_seed(config.seed, "noise-lab/trial");

    std::vector<TrialRecord> records(static_cast<std::size_t>(trials));
    const int workers = std::min<long>(thread_count(), trials);
    if (workers <= 1) {
        for (long i = 0; i < trials; ++i) {
            Rng rng(derive_seed(stream, static_cast<std::uint64_t>(i)));
            records[static_cast<std::size_t>(i)] = run_trial_impl(config, templates, rng);
        }
    } else {
        std::exception_ptr failure;
        std::mutex failure_lock;
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                try {
                    for (long i = w; i < trials; i += workers) {
                        Rng rng(derive_seed(stream, static_cast<std::uint64_t>(i)));
                        records[static_cast<std::size_t>(i)] = run_trial_impl(config, templates, rng);
                    }
                } catch (...) {
                    const std::lock_guard<std::mutex> guard(failure_lock);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    // Aggregation in trial order: results do not depend on scheduling.
    ExperimentStats stats{};
    stats.epsilon = config.epsilon;
    stats.ratio = config.ratio;
    stats.sigma = config.sigma;
    stats.trials = trials;
    double sum = 0.0;
    for (const auto& r : records) {
        sum += static_cast<double>(r.n_u);
        if (r.action == 1) {
            ++stats.n1;
        } else if (r.action == 2) {
            ++stats.n2;
        }
    }
    stats.mean_nu = sum / static_cast<double>(trials);
    double ss = 0.0;
    for (const auto& r : records) {
        const double d = static_cast<double>(r.n_u) - stats.mean_nu;
        ss += d * d;
    }
    stats.std_nu = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1)) : 0.0;

    // Error bars in the style of the figures: standard deviation of the
    // means of 100 equal batches (requires trials >= 100; the last partial
    // batch, if any, is left out of the batching).
    const long batches = 100;
    if (trials >= batches) {
        const long batch_size = trials / batches;
        double mean_of_means = 0.0;
        std::vector<double> batch_means(static_cast<std::size_t>(batches));
        for (long b = 0; b < batches; ++b) {
            double bs = 0.0;
            for (long i = b * batch_size; i < (b + 1) * batch_size; ++i) {
                bs += static_cast<double>(records[static_cast<std::size_t>(i)].n_u);
            }
            batch_means[static_cast<std::size_t>(b)] = bs / static_cast<double>(batch_size);
            mean_of_means += batch_means[static_cast<std::size_t>(b)];
        }
        mean_of_means /= static_cast<double>(batches);
        double bss = 0.0;
        for (double bm : batch_means) {
            bss += (bm - mean_of_means) * (bm - mean_of_means);
        }
        stats.std_mean_nu = std::sqrt(bss / static_cast<double>(batches - 1));
    } else {
        stats.std_mean_nu = stats.std_nu / std::sqrt(static_cast<double>(trials));
    }
    return stats;
}

double ExperimentStats::ratio_empirical() const {
    if (n2 == 0) {
        return std::numeric_limits<double>::infinity();
    }
    return static_cast<double>(n1) / static_cast<double>(n2);
}

Vector ExperimentStats::output_distribution() const {
    Vector out(2);
    const double total = static_cast<double>(n1 + n2);
    out(0) = total > 0 ? static_cast<double>(n1) / total : 0.0;
    out(1) = total > 0 ? static_cast<double>(n2) / total : 0.0;
    return out;
}

double statistical_distance(const Vector& p, const Vector& q) {
    if (p.size() != q.size()) {
        throw LengthMismatch("statistical_distance: length mismatch");
    }
    return 0.5 * (p - q).cwiseAbs().sum();
}

double distance_to_tailed(const ExperimentStats& stats) {
    Vector tailed(2);
    tailed(0) = stats.ratio / (1.0 + stats.ratio);
    tailed(1) = 1.0 / (1.0 + stats.ratio);
    return statistical_distance(tailed, stats.output_distribution());
}

FitResult fit_scaling(const std::vector<std::pair<double, double>>& points, ScalingModel model) {
    if (points.size() < 3) {
        throw DegenerateDesign("fit_scaling: need at least 3 points");
    }
    const auto n = static_cast<double>(points.size());
    double sg = 0.0, sy = 0.0, sgg = 0.0, sgy = 0.0;
    for (const auto& [eps, y] : points) {
        if (eps <= 0.0) {
            throw DegenerateDesign("fit_scaling: epsilon must be positive");
        }
        const double g = model == ScalingModel::inverse_sqrt ? 1.0 / std::sqrt(eps) : 1.0 / eps;
        sg += g;
        sy += y;
        sgg += g * g;
        sgy += g * y;
    }
    const double var = sgg - sg * sg / n;
    if (var <= 1e-12 * std::max(1.0, sgg)) {
        throw DegenerateDesign("fit_scaling: design has no spread in epsilon");
    }
    FitResult fit{};
    fit.b = (sgy - sg * sy / n) / var;
    fit.a = (sy - fit.b * sg) / n;
    for (const auto& [eps, y] : points) {
        const double g = model == ScalingModel::inverse_sqrt ? 1.0 / std::sqrt(eps) : 1.0 / eps;
        const double r = y - fit.a - fit.b * g;
        fit.sse += r * r;
    }
    return fit;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(count - 1);
    for (int i = 0; i < count; ++i) {
        grid[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + step * i);
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

std::vector<double> default_epsilon_grid() {
    return log_spaced(0.002, 0.5, 40);
}

std::vector<double> default_ratio_grid() {
    return {1.0, 2.0, 4.0, 9.0};
}

std::vector<double> default_sigma_grid() {
    return {M_PI / 100.0, M_PI / 20.0, M_PI / 10.0};
}

std::vector<double> distance_sigma_grid() {
    return {0.0, M_PI / 100.0, M_PI / 20.0, M_PI / 10.0, M_PI / 2.0, M_PI};
}

std::vector<double> tails_epsilon_grid() {
    return {0.01, 0.05, 0.1, 0.25};
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows) {
    out << "epsilon,sigma,trials,mean_nu,std_mean_nu\n";
    for (const auto& r : rows) {
        out << format_value(r.epsilon) << ',' << format_value(r.sigma) << ',' << r.trials << ','
            << format_value(r.mean_nu) << ',' << format_value(r.std_mean_nu) << '\n';
    }
}

void write_ratio_csv(std::ostream& out, const std::vector<RatioRow>& rows) {
    out << "epsilon,ratio_target,sigma,n1,n2,ratio_empirical\n";
    for (const auto& r : rows) {
        out << format_value(r.epsilon) << ',' << format_value(r.ratio_target) << ','
            << format_value(r.sigma) << ',' << r.n1 << ',' << r.n2 << ','
            << format_value(r.ratio_empirical) << '\n';
    }
}

void write_distance_csv(std::ostream& out, const std::vector<DistanceRow>& rows) {
    out << "epsilon,ratio_target,sigma,statistical_distance\n";
    for (const auto& r : rows) {
        out << format_value(r.epsilon) << ',' << format_value(r.ratio_target) << ','
            << format_value(r.sigma) << ',' << format_value(r.statistical_distance) << '\n';
    }
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
    out << "epsilon,mean_nu_quantum,mean_nu_classical\n";
    for (const auto& r : rows) {
        out << format_value(r.epsilon) << ',' << format_value(r.mean_nu_quantum) << ','
            << format_value(r.mean_nu_classical) << '\n';
    }
}

} // namespace qps::noise
