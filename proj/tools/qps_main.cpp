// Command-line harness: experiment configuration, figure-reproduction
// commands, pulse-schedule export, network validation, and invasion-game
// sessions. All randomness derives from --seed through labeled substreams,
// so repeated runs produce byte-identical CSV files for any QPS_THREADS.

#include "CLI11.hpp"

#include "qps/ecm.hpp"
#include "qps/invasion.hpp"
#include "qps/ion.hpp"
#include "qps/noise.hpp"
#include "qps/quantum.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace qps;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct ExperimentFlags {
    double epsilon = 0.05;
    double ratio = 9.0;
    double sigma = 0.0;
    long trials = 10000;
    std::uint64_t seed = 1;
    int m_eps_override = -1; // -1 = use ceil(1/sqrt(eps))
    std::string noise_mask;  // comma-separated pulse kinds, empty = all
    std::string out;
    std::string config_path;
    CLI::App* cmd = nullptr;

    void add_common(CLI::App* command, const std::string& default_out) {
        cmd = command;
        out = default_out;
        cmd->add_option("--epsilon", epsilon, "Flagged stationary mass (0, 1)")
            ->capture_default_str();
        cmd->add_option("--ratio", ratio, "Ratio pi1/pi2 of the flagged masses")
            ->capture_default_str();
        cmd->add_option("--sigma", sigma, "Gaussian pulse-angle noise (radians)")
            ->capture_default_str();
        cmd->add_option("--trials", trials, "Monte-Carlo trials per grid point")
            ->capture_default_str();
        cmd->add_option("--seed", seed, "Master seed; all substreams derive from it")
            ->capture_default_str();
        cmd->add_option("--m-eps", m_eps_override,
                        "Override the maximal Grover iteration count (0 = classical baseline)");
        cmd->add_option("--noise-mask", noise_mask,
                        "Comma-separated pulse kinds subject to noise (default: all)");
        cmd->add_option("--out", out, "Output CSV path")->capture_default_str();
        cmd->add_option("--config", config_path, "Config file with 'key = value' lines");
    }

    // Applies config-file keys to fields whose flags were not given on the
    // command line: flags override config, config overrides defaults.
    void apply_config() {
        if (config_path.empty()) {
            return;
        }
        std::ifstream in(config_path);
        if (!in) {
            throw noise::BadConfig("cannot open config file '" + config_path + "'");
        }
        std::string line;
        long line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line[0] == '#') {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw noise::BadConfig("config line " + std::to_string(line_no) +
                                       ": expected 'key = value'");
            }
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t");
                const auto b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
            };
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            const std::string flag = "--" + key;
            if (cmd->get_option_no_throw(flag) == nullptr) {
                throw noise::BadConfig("config line " + std::to_string(line_no) +
                                       ": unknown key '" + key + "'");
            }
            if (cmd->count(flag) > 0) {
                continue; // command line wins
            }
            try {
                if (key == "epsilon") epsilon = std::stod(value);
                else if (key == "ratio") ratio = std::stod(value);
                else if (key == "sigma") sigma = std::stod(value);
                else if (key == "trials") trials = std::stol(value);
                else if (key == "seed") seed = std::stoull(value);
                else if (key == "m-eps") m_eps_override = std::stoi(value);
                else if (key == "noise-mask") noise_mask = value;
                else if (key == "out") out = value;
                else throw noise::BadConfig("config key '" + key + "' is not configurable");
            } catch (const std::invalid_argument&) {
                throw noise::BadConfig("config line " + std::to_string(line_no) +
                                       ": bad value for '" + key + "'");
            }
        }
    }

    noise::ExperimentConfig to_config(std::uint64_t stream_seed) const {
        noise::ExperimentConfig config;
        config.epsilon = epsilon;
        config.ratio = ratio;
        config.sigma = sigma;
        config.trials = trials;
        config.seed = stream_seed;
        if (m_eps_override >= 0) {
            config.m_eps_override = m_eps_override;
        }
        if (!noise_mask.empty()) {
            config.noise_mask.clear();
            std::stringstream names(noise_mask);
            std::string name;
            while (std::getline(names, name, ',')) {
                config.noise_mask.insert(ion::kind_from_name(name));
            }
        }
        return config;
    }
};

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open output file '" + path + "'");
    }
    return out;
}

noise::RatioRow ratio_row(const noise::ExperimentStats& stats) {
    return {stats.epsilon, stats.ratio, stats.sigma, stats.n1, stats.n2, stats.ratio_empirical()};
}

int cmd_validate(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open '" << path << "'\n";
        return kExitValidation;
    }
    try {
        const ecm::ClipNetwork network = ecm::read_network(in);
        std::cout << "valid: " << network.size() << " clips, " << network.action_ids().size()
                  << " action(s)\n";
        return kExitOk;
    } catch (const ecm::NetworkValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitValidation;
    }
}

int cmd_simulate(const ExperimentFlags& flags, const std::string& emit_pulses) {
    const auto config = flags.to_config(derive_seed(flags.seed, "simulate"));
    config.validate();
    const noise::ExperimentStats stats = noise::monte_carlo(config, config.trials);

    auto out = open_output(flags.out);
    noise::write_ratio_csv(out, {ratio_row(stats)});
    std::printf("epsilon %.6g ratio %.6g sigma %.6g trials %ld: N1/N2 = %.6g, mean N_U = %.6g, "
                "D(tailed) = %.6g\n",
                stats.epsilon, stats.ratio, stats.sigma, stats.trials, stats.ratio_empirical(),
                stats.mean_nu, noise::distance_to_tailed(stats));

    if (!emit_pulses.empty()) {
        const auto angles = ion::deliberation_angles(config.pi1(), config.pi2());
        const auto seq = ion::compile_rank_one_deliberation(angles.theta1, angles.theta2, {1, 2},
                                                            config.m_eps());
        ion::write_pulses_file(emit_pulses, seq);
        std::printf("wrote %zu pulses to %s\n", seq.size(), emit_pulses.c_str());
    }
    return kExitOk;
}

int cmd_fig_scaling(const ExperimentFlags& flags) {
    const auto grid = noise::default_epsilon_grid();
    std::vector<noise::ScalingRow> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ExperimentFlags point = flags;
        point.epsilon = grid[i];
        const auto config = point.to_config(derive_seed(flags.seed, "fig-scaling/" + std::to_string(i)));
        config.validate();
        const auto stats = noise::monte_carlo(config, config.trials);
        rows.push_back({stats.epsilon, stats.sigma, stats.trials, stats.mean_nu, stats.std_mean_nu});
    }
    auto out = open_output(flags.out);
    noise::write_scaling_csv(out, rows);
    std::printf("wrote %zu rows to %s\n", rows.size(), flags.out.c_str());
    return kExitOk;
}

int cmd_fig_compare(const ExperimentFlags& flags) {
    const auto grid = noise::default_epsilon_grid();
    std::vector<noise::CompareRow> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ExperimentFlags point = flags;
        point.epsilon = grid[i];
        point.sigma = 0.0;

        auto quantum_config = point.to_config(derive_seed(flags.seed, "fig-compare/q/" + std::to_string(i)));
        quantum_config.m_eps_override.reset();
        quantum_config.validate();
        const auto quantum_stats = noise::monte_carlo(quantum_config, quantum_config.trials);

        auto classical_config =
            point.to_config(derive_seed(flags.seed, "fig-compare/c/" + std::to_string(i)));
        classical_config.m_eps_override = 0;
        classical_config.validate();
        const auto classical_stats = noise::monte_carlo(classical_config, classical_config.trials);

        rows.push_back({grid[i], quantum_stats.mean_nu, classical_stats.mean_nu});
    }
    auto out = open_output(flags.out);
    noise::write_compare_csv(out, rows);
    std::printf("wrote %zu rows to %s\n", rows.size(), flags.out.c_str());
    return kExitOk;
}

int cmd_fig_distance(const ExperimentFlags& flags) {
    std::vector<noise::DistanceRow> rows;
    const auto ratios = noise::default_ratio_grid();
    const auto sigmas = noise::distance_sigma_grid();
    for (std::size_t r = 0; r < ratios.size(); ++r) {
        for (std::size_t s = 0; s < sigmas.size(); ++s) {
            ExperimentFlags point = flags;
            point.ratio = ratios[r];
            point.sigma = sigmas[s];
            const auto config = point.to_config(
                derive_seed(flags.seed, "fig-distance/" + std::to_string(r) + "/" + std::to_string(s)));
            config.validate();
            const auto stats = noise::monte_carlo(config, config.trials);
            rows.push_back({stats.epsilon, stats.ratio, stats.sigma, noise::distance_to_tailed(stats)});
        }
    }
    auto out = open_output(flags.out);
    noise::write_distance_csv(out, rows);
    std::printf("wrote %zu rows to %s\n", rows.size(), flags.out.c_str());
    return kExitOk;
}

int cmd_fig_ratio(const ExperimentFlags& flags) {
    std::vector<noise::RatioRow> rows;
    const auto ratios = noise::default_ratio_grid();
    const auto epsilons = noise::tails_epsilon_grid();
    for (std::size_t r = 0; r < ratios.size(); ++r) {
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
            ExperimentFlags point = flags;
            point.ratio = ratios[r];
            point.epsilon = epsilons[e];
            const auto config = point.to_config(
                derive_seed(flags.seed, "fig-ratio/" + std::to_string(r) + "/" + std::to_string(e)));
            config.validate();
            rows.push_back(ratio_row(noise::monte_carlo(config, config.trials)));
        }
    }
    auto out = open_output(flags.out);
    noise::write_ratio_csv(out, rows);
    std::printf("wrote %zu rows to %s\n", rows.size(), flags.out.c_str());
    return kExitOk;
}

int cmd_compile_pulses(double epsilon, double ratio, int m, const std::string& out_path) {
    noise::ExperimentConfig config;
    config.epsilon = epsilon;
    config.ratio = ratio;
    config.validate();
    const int iterations = m >= 0 ? m : config.m_eps();
    const auto angles = ion::deliberation_angles(config.pi1(), config.pi2());
    const auto seq =
        ion::compile_rank_one_deliberation(angles.theta1, angles.theta2, {1, 2}, iterations);
    ion::write_pulses_file(out_path, seq);
    std::printf("wrote %zu pulses (%d laser pulses) to %s\n", seq.size(), seq.laser_pulse_count(),
                out_path.c_str());
    return kExitOk;
}

int cmd_invasion(const std::string& agent, long rounds, long switch_at, double bias,
                 std::uint64_t seed, const std::string& out_path) {
    invasion::SessionConfig config;
    if (agent == "classical") {
        config.agent = invasion::AgentKind::classical_rps;
    } else if (agent == "quantum") {
        config.agent = invasion::AgentKind::quantum_rps;
    } else {
        throw noise::BadConfig("agent must be 'classical' or 'quantum'");
    }
    config.rounds = rounds;
    config.switch_at = switch_at;
    config.initial_bias = bias;
    Rng rng = Rng::from_stream(seed, "invasion");
    const invasion::SessionHistory history = invasion::run_session(config, rng);
    auto out = open_output(out_path);
    invasion::write_session_csv(out, history);
    std::printf("%ld rounds, block rate %.4f (last fifth %.4f), mean N_U %.4f\n", rounds,
                history.block_rate(0, history.rounds.size()),
                history.block_rate(history.rounds.size() * 4 / 5, history.rounds.size()),
                history.mean_n_u(0, history.rounds.size()));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Projective-simulation agents on trapped ions: simulator and pulse compiler"};
    app.require_subcommand(1);

    std::string network_path;
    auto* validate = app.add_subcommand("validate", "Validate a clip-network file");
    validate->add_option("network", network_path, "Network file")->required();

    ExperimentFlags sim_flags;
    std::string emit_pulses;
    auto* simulate = app.add_subcommand("simulate", "Run one noise-model experiment");
    sim_flags.add_common(simulate, "ratios.csv");
    simulate->add_option("--emit-pulses", emit_pulses, "Also write the deliberation pulse schedule");

    ExperimentFlags scaling_flags;
    auto* fig_scaling =
        app.add_subcommand("fig-scaling", "Mean N_U over the epsilon grid at fixed sigma");
    scaling_flags.add_common(fig_scaling, "scaling.csv");

    ExperimentFlags compare_flags;
    auto* fig_compare =
        app.add_subcommand("fig-compare", "Quantum vs classical mean N_U at sigma = 0");
    compare_flags.add_common(fig_compare, "compare.csv");

    ExperimentFlags distance_flags;
    auto* fig_distance =
        app.add_subcommand("fig-distance", "Statistical distance over the sigma grid");
    distance_flags.add_common(fig_distance, "distance.csv");

    ExperimentFlags ratio_flags;
    auto* fig_ratio =
        app.add_subcommand("fig-ratio", "Empirical N1/N2 over the ratio and epsilon grids");
    ratio_flags.add_common(fig_ratio, "ratios.csv");

    double cp_epsilon = 0.05, cp_ratio = 9.0;
    int cp_m = -1;
    std::string cp_out = "pulses.txt";
    auto* compile_pulses =
        app.add_subcommand("compile-pulses", "Write a rank-one deliberation pulse schedule");
    compile_pulses->add_option("--epsilon", cp_epsilon, "Flagged stationary mass")
        ->capture_default_str();
    compile_pulses->add_option("--ratio", cp_ratio, "Ratio pi1/pi2")->capture_default_str();
    compile_pulses->add_option("--m", cp_m, "Grover iterations (default: ceil(1/sqrt(eps)))");
    compile_pulses->add_option("--out", cp_out, "Output pulse file")->capture_default_str();

    std::string inv_agent = "classical";
    long inv_rounds = 500, inv_switch = -1;
    double inv_bias = 0.0;
    std::uint64_t inv_seed = 1;
    std::string inv_out = "session.csv";
    auto* invasion_cmd = app.add_subcommand("invasion", "Play an invasion-game session");
    invasion_cmd->add_option("--agent", inv_agent, "'classical' or 'quantum'")
        ->capture_default_str();
    invasion_cmd->add_option("--rounds", inv_rounds, "Number of rounds")->capture_default_str();
    invasion_cmd->add_option("--switch-at", inv_switch, "Round of the strategy switch (-1 = never)")
        ->capture_default_str();
    invasion_cmd->add_option("--bias", inv_bias, "Initial mass of the correct action (0 = untaught)")
        ->capture_default_str();
    invasion_cmd->add_option("--seed", inv_seed, "Master seed")->capture_default_str();
    invasion_cmd->add_option("--out", inv_out, "Session log CSV")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (validate->parsed()) {
            return cmd_validate(network_path);
        }
        if (simulate->parsed()) {
            sim_flags.apply_config();
            return cmd_simulate(sim_flags, emit_pulses);
        }
        if (fig_scaling->parsed()) {
            scaling_flags.apply_config();
            return cmd_fig_scaling(scaling_flags);
        }
        if (fig_compare->parsed()) {
            compare_flags.apply_config();
            return cmd_fig_compare(compare_flags);
        }
        if (fig_distance->parsed()) {
            distance_flags.apply_config();
            return cmd_fig_distance(distance_flags);
        }
        if (fig_ratio->parsed()) {
            ratio_flags.apply_config();
            return cmd_fig_ratio(ratio_flags);
        }
        if (compile_pulses->parsed()) {
            return cmd_compile_pulses(cp_epsilon, cp_ratio, cp_m, cp_out);
        }
        if (invasion_cmd->parsed()) {
            return cmd_invasion(inv_agent, inv_rounds, inv_switch, inv_bias, inv_seed, inv_out);
        }
    } catch (const noise::BadConfig& e) {
        std::cerr << "bad config: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ecm::NetworkValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
