#include "qps/invasion.hpp"

#include "qps/classical.hpp"
#include "qps/noise.hpp"
#include "qps/quantum.hpp"

#include <algorithm>
#include <ostream>

namespace qps::invasion {

std::array<int, kMoves> permutation_table(Permutation p) {
    switch (p) {
        case Permutation::identity: return {0, 1, 2};
        case Permutation::swap_down_left: return {1, 0, 2};
        case Permutation::swap_down_right: return {2, 1, 0};
        case Permutation::swap_left_right: return {0, 2, 1};
        case Permutation::cycle: return {1, 2, 0};
    }
    return {0, 1, 2};
}

Move GameState::intended_move(int signal) const {
    if (signal < 0 || signal >= kMoves) {
        throw Error("invalid signal index " + std::to_string(signal));
    }
    const auto table = permutation_table(permutation);
    return strategy[static_cast<std::size_t>(table[static_cast<std::size_t>(signal)])];
}

int env_round(const GameState& state, int agent_action, int signal) {
    if (agent_action < 0 || agent_action >= kMoves) {
        throw Error("invalid action index " + std::to_string(agent_action));
    }
    return agent_action == static_cast<int>(state.intended_move(signal)) ? 1 : 0;
}

double SessionHistory::block_rate(std::size_t first, std::size_t last) const {
    last = std::min(last, rounds.size());
    if (first >= last) {
        return 0.0;
    }
    double blocked = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        blocked += rounds[i].reward;
    }
    return blocked / static_cast<double>(last - first);
}

double SessionHistory::mean_n_u(std::size_t first, std::size_t last) const {
    last = std::min(last, rounds.size());
    if (first >= last) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        total += static_cast<double>(rounds[i].n_u);
    }
    return total / static_cast<double>(last - first);
}

SessionHistory run_session(const SessionConfig& config, Rng& rng) {
    if (config.rounds < 1) {
        throw Error("run_session: need at least one round");
    }
    if (config.initial_bias < 0.0 || config.initial_bias >= 1.0) {
        throw Error("run_session: initial_bias must lie in [0, 1)");
    }

    GameState state;
    ecm::HValues h(kMoves, kMoves);
    std::vector<ecm::FlagSet> flags(kMoves, ecm::FlagSet({1, 2, 3}));

    if (config.initial_bias > 0.0) {
        const double b = config.initial_bias;
        if (b < 1.0 / 3.0) {
            throw Error("run_session: initial_bias below the uniform level 1/3");
        }
        Matrix hv = Matrix::Ones(kMoves, kMoves);
        for (int signal = 0; signal < kMoves; ++signal) {
            const int correct = static_cast<int>(state.intended_move(signal));
            hv(correct, signal) = 2.0 * b / (1.0 - b);
            // Well-taught setting: only the rewarded action keeps its flag.
            for (int a = 0; a < kMoves; ++a) {
                if (a != correct) {
                    flags[static_cast<std::size_t>(signal)] =
                        ecm::flag_update(flags[static_cast<std::size_t>(signal)], a + 1, false);
                }
            }
        }
        h = ecm::HValues(std::move(hv), 1.0);
    }

    SessionHistory history;
    history.rounds.reserve(static_cast<std::size_t>(config.rounds));

    for (long round = 0; round < config.rounds; ++round) {
        if (round == config.switch_at) {
            state.permutation = config.switch_to;
        }
        const int signal = static_cast<int>(rng.uniform_int(kMoves));
        auto& percept_flags = flags[static_cast<std::size_t>(signal)];
        const Vector pi = h.probabilities(signal);

        RoundRecord record{};
        record.round = round;
        record.signal = signal;
        for (int a = 0; a < kMoves; ++a) {
            if (percept_flags.is_flagged(a + 1)) {
                record.flags_mask |= 1u << a;
                record.epsilon += pi(a);
            }
        }

        classical::WalkOutcome outcome{};
        if (config.agent == AgentKind::classical_rps) {
            outcome = classical::classical_rps_deliberate(pi, percept_flags, rng);
        } else {
            // Full flag sets can sum to 1 + 1 ulp; clamp before deriving m_eps.
            const int m_eps = quantum::m_eps_for(std::min(record.epsilon, 1.0));
            outcome = quantum::rank_one_deliberate(pi, percept_flags, m_eps, rng);
        }
        record.action = outcome.action - 1;
        record.n_u = outcome.steps;
        record.reward = env_round(state, record.action, signal);

        h = ecm::learn_update(h, signal, record.action,
                              record.reward ? config.reward_value : 0.0, config.learn);
        percept_flags = ecm::flag_update(percept_flags, outcome.action, record.reward == 1);

        history.rounds.push_back(record);
    }
    return history;
}

void write_session_csv(std::ostream& out, const SessionHistory& history) {
    out << "round,signal,action,reward,n_u,epsilon,flags_bitmask\n";
    for (const auto& r : history.rounds) {
        out << r.round << ',' << r.signal << ',' << r.action << ',' << r.reward << ',' << r.n_u << ','
            << noise::format_value(r.epsilon) << ',' << r.flags_mask << '\n';
    }
}

} // namespace qps::invasion
