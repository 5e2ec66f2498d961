#pragma once

#include "qps/ecm.hpp"
#include "qps/linalg.hpp"
#include "qps/rng.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace qps::invasion {

// The invasion game: an adversary signals its next move (down, left, right)
// and the agent is rewarded for blocking it. Each signal owns a rank-one
// three-clip subnetwork (actions a_down, a_left, a_right) with
// percept-specific flags; learning runs on h-values, deliberation through
// the classical or the quantum rank-one RPS path.

enum class Move { down = 0, left = 1, right = 2 };

constexpr int kMoves = 3;

// Permutations of the meaning of the three signals.
enum class Permutation { identity, swap_down_left, swap_down_right, swap_left_right, cycle };

std::array<int, kMoves> permutation_table(Permutation p);

struct GameState {
    // Base adversary strategy: signal index -> intended move.
    std::array<Move, kMoves> strategy{Move::down, Move::left, Move::right};
    // Current meaning-permutation applied on top of the strategy.
    Permutation permutation = Permutation::identity;

    Move intended_move(int signal) const;
};

// Reward 1 when the agent's action matches the adversary's permuted move.
int env_round(const GameState& state, int agent_action, int signal);

enum class AgentKind { classical_rps, quantum_rps };

struct SessionConfig {
    AgentKind agent = AgentKind::classical_rps;
    long rounds = 500;
    long switch_at = -1; // round index at which the permutation flips; -1 = never
    Permutation switch_to = Permutation::cycle;
    ecm::LearnParams learn{};
    double reward_value = 1.0;
    // Optional head start: stationary mass of the initially correct action
    // (0 = start from uniform h-values). With bias b the correct action
    // starts with h = floor * (2b/(1-b) + 1)-ish mass so that its
    // probability equals b, and only it is flagged.
    double initial_bias = 0.0;
};

struct RoundRecord {
    long round = 0;
    int signal = 0;
    int action = 0; // 0-based action index
    int reward = 0;
    long n_u = 0;
    double epsilon = 0.0;   // flagged stationary mass seen by the deliberation
    unsigned flags_mask = 0; // bit a set if action a was flagged at round start
};

struct SessionHistory {
    std::vector<RoundRecord> rounds;

    double block_rate(std::size_t first, std::size_t last) const; // [first, last)
    double mean_n_u(std::size_t first, std::size_t last) const;
};

// Plays `rounds` of the game with learning and flag mechanics. The signal is
// drawn uniformly each round; deliberation runs on the signalled percept's
// subnetwork with its current flags.
SessionHistory run_session(const SessionConfig& config, Rng& rng);

// Session log CSV: round, signal, action, reward, n_u, epsilon, flags-bitmask.
void write_session_csv(std::ostream& out, const SessionHistory& history);

} // namespace qps::invasion
