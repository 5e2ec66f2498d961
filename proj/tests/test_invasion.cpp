#include "doctest.h"

#include "qps/invasion.hpp"

#include <bitset>
#include <cmath>
#include <sstream>

using namespace qps;
using namespace qps::invasion;

TEST_SUITE("invasion") {

TEST_CASE("reward rules under permutations") {
    GameState state;
    SUBCASE("identity permutation rewards the matching move") {
        CHECK(env_round(state, 0, 0) == 1); // signal down, action down
        CHECK(env_round(state, 1, 0) == 0); // signal down, action left
    }
    SUBCASE("swapping down and left changes the meaning of the signal") {
        state.permutation = Permutation::swap_down_left;
        CHECK(env_round(state, 0, 0) == 0); // down no longer blocks
        CHECK(env_round(state, 1, 0) == 1); // left does
    }
    SUBCASE("rewards are a pure function of (permutation, signal, action)") {
        for (int signal = 0; signal < 3; ++signal) {
            for (int action = 0; action < 3; ++action) {
                const int first = env_round(state, action, signal);
                for (int rep = 0; rep < 3; ++rep) {
                    CHECK(env_round(state, action, signal) == first);
                }
            }
        }
    }
}

TEST_CASE("learning drives the block rate up (classical agent)") {
    SessionConfig config;
    config.agent = AgentKind::classical_rps;
    config.rounds = 500;
    Rng rng(5);
    const SessionHistory history = run_session(config, rng);
    REQUIRE(history.rounds.size() == 500);
    CHECK(history.block_rate(400, 500) >= 0.8);
}

TEST_CASE("learning drives the block rate up (quantum agent)") {
    SessionConfig config;
    config.agent = AgentKind::quantum_rps;
    config.rounds = 500;
    Rng rng(6);
    const SessionHistory history = run_session(config, rng);
    CHECK(history.block_rate(400, 500) >= 0.8);
}

TEST_CASE("flags never empty at round start and reset after losing the last one") {
    SessionConfig config;
    config.agent = AgentKind::classical_rps;
    config.rounds = 400;
    config.switch_at = 200;
    config.initial_bias = 0.9;
    Rng rng(7);
    const SessionHistory history = run_session(config, rng);

    bool saw_reset = false;
    for (std::size_t i = 0; i < history.rounds.size(); ++i) {
        const auto& r = history.rounds[i];
        CHECK(r.flags_mask != 0u);
        CHECK(r.epsilon > 0.0);
        if (i > 0 && history.rounds[i - 1].signal == r.signal &&
            std::bitset<3>(history.rounds[i - 1].flags_mask).count() == 1 &&
            history.rounds[i - 1].reward == 0) {
            // The single flagged action went unrewarded: all flags re-set.
            CHECK(r.flags_mask == 0b111u);
            saw_reset = true;
        }
    }
    CHECK(saw_reset);
}

TEST_CASE("with a static adversary the rewarded h-value never decreases") {
    // gamma = 0: h-values only grow on reward, so the block rate trend is
    // monotone in expectation; spot-check the records for consistency.
    SessionConfig config;
    config.agent = AgentKind::classical_rps;
    config.rounds = 300;
    Rng rng(11);
    const SessionHistory history = run_session(config, rng);
    // Epsilon recorded is the flagged mass; with gamma=0 rewarded actions
    // keep their flags, so a rewarded round never shrinks the flag set of
    // its percept.
    std::array<unsigned, 3> last_mask{0b111u, 0b111u, 0b111u};
    for (const auto& r : history.rounds) {
        const auto percept = static_cast<std::size_t>(r.signal);
        if (r.reward == 1) {
            CHECK((last_mask[percept] & (1u << r.action)) != 0u);
        }
        last_mask[percept] = r.flags_mask;
        // The mask recorded at round start matches what the previous round
        // left behind, by construction of the loop above.
    }
}

TEST_CASE("quantum relearning is cheaper than classical on the low-eps rounds") {
    // Well-taught network, adversary switches strategy at round 0 via the
    // cyclic permutation: every percept's flagged action is now wrong and
    // the agents must output the low-mass tail. The uniform-m schedule only
    // beats plain sampling once eps is small (the Fig. 9 curves cross near
    // eps ~ 0.05), so the comparison is made on rounds deliberating at
    // matched eps <= 0.05, with a 0.98 bias so such rounds are plentiful.
    auto matched_cost = [](AgentKind agent, std::uint64_t seed) {
        SessionConfig config;
        config.agent = agent;
        config.rounds = 300;
        config.switch_at = 0;
        config.switch_to = Permutation::cycle;
        config.initial_bias = 0.98;
        config.reward_value = 0.5; // slows h-value growth so low-eps rounds are plentiful
        Rng rng(seed);
        const SessionHistory history = run_session(config, rng);
        double cost = 0.0;
        long count = 0;
        for (const auto& r : history.rounds) {
            if (r.epsilon <= 0.05) {
                cost += static_cast<double>(r.n_u);
                ++count;
            }
        }
        REQUIRE(count > 15);
        return cost / static_cast<double>(count);
    };

    double classical_cost = 0.0;
    double quantum_cost = 0.0;
    const int sessions = 5;
    for (int s = 0; s < sessions; ++s) {
        classical_cost += matched_cost(AgentKind::classical_rps, 1000 + s);
        quantum_cost += matched_cost(AgentKind::quantum_rps, 2000 + s);
    }
    classical_cost /= sessions;
    quantum_cost /= sessions;
    // Classical needs O(1/eps) ~ 25+ samples there; quantum O(1/sqrt(eps)).
    CHECK(quantum_cost < classical_cost);
    CHECK(classical_cost > 10.0);
}

TEST_CASE("session log has the declared csv schema") {
    SessionConfig config;
    config.rounds = 5;
    Rng rng(3);
    const SessionHistory history = run_session(config, rng);
    std::ostringstream out;
    write_session_csv(out, history);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "round,signal,action,reward,n_u,epsilon,flags_bitmask");
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++lines;
    }
    CHECK(lines == 5);
}

} // TEST_SUITE
