// Python bindings for the main operations: network validation, classical
// walks, probability unitaries and walk operators, pulse compilation, and
// the Monte-Carlo noise experiments.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qps/classical.hpp"
#include "qps/ecm.hpp"
#include "qps/invasion.hpp"
#include "qps/ion.hpp"
#include "qps/noise.hpp"
#include "qps/quantum.hpp"
#include "qps/rng.hpp"

#include <sstream>

namespace py = pybind11;
using namespace qps;

namespace {

ecm::ClipNetwork network_from_text(const std::string& text) {
    std::istringstream in(text);
    return ecm::read_network(in);
}

std::string network_to_text(const ecm::ClipNetwork& network) {
    std::ostringstream out;
    ecm::write_network(out, network);
    return out.str();
}

ecm::FlagSet flag_set_from(const std::vector<int>& actions, const std::set<int>& flagged) {
    ecm::FlagSet flags(actions);
    for (int a : actions) {
        if (flagged.count(a) == 0) {
            // Remove the non-flagged action; restore semantics forbid an
            // empty set, which mirrors the C++ behavior.
            flags = ecm::flag_update(flags, a, false);
        }
    }
    return flags;
}

std::string pulses_to_text(const ion::PulseSequence& seq) {
    std::ostringstream out;
    ion::write_pulses(out, seq);
    return out.str();
}

} // namespace

PYBIND11_MODULE(_qps, m) {
    m.doc() = "Projective-simulation agents on trapped ions: simulator and pulse compiler";

    py::register_exception<Error>(m, "QpsError");

    // --- rng ---
    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def_static("from_stream", &Rng::from_stream, py::arg("master_seed"), py::arg("label"))
        .def("substream", &Rng::substream, py::arg("index"))
        .def("uniform", &Rng::uniform)
        .def("uniform_int", &Rng::uniform_int, py::arg("bound"))
        .def("normal", &Rng::normal, py::arg("mean"), py::arg("stddev"));
    m.def("derive_seed", py::overload_cast<std::uint64_t, std::string_view>(&derive_seed),
          py::arg("seed"), py::arg("label"));

    // --- ecm ---
    py::enum_<ecm::ClipKind>(m, "ClipKind")
        .value("percept", ecm::ClipKind::percept)
        .value("action", ecm::ClipKind::action)
        .value("internal", ecm::ClipKind::internal);

    py::class_<ecm::Clip>(m, "Clip")
        .def(py::init([](int id, ecm::ClipKind kind, const std::string& label) {
                 return ecm::Clip{id, kind, label};
             }),
             py::arg("id"), py::arg("kind"), py::arg("label") = "")
        .def_readonly("id", &ecm::Clip::id)
        .def_readonly("kind", &ecm::Clip::kind)
        .def_readonly("label", &ecm::Clip::label);

    py::class_<ecm::ClipNetwork>(m, "ClipNetwork")
        .def(py::init<Matrix, std::vector<ecm::Clip>>(), py::arg("matrix"), py::arg("clips"))
        .def_static("from_text", &network_from_text, py::arg("text"))
        .def("to_text", &network_to_text)
        .def_property_readonly("size", &ecm::ClipNetwork::size)
        .def_property_readonly("matrix", &ecm::ClipNetwork::matrix)
        .def("action_ids", &ecm::ClipNetwork::action_ids)
        .def("is_action", &ecm::ClipNetwork::is_action, py::arg("clip_id"));

    py::class_<ecm::FlagSet>(m, "FlagSet")
        .def(py::init<std::vector<int>>(), py::arg("action_ids"))
        .def_static("with_flagged", &flag_set_from, py::arg("action_ids"), py::arg("flagged"))
        .def_property_readonly("flagged",
                               [](const ecm::FlagSet& f) { return f.flagged(); })
        .def("is_flagged", &ecm::FlagSet::is_flagged, py::arg("clip_id"));
    m.def("flag_update", &ecm::flag_update, py::arg("flags"), py::arg("chosen"),
          py::arg("rewarded"));

    m.def("time_reversed", &ecm::time_reversed, py::arg("p"), py::arg("pi"));

    // --- classical engine ---
    py::class_<classical::WalkOutcome>(m, "WalkOutcome")
        .def_readonly("action", &classical::WalkOutcome::action)
        .def_readonly("steps", &classical::WalkOutcome::steps)
        .def("__repr__", [](const classical::WalkOutcome& w) {
            return "WalkOutcome(action=" + std::to_string(w.action) +
                   ", steps=" + std::to_string(w.steps) + ")";
        });

    m.def("stationary_distribution", &classical::stationary_distribution, py::arg("p"),
          py::arg("tol") = 1e-12, py::arg("max_iters") = classical::kDefaultMaxIters);
    m.def("spectral_gap", &classical::spectral_gap, py::arg("p"));
    m.def("tailed_distribution", &classical::tailed_distribution, py::arg("pi"),
          py::arg("targets"));
    m.def("standard_ps_deliberate", &classical::standard_ps_deliberate, py::arg("network"),
          py::arg("start"), py::arg("rng"), py::arg("step_limit") = classical::kDefaultStepLimit);
    m.def("classical_rps_deliberate", &classical::classical_rps_deliberate, py::arg("pi"),
          py::arg("flags"), py::arg("rng"), py::arg("step_limit") = classical::kDefaultStepLimit);

    // --- quantum engine ---
    py::class_<quantum::AngleTree>(m, "AngleTree")
        .def_property_readonly("depth", &quantum::AngleTree::depth)
        .def_property_readonly("angles",
                               [](const quantum::AngleTree& t) { return t.angles(); })
        .def("reconstruct", &quantum::AngleTree::reconstruct);

    m.def("controlization_angles", &quantum::controlization_angles, py::arg("p"));
    m.def("probability_unitary",
          py::overload_cast<const Vector&>(&quantum::probability_unitary), py::arg("p"));
    m.def("coherent_ctrl", &quantum::coherent_ctrl, py::arg("branches"));
    m.def("ref_actions", &quantum::ref_actions, py::arg("dim"), py::arg("target_states"));
    m.def("build_walk_operator",
          py::overload_cast<const Matrix&>(&quantum::build_walk_operator), py::arg("p"));
    m.def("build_walk_operator",
          py::overload_cast<const Matrix&, const Matrix&>(&quantum::build_walk_operator),
          py::arg("p"), py::arg("p_star"));
    m.def("stationary_state", &quantum::stationary_state, py::arg("p"));
    m.def("aro", &quantum::aro, py::arg("w"), py::arg("n"));
    m.def("default_ancilla_count", &quantum::default_ancilla_count, py::arg("delta"));
    m.def("m_eps_for", &quantum::m_eps_for, py::arg("epsilon"));
    m.def("rank_one_attempt_distribution", &quantum::rank_one_attempt_distribution, py::arg("pi"),
          py::arg("flags"), py::arg("m"));
    m.def("rank_one_deliberate", &quantum::rank_one_deliberate, py::arg("pi"), py::arg("flags"),
          py::arg("m_eps"), py::arg("rng"),
          py::arg("attempt_limit") = classical::kDefaultStepLimit);
    m.def("grover_deliberate", &quantum::grover_deliberate, py::arg("p"), py::arg("flags"),
          py::arg("n"), py::arg("rng"), py::arg("attempt_limit") = classical::kDefaultStepLimit);

    // --- ion compiler ---
    py::enum_<ion::PulseKind>(m, "PulseKind")
        .value("collectiveX", ion::PulseKind::collective_x)
        .value("singleZ", ion::PulseKind::single_z)
        .value("moelmerSoerensen", ion::PulseKind::moelmer_soerensen)
        .value("detunedCZ", ion::PulseKind::detuned_cz)
        .value("detunedHide", ion::PulseKind::detuned_hide)
        .value("detunedSwitch", ion::PulseKind::detuned_switch);

    py::class_<ion::Pulse>(m, "Pulse")
        .def(py::init([](ion::PulseKind kind, int target, double angle) {
                 return ion::Pulse{kind, target, angle};
             }),
             py::arg("kind"), py::arg("target"), py::arg("angle"))
        .def_readonly("kind", &ion::Pulse::kind)
        .def_readonly("target", &ion::Pulse::target)
        .def_readonly("angle", &ion::Pulse::angle);

    py::class_<ion::PulseSequence>(m, "PulseSequence")
        .def(py::init<int>(), py::arg("qubits"))
        .def_property_readonly("qubits", &ion::PulseSequence::qubits)
        .def("__len__", &ion::PulseSequence::size)
        .def("__getitem__",
             [](const ion::PulseSequence& seq, std::size_t i) {
                 if (i >= seq.size()) {
                     throw py::index_error();
                 }
                 return seq[i];
             })
        .def("append", py::overload_cast<const ion::Pulse&>(&ion::PulseSequence::append))
        .def("laser_pulse_count", &ion::PulseSequence::laser_pulse_count)
        .def("to_text", &pulses_to_text);

    py::enum_<ion::PulseSpace>(m, "PulseSpace")
        .value("computational", ion::PulseSpace::computational)
        .value("extended", ion::PulseSpace::extended)
        .value("multilevel", ion::PulseSpace::multilevel);
    m.def("pulse_unitary", &ion::pulse_unitary, py::arg("pulse"), py::arg("qubits"),
          py::arg("space") = ion::PulseSpace::computational);

    m.def("apply_sequence", &ion::apply_sequence, py::arg("state"), py::arg("sequence"));
    m.def("compile_y", &ion::compile_y, py::arg("theta"), py::arg("ion"), py::arg("qubits"));
    m.def("compile_hadamard", &ion::compile_hadamard, py::arg("ion"), py::arg("qubits"));
    m.def(
        "deliberation_angles",
        [](double pi1, double pi2) {
            const auto angles = ion::deliberation_angles(pi1, pi2);
            return std::make_pair(angles.theta1, angles.theta2);
        },
        py::arg("pi1"), py::arg("pi2"));
    m.def("compile_rank_one_unitary", &ion::compile_rank_one_unitary, py::arg("theta1"),
          py::arg("theta2"));
    m.def("compile_rank_one_deliberation", &ion::compile_rank_one_deliberation, py::arg("theta1"),
          py::arg("theta2"), py::arg("flags"), py::arg("m"));
    m.def("measurement_distribution", &ion::measurement_distribution, py::arg("theta1"),
          py::arg("theta2"));
    m.def("pulse_count_formula", &ion::pulse_count_formula, py::arg("k"));
    m.def("parse_pulses", [](const std::string& text, int qubits) {
        std::istringstream in(text);
        return ion::read_pulses(in, qubits);
    });

    py::class_<ion::ControlizationResult>(m, "ControlizationResult")
        .def_readonly("unitary", &ion::ControlizationResult::unitary)
        .def_readonly("schedule", &ion::ControlizationResult::schedule)
        .def("apply", &ion::ControlizationResult::apply, py::arg("state"));
    m.def("controlization_protocol_2ion", &ion::controlization_protocol_2ion, py::arg("theta2"),
          py::arg("theta3"));
    m.def("compile_controlization_2ion", &ion::compile_controlization_2ion, py::arg("theta1"),
          py::arg("theta2"), py::arg("theta3"));
    m.def("embed_computational", &ion::embed_computational, py::arg("state"));
    m.def("computational_block", &ion::computational_block, py::arg("state"));

    // --- noise lab ---
    py::class_<noise::ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("epsilon", &noise::ExperimentConfig::epsilon)
        .def_readwrite("ratio", &noise::ExperimentConfig::ratio)
        .def_readwrite("sigma", &noise::ExperimentConfig::sigma)
        .def_readwrite("trials", &noise::ExperimentConfig::trials)
        .def_readwrite("seed", &noise::ExperimentConfig::seed)
        .def_readwrite("m_eps_override", &noise::ExperimentConfig::m_eps_override)
        .def_readwrite("attempt_limit", &noise::ExperimentConfig::attempt_limit)
        .def("pi1", &noise::ExperimentConfig::pi1)
        .def("pi2", &noise::ExperimentConfig::pi2)
        .def("m_eps", &noise::ExperimentConfig::m_eps);

    py::class_<noise::TrialRecord>(m, "TrialRecord")
        .def_readonly("action", &noise::TrialRecord::action)
        .def_readonly("n_u", &noise::TrialRecord::n_u)
        .def_readonly("attempts", &noise::TrialRecord::attempts);

    py::class_<noise::ExperimentStats>(m, "ExperimentStats")
        .def_readonly("epsilon", &noise::ExperimentStats::epsilon)
        .def_readonly("ratio", &noise::ExperimentStats::ratio)
        .def_readonly("sigma", &noise::ExperimentStats::sigma)
        .def_readonly("trials", &noise::ExperimentStats::trials)
        .def_readonly("n1", &noise::ExperimentStats::n1)
        .def_readonly("n2", &noise::ExperimentStats::n2)
        .def_readonly("mean_nu", &noise::ExperimentStats::mean_nu)
        .def_readonly("std_nu", &noise::ExperimentStats::std_nu)
        .def_readonly("std_mean_nu", &noise::ExperimentStats::std_mean_nu)
        .def("ratio_empirical", &noise::ExperimentStats::ratio_empirical)
        .def("output_distribution", &noise::ExperimentStats::output_distribution);

    m.def("run_trial", &noise::run_trial, py::arg("config"), py::arg("rng"));
    m.def("monte_carlo", &noise::monte_carlo, py::arg("config"), py::arg("trials"));
    m.def("statistical_distance", &noise::statistical_distance, py::arg("p"), py::arg("q"));
    m.def("distance_to_tailed", &noise::distance_to_tailed, py::arg("stats"));
    py::enum_<noise::ScalingModel>(m, "ScalingModel")
        .value("inverse_sqrt", noise::ScalingModel::inverse_sqrt)
        .value("inverse", noise::ScalingModel::inverse);
    m.def(
        "fit_scaling",
        [](const std::vector<std::pair<double, double>>& points, noise::ScalingModel model) {
            const auto fit = noise::fit_scaling(points, model);
            return std::make_tuple(fit.a, fit.b, fit.sse);
        },
        py::arg("points"), py::arg("model"));

    // --- invasion game ---
    py::enum_<invasion::AgentKind>(m, "AgentKind")
        .value("classical_rps", invasion::AgentKind::classical_rps)
        .value("quantum_rps", invasion::AgentKind::quantum_rps);

    py::class_<invasion::SessionConfig>(m, "SessionConfig")
        .def(py::init<>())
        .def_readwrite("agent", &invasion::SessionConfig::agent)
        .def_readwrite("rounds", &invasion::SessionConfig::rounds)
        .def_readwrite("switch_at", &invasion::SessionConfig::switch_at)
        .def_readwrite("initial_bias", &invasion::SessionConfig::initial_bias)
        .def_readwrite("reward_value", &invasion::SessionConfig::reward_value);

    py::class_<invasion::RoundRecord>(m, "RoundRecord")
        .def_readonly("round", &invasion::RoundRecord::round)
        .def_readonly("signal", &invasion::RoundRecord::signal)
        .def_readonly("action", &invasion::RoundRecord::action)
        .def_readonly("reward", &invasion::RoundRecord::reward)
        .def_readonly("n_u", &invasion::RoundRecord::n_u)
        .def_readonly("epsilon", &invasion::RoundRecord::epsilon)
        .def_readonly("flags_mask", &invasion::RoundRecord::flags_mask);

    py::class_<invasion::SessionHistory>(m, "SessionHistory")
        .def_readonly("rounds", &invasion::SessionHistory::rounds)
        .def("block_rate", &invasion::SessionHistory::block_rate, py::arg("first"),
             py::arg("last"))
        .def("mean_n_u", &invasion::SessionHistory::mean_n_u, py::arg("first"), py::arg("last"));

    m.def("run_session", &invasion::run_session, py::arg("config"), py::arg("rng"));
}
