#include "qps/ion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qps::ion {

namespace {

constexpr double kNormTol = 1e-10;

// Multilevel basis index: ion levels l in {0:g, 1:e, 2:g', 3:e'},
// vibrational mode v in {0, 1}.
inline Eigen::Index ml_index(int l1, int l2, int v) {
    return (l1 * 4 + l2) * 2 + v;
}

// Real Y-type rotation on the ordered pair (a, b): |a> -> cos|a> + sin|b>.
inline void rotate_pair_y(CVector& amps, Eigen::Index a, Eigen::Index b, double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const Complex va = amps(a);
    const Complex vb = amps(b);
    amps(a) = c * va - s * vb;
    amps(b) = s * va + c * vb;
}

// X rotation exp(-i theta/2 X) on the ordered pair (a, b).
inline void rotate_pair_x(CVector& amps, Eigen::Index a, Eigen::Index b, double theta) {
    const double c = std::cos(theta / 2.0);
    const Complex is(0.0, std::sin(theta / 2.0));
    const Complex va = amps(a);
    const Complex vb = amps(b);
    amps(a) = c * va - is * vb;
    amps(b) = c * vb - is * va;
}

void apply_pulse_computational(CVector& amps, const Pulse& p, int qubits) {
    const Eigen::Index dim = Eigen::Index{1} << qubits;
    switch (p.kind) {
        case PulseKind::collective_x:
            for (int q = 0; q < qubits; ++q) {
                const Eigen::Index bit = Eigen::Index{1} << (qubits - 1 - q);
                for (Eigen::Index i = 0; i < dim; ++i) {
                    if (!(i & bit)) {
                        rotate_pair_x(amps, i, i | bit, p.angle);
                    }
                }
            }
            return;
        case PulseKind::single_z: {
            const Eigen::Index bit = Eigen::Index{1} << (qubits - p.target);
            const Complex low = std::polar(1.0, -p.angle / 2.0);
            const Complex high = std::polar(1.0, p.angle / 2.0);
            for (Eigen::Index i = 0; i < dim; ++i) {
                amps(i) *= (i & bit) ? high : low;
            }
            return;
        }
        default:
            throw UnsupportedKindForDimension("pulse kind " + kind_name(p.kind) +
                                              " is not defined on the computational space");
    }
}

void apply_pulse_multilevel(CVector& amps, const Pulse& p) {
    switch (p.kind) {
        case PulseKind::collective_x:
            for (int ion = 1; ion <= 2; ++ion) {
                for (int lo = 0; lo < 4; ++lo) {
                    for (int v = 0; v < 2; ++v) {
                        const Eigen::Index a = ion == 1 ? ml_index(0, lo, v) : ml_index(lo, 0, v);
                        const Eigen::Index b = ion == 1 ? ml_index(1, lo, v) : ml_index(lo, 1, v);
                        rotate_pair_x(amps, a, b, p.angle);
                    }
                }
            }
            return;
        case PulseKind::single_z: {
            const Complex low = std::polar(1.0, -p.angle / 2.0);
            const Complex high = std::polar(1.0, p.angle / 2.0);
            for (int l1 = 0; l1 < 4; ++l1) {
                for (int l2 = 0; l2 < 4; ++l2) {
                    const int level = p.target == 1 ? l1 : l2;
                    if (level >= 2) {
                        continue; // primed levels are off-resonant
                    }
                    for (int v = 0; v < 2; ++v) {
                        amps(ml_index(l1, l2, v)) *= level ? high : low;
                    }
                }
            }
            return;
        }
        case PulseKind::moelmer_soerensen:
            for (int v = 0; v < 2; ++v) {
                rotate_pair_y(amps, ml_index(0, 0, v), ml_index(2, 2, v), p.angle);
            }
            return;
        case PulseKind::detuned_cz:
            for (int lo = 0; lo < 4; ++lo) {
                const Eigen::Index a = p.target == 1 ? ml_index(0, lo, 0) : ml_index(lo, 0, 0);
                const Eigen::Index b = p.target == 1 ? ml_index(1, lo, 1) : ml_index(lo, 1, 1);
                rotate_pair_y(amps, a, b, p.angle);
            }
            return;
        case PulseKind::detuned_hide:
            for (int lo = 0; lo < 4; ++lo) {
                for (int pair = 0; pair < 2; ++pair) {
                    const int from = pair;     // g or e, with v = 1
                    const int to = pair + 2;   // g' or e', with v = 0
                    const Eigen::Index a = p.target == 1 ? ml_index(from, lo, 1) : ml_index(lo, from, 1);
                    const Eigen::Index b = p.target == 1 ? ml_index(to, lo, 0) : ml_index(lo, to, 0);
                    rotate_pair_y(amps, a, b, p.angle);
                }
            }
            return;
        case PulseKind::detuned_switch:
            for (int lo = 0; lo < 4; ++lo) {
                for (int v = 0; v < 2; ++v) {
                    for (int pair = 0; pair < 2; ++pair) {
                        const Eigen::Index a =
                            p.target == 1 ? ml_index(pair, lo, v) : ml_index(lo, pair, v);
                        const Eigen::Index b =
                            p.target == 1 ? ml_index(pair + 2, lo, v) : ml_index(lo, pair + 2, v);
                        rotate_pair_y(amps, a, b, p.angle);
                    }
                }
            }
            return;
    }
    throw UnsupportedKindForDimension("unknown pulse kind");
}

} // namespace

int laser_pulse_cost(PulseKind kind) {
    switch (kind) {
        case PulseKind::collective_x:
        case PulseKind::single_z:
        case PulseKind::moelmer_soerensen:
            return 1;
        case PulseKind::detuned_cz:
            return 3; // one Y rotation
        case PulseKind::detuned_hide:
        case PulseKind::detuned_switch:
            return 6; // two Y rotations
    }
    return 1;
}

std::string kind_name(PulseKind kind) {
    switch (kind) {
        case PulseKind::collective_x: return "collectiveX";
        case PulseKind::single_z: return "singleZ";
        case PulseKind::moelmer_soerensen: return "moelmerSoerensen";
        case PulseKind::detuned_cz: return "detunedCZ";
        case PulseKind::detuned_hide: return "detunedHide";
        case PulseKind::detuned_switch: return "detunedSwitch";
    }
    return "?";
}

PulseKind kind_from_name(const std::string& name) {
    if (name == "collectiveX") return PulseKind::collective_x;
    if (name == "singleZ") return PulseKind::single_z;
    if (name == "moelmerSoerensen") return PulseKind::moelmer_soerensen;
    if (name == "detunedCZ") return PulseKind::detuned_cz;
    if (name == "detunedHide") return PulseKind::detuned_hide;
    if (name == "detunedSwitch") return PulseKind::detuned_switch;
    throw Error("unknown pulse kind '" + name + "'");
}

PulseSequence::PulseSequence(int qubits) : qubits_(qubits) {
    if (qubits_ < 1) {
        throw Error("PulseSequence: need at least one qubit");
    }
}

PulseSequence::PulseSequence(int qubits, const std::vector<Pulse>& pulses) : PulseSequence(qubits) {
    for (const auto& p : pulses) {
        append(p);
    }
}

void PulseSequence::check_pulse(const Pulse& p) const {
    if (!std::isfinite(p.angle)) {
        throw Error("pulse angle must be finite");
    }
    const bool collective =
        p.kind == PulseKind::collective_x || p.kind == PulseKind::moelmer_soerensen;
    if (collective && p.target != kAllIons) {
        throw Error(kind_name(p.kind) + " pulses address the whole chain");
    }
    if (!collective && (p.target < 1 || p.target > qubits_)) {
        throw Error(kind_name(p.kind) + " pulse needs an ion index in [1, " +
                    std::to_string(qubits_) + "]");
    }
}

void PulseSequence::append(const Pulse& p) {
    check_pulse(p);
    pulses_.push_back(p);
}

void PulseSequence::append(const PulseSequence& other) {
    for (const auto& p : other.pulses_) {
        append(p);
    }
}

int PulseSequence::laser_pulse_count() const {
    int count = 0;
    for (const auto& p : pulses_) {
        count += laser_pulse_cost(p.kind);
    }
    return count;
}

CMatrix pulse_unitary(const Pulse& p, int qubits, PulseSpace space) {
    Eigen::Index dim = 0;
    switch (space) {
        case PulseSpace::computational:
            dim = Eigen::Index{1} << qubits;
            break;
        case PulseSpace::extended:
            if (qubits != 2) {
                throw UnsupportedKindForDimension("the extended space is defined for two qubits");
            }
            dim = kExtendedDim;
            break;
        case PulseSpace::multilevel:
            if (qubits != 2) {
                throw UnsupportedKindForDimension("the multilevel space is defined for two ions");
            }
            dim = kMultilevelDim;
            break;
    }
    CMatrix u(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        CVector v = CVector::Zero(dim);
        v(col) = 1.0;
        if (space == PulseSpace::computational) {
            apply_pulse_computational(v, p, qubits);
        } else if (space == PulseSpace::multilevel) {
            apply_pulse_multilevel(v, p);
        } else {
            std::array<Complex, 5> amps{v(0), v(1), v(2), v(3), v(4)};
            apply_pulse_extended(amps, p.kind, p.target, p.angle);
            for (Eigen::Index i = 0; i < 5; ++i) {
                v(i) = amps[static_cast<std::size_t>(i)];
            }
        }
        u.col(col) = v;
    }
    return u;
}

void apply_pulse_extended(std::array<Complex, 5>& amps, PulseKind kind, int target, double angle) {
    switch (kind) {
        case PulseKind::collective_x: {
            const double c = std::cos(angle / 2.0);
            const Complex is(0.0, std::sin(angle / 2.0));
            // qubit 1: pairs (0,2), (1,3); qubit 2: pairs (0,1), (2,3)
            for (const auto& [a, b] : {std::pair<int, int>{0, 2}, {1, 3}}) {
                const Complex va = amps[a], vb = amps[b];
                amps[a] = c * va - is * vb;
                amps[b] = c * vb - is * va;
            }
            for (const auto& [a, b] : {std::pair<int, int>{0, 1}, {2, 3}}) {
                const Complex va = amps[a], vb = amps[b];
                amps[a] = c * va - is * vb;
                amps[b] = c * vb - is * va;
            }
            return;
        }
        case PulseKind::single_z: {
            const Complex low = std::polar(1.0, -angle / 2.0);
            const Complex high = std::polar(1.0, angle / 2.0);
            const int bit = target == 1 ? 2 : 1;
            for (int i = 0; i < 4; ++i) {
                amps[i] *= (i & bit) ? high : low;
            }
            return;
        }
        case PulseKind::moelmer_soerensen: {
            const double c = std::cos(angle / 2.0);
            const double s = std::sin(angle / 2.0);
            const Complex va = amps[0], vb = amps[4];
            amps[0] = c * va - s * vb;
            amps[4] = s * va + c * vb;
            return;
        }
        default:
            throw UnsupportedKindForDimension("pulse kind " + kind_name(kind) +
                                              " is not defined on the extended space");
    }
}

CVector apply_sequence(const CVector& state, const PulseSequence& seq) {
    const Eigen::Index comp_dim = Eigen::Index{1} << seq.qubits();
    const double norm_in = state.norm();
    CVector out = state;

    if (state.size() == comp_dim) {
        for (const auto& p : seq) {
            apply_pulse_computational(out, p, seq.qubits());
        }
    } else if (seq.qubits() == 2 && state.size() == kExtendedDim) {
        std::array<Complex, 5> amps{out(0), out(1), out(2), out(3), out(4)};
        for (const auto& p : seq) {
            apply_pulse_extended(amps, p.kind, p.target, p.angle);
        }
        for (Eigen::Index i = 0; i < 5; ++i) {
            out(i) = amps[static_cast<std::size_t>(i)];
        }
    } else if (seq.qubits() == 2 && state.size() == kMultilevelDim) {
        for (const auto& p : seq) {
            apply_pulse_multilevel(out, p);
        }
    } else {
        throw DimensionMismatch("apply_sequence: state dimension " + std::to_string(state.size()) +
                                " does not match any simulation space of a " +
                                std::to_string(seq.qubits()) + "-qubit sequence");
    }

    if (std::abs(out.norm() - norm_in) > kNormTol * std::max(1.0, norm_in)) {
        throw Error("apply_sequence: norm not preserved");
    }
    return out;
}

void write_pulses(std::ostream& out, const PulseSequence& seq) {
    char buf[32];
    for (const auto& p : seq) {
        std::snprintf(buf, sizeof(buf), "%.17g", p.angle);
        if (p.target == kAllIons) {
            out << kind_name(p.kind) << " all " << buf << "\n";
        } else {
            out << kind_name(p.kind) << " " << p.target << " " << buf << "\n";
        }
    }
}

void write_pulses_file(const std::string& path, const PulseSequence& seq) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open pulse file '" + path + "' for writing");
    }
    write_pulses(out, seq);
}

PulseSequence read_pulses(std::istream& in, int qubits) {
    PulseSequence seq(qubits);
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream row(line);
        std::string kind_token, target_token, angle_token, extra;
        if (!(row >> kind_token >> target_token >> angle_token)) {
            throw Error("pulse parse: malformed line " + std::to_string(line_no));
        }
        if (row >> extra) {
            throw Error("pulse parse: trailing token on line " + std::to_string(line_no));
        }
        Pulse p{};
        p.kind = kind_from_name(kind_token);
        if (target_token == "all") {
            p.target = kAllIons;
        } else {
            std::size_t used = 0;
            p.target = std::stoi(target_token, &used);
            if (used != target_token.size()) {
                throw Error("pulse parse: bad target on line " + std::to_string(line_no));
            }
        }
        std::size_t used = 0;
        p.angle = std::stod(angle_token, &used);
        if (used != angle_token.size()) {
            throw Error("pulse parse: bad angle on line " + std::to_string(line_no));
        }
        seq.append(p);
    }
    return seq;
}

PulseSequence compile_y(double theta, int ion, int qubits) {
    PulseSequence seq(qubits);
    seq.append({PulseKind::collective_x, kAllIons, M_PI / 2.0});
    seq.append({PulseKind::single_z, ion, theta});
    seq.append({PulseKind::collective_x, kAllIons, -M_PI / 2.0});
    return seq;
}

PulseSequence compile_hadamard(int ion, int qubits) {
    PulseSequence seq(qubits);
    seq.append({PulseKind::single_z, ion, M_PI});
    seq.append({PulseKind::collective_x, kAllIons, M_PI / 2.0});
    seq.append({PulseKind::single_z, ion, M_PI / 2.0});
    seq.append({PulseKind::collective_x, kAllIons, -M_PI / 2.0});
    return seq;
}

PulseSequence compile_rank_one_unitary(double theta1, double theta2) {
    PulseSequence seq(2);
    seq.append({PulseKind::collective_x, kAllIons, M_PI / 2.0});
    seq.append({PulseKind::single_z, 1, 2.0 * theta1});
    seq.append({PulseKind::single_z, 2, 2.0 * theta2});
    seq.append({PulseKind::collective_x, kAllIons, -M_PI / 2.0});
    return seq;
}

RankOneAngles deliberation_angles(double pi1, double pi2) {
    if (pi1 < 0.0 || pi2 < 0.0 || pi1 + pi2 > 1.0 + ecm::kStochasticTol) {
        throw Error("deliberation_angles: need pi1, pi2 >= 0 with pi1 + pi2 <= 1");
    }
    const double eps = pi1 + pi2;
    RankOneAngles angles{};
    angles.theta1 = std::acos(std::sqrt(std::min(1.0, eps)));
    angles.theta2 = eps > 0.0 ? std::acos(std::sqrt(std::min(1.0, pi1 / eps))) : 0.0;
    return angles;
}

PulseSequence compile_rank_one_deliberation(double theta1, double theta2, const std::set<int>& flags,
                                            int m) {
    if (m < 0) {
        throw Error("compile_rank_one_deliberation: negative iteration count");
    }
    if (flags != std::set<int>{1, 2}) {
        throw UnsupportedFlagSet(
            "compile_rank_one_deliberation: only the flag set {c1, c2} maps onto the single "
            "Z pulse of the Grover block under the two-qubit encoding");
    }
    PulseSequence seq = compile_rank_one_unitary(theta1, theta2);
    for (int it = 0; it < m; ++it) {
        // Reflection over the flagged actions, up to a global phase of -i.
        seq.append({PulseKind::single_z, 1, M_PI});
        // U-dagger: reversed pulses with negated angles.
        seq.append({PulseKind::collective_x, kAllIons, M_PI / 2.0});
        seq.append({PulseKind::single_z, 2, -2.0 * theta2});
        seq.append({PulseKind::single_z, 1, -2.0 * theta1});
        seq.append({PulseKind::collective_x, kAllIons, -M_PI / 2.0});
        // D0: hide |00> in |g'g'>, flip the sign of everything else, unhide.
        seq.append({PulseKind::moelmer_soerensen, kAllIons, M_PI});
        seq.append({PulseKind::single_z, 1, 2.0 * M_PI});
        seq.append({PulseKind::moelmer_soerensen, kAllIons, -M_PI});
        // U again.
        seq.append({PulseKind::collective_x, kAllIons, M_PI / 2.0});
        seq.append({PulseKind::single_z, 1, 2.0 * theta1});
        seq.append({PulseKind::single_z, 2, 2.0 * theta2});
        seq.append({PulseKind::collective_x, kAllIons, -M_PI / 2.0});
    }
    return seq;
}

Vector measurement_distribution(double theta1, double theta2) {
    CVector state = CVector::Zero(4);
    state(0) = 1.0;
    state = apply_sequence(state, compile_rank_one_unitary(theta1, theta2));
    Vector clips(3);
    clips(0) = std::norm(state(0));
    clips(1) = std::norm(state(1));
    clips(2) = std::norm(state(2)) + std::norm(state(3));
    return clips;
}

long pulse_count_formula(int k) {
    if (k < 2) {
        throw KTooSmall("pulse_count_formula: defined for k >= 2");
    }
    return 7L * (1L << (k + 2)) - 24L * k - 29L;
}

CVector ControlizationResult::apply(const CVector& state) const {
    if (state.size() != kMultilevelDim) {
        throw DimensionMismatch("controlization protocol acts on the 32-dimensional multilevel space");
    }
    if (vibrational_excited_norm(state) > kNormTol) {
        throw VibrationalModeNotGround("controlization protocol requires the vibrational mode in |0>_v");
    }
    return unitary * state;
}

ControlizationResult controlization_protocol_2ion(double theta2, double theta3) {
    // Simulation steps (i)-(viii); the computational Y rotations keep their
    // three-pulse realization here, which composes to the exact step unitary.
    PulseSequence steps(2);
    steps.append({PulseKind::detuned_cz, 1, M_PI});
    steps.append({PulseKind::detuned_hide, 2, M_PI});
    steps.append(compile_y(theta3, 2, 2));
    steps.append({PulseKind::detuned_switch, 2, M_PI});
    steps.append(compile_y(theta2, 2, 2));
    steps.append({PulseKind::detuned_switch, 2, M_PI});
    steps.append({PulseKind::detuned_hide, 2, -M_PI});
    steps.append({PulseKind::detuned_cz, 1, -M_PI});

    CMatrix unitary = CMatrix::Identity(kMultilevelDim, kMultilevelDim);
    for (Eigen::Index col = 0; col < kMultilevelDim; ++col) {
        CVector v = unitary.col(col);
        for (const auto& p : steps) {
            apply_pulse_multilevel(v, p);
        }
        unitary.col(col) = v;
    }

    // Pulse program of the control block under the shared-X convention: the
    // computational Y rotations keep only their Z pulses, their X wrappers
    // being subsumed into the two collective pulses of the full program.
    PulseSequence schedule(2);
    schedule.append({PulseKind::detuned_cz, 1, M_PI});
    schedule.append({PulseKind::detuned_hide, 2, M_PI});
    schedule.append({PulseKind::single_z, 2, theta3});
    schedule.append({PulseKind::detuned_switch, 2, M_PI});
    schedule.append({PulseKind::single_z, 2, theta2});
    schedule.append({PulseKind::detuned_switch, 2, M_PI});
    schedule.append({PulseKind::detuned_hide, 2, -M_PI});
    schedule.append({PulseKind::detuned_cz, 1, -M_PI});

    return {std::move(unitary), std::move(schedule)};
}

PulseSequence compile_controlization_2ion(double theta1, double theta2, double theta3) {
    PulseSequence seq(2);
    seq.append({PulseKind::collective_x, kAllIons, M_PI / 2.0});
    seq.append({PulseKind::single_z, 1, theta1});
    seq.append(controlization_protocol_2ion(theta2, theta3).schedule);
    seq.append({PulseKind::collective_x, kAllIons, -M_PI / 2.0});
    return seq;
}

CVector embed_computational(const CVector& two_qubit_state) {
    if (two_qubit_state.size() != 4) {
        throw DimensionMismatch("embed_computational: expected a two-qubit state");
    }
    CVector out = CVector::Zero(kMultilevelDim);
    for (int q1 = 0; q1 < 2; ++q1) {
        for (int q2 = 0; q2 < 2; ++q2) {
            out(ml_index(q1, q2, 0)) = two_qubit_state(q1 * 2 + q2);
        }
    }
    return out;
}

CVector computational_block(const CVector& multilevel_state) {
    if (multilevel_state.size() != kMultilevelDim) {
        throw DimensionMismatch("computational_block: expected a multilevel state");
    }
    CVector out(4);
    for (int q1 = 0; q1 < 2; ++q1) {
        for (int q2 = 0; q2 < 2; ++q2) {
            out(q1 * 2 + q2) = multilevel_state(ml_index(q1, q2, 0));
        }
    }
    return out;
}

double off_computational_norm(const CVector& multilevel_state) {
    double comp = 0.0;
    for (int q1 = 0; q1 < 2; ++q1) {
        for (int q2 = 0; q2 < 2; ++q2) {
            comp += std::norm(multilevel_state(ml_index(q1, q2, 0)));
        }
    }
    return std::sqrt(std::max(0.0, multilevel_state.squaredNorm() - comp));
}

double vibrational_excited_norm(const CVector& multilevel_state) {
    double mass = 0.0;
    for (int l1 = 0; l1 < 4; ++l1) {
        for (int l2 = 0; l2 < 4; ++l2) {
            mass += std::norm(multilevel_state(ml_index(l1, l2, 1)));
        }
    }
    return std::sqrt(mass);
}

} // namespace qps::ion
