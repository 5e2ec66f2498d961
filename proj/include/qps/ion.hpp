#pragma once

#include "qps/ecm.hpp"
#include "qps/linalg.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace qps::ion {

// Trapped-ion pulse schedules and their exact unitary semantics.
//
// Pulse kinds and the spaces they act on:
//   collectiveX        exp(-i theta/2 sum_i X_i) on the computational levels
//   singleZ            exp(-i theta/2 Z) on one ion's computational levels
//   moelmerSoerensen   Y-type rotation transferring |gg> <-> |g'g'> (the
//                      hide step of the D0 reflection); one extra basis
//                      state is adjoined to the two-qubit space for it
//   detunedCZ          sideband Y rotation |g>|0>_v <-> |e>|1>_v on one ion
//   detunedHide        Y rotations |g>|1>_v <-> |g'>|0>_v and
//                      |e>|1>_v <-> |e'>|0>_v on one ion (one record covers
//                      the H1/H2 pulse pair)
//   detunedSwitch      carrier Y rotations |g> <-> |g'> and |e> <-> |e'> on
//                      one ion (one record covers the Sg/Se pulse pair)
//
// Counting convention: every Y-type rotation takes three elementary laser
// pulses, so a detunedCZ record costs 3 and the pair records detunedHide /
// detunedSwitch cost 6; collectiveX, singleZ and moelmerSoerensen records
// are single pulses. laser_pulse_count() tallies that cost; size() is the
// number of records.

enum class PulseKind {
    collective_x,
    single_z,
    moelmer_soerensen,
    detuned_cz,
    detuned_hide,
    detuned_switch,
};

// Target value for pulses addressing the whole chain.
constexpr int kAllIons = 0;

struct Pulse {
    PulseKind kind;
    int target; // 1-based ion index, or kAllIons
    double angle;
};

class UnsupportedKindForDimension : public Error {
  public:
    using Error::Error;
};

class UnsupportedFlagSet : public Error {
  public:
    using Error::Error;
};

class KTooSmall : public Error {
  public:
    using Error::Error;
};

class VibrationalModeNotGround : public Error {
  public:
    using Error::Error;
};

int laser_pulse_cost(PulseKind kind);
std::string kind_name(PulseKind kind);
PulseKind kind_from_name(const std::string& name);

class PulseSequence {
  public:
    explicit PulseSequence(int qubits);
    PulseSequence(int qubits, const std::vector<Pulse>& pulses);

    int qubits() const { return qubits_; }
    std::size_t size() const { return pulses_.size(); }
    const std::vector<Pulse>& pulses() const { return pulses_; }
    const Pulse& operator[](std::size_t i) const { return pulses_[i]; }
    auto begin() const { return pulses_.begin(); }
    auto end() const { return pulses_.end(); }

    void append(const Pulse& p);
    void append(const PulseSequence& other);

    // Elementary laser pulses implied by the records (see header comment).
    int laser_pulse_count() const;

  private:
    void check_pulse(const Pulse& p) const;
    int qubits_;
    std::vector<Pulse> pulses_;
};

// Simulation spaces for pulse unitaries.
//   computational: dimension 2^k; collectiveX and singleZ only.
//   extended: two qubits plus the |g'g'> hide state, dimension 5; adds
//             moelmerSoerensen. This is the space of the rank-one
//             deliberation sequences.
//   multilevel: two ions with levels {g, e, g', e'} and a two-level common
//               vibrational mode, dimension 32; all kinds. Basis index is
//               (l1*4 + l2)*2 + v.
enum class PulseSpace { computational, extended, multilevel };

constexpr Eigen::Index kMultilevelDim = 32;
constexpr Eigen::Index kExtendedDim = 5;

CMatrix pulse_unitary(const Pulse& p, int qubits, PulseSpace space = PulseSpace::computational);

// Applies the pulses in order (first record first). The space is inferred
// from the state dimension: 2^k computational, 2^k+1 extended (two qubits
// only), 32 multilevel (two qubits only).
CVector apply_sequence(const CVector& state, const PulseSequence& seq);

// In-place pulse application on the five-amplitude extended state
// {|00>, |01>, |10>, |11>, |g'g'>}; the hot path of the noise experiments.
void apply_pulse_extended(std::array<Complex, 5>& amps, PulseKind kind, int target, double angle);

// Pulse schedule text format: one record per line,
// "<kind> <target> <angle>", target "all" or a 1-based ion index, angle
// printed with 17 significant digits. Parsing is strict.
void write_pulses(std::ostream& out, const PulseSequence& seq);
void write_pulses_file(const std::string& path, const PulseSequence& seq);
PulseSequence read_pulses(std::istream& in, int qubits);

// U_Y(theta) on one ion via three pulses: X(pi/2), Z(theta), X(-pi/2).
PulseSequence compile_y(double theta, int ion, int qubits);

// -i H on one ion via four pulses: Z(pi), X(pi/2), Z(pi/2), X(-pi/2).
// The composed matrix equals the Hadamard times a global phase of -i, which
// cancels over the four uses per ancilla in the phase-detection circuit.
PulseSequence compile_hadamard(int ion, int qubits);

// The two-qubit rank-one probability unitary U(theta1, theta2) =
// U_Y1(2 theta1) (x) U_Y2(2 theta2) via four pulses:
// X(pi/2), Z1(2 theta1), Z2(2 theta2), X(-pi/2).
PulseSequence compile_rank_one_unitary(double theta1, double theta2);

// Angles of the three-clip encoding: theta1 = arccos sqrt(pi1 + pi2),
// theta2 = arccos sqrt(pi1 / (pi1 + pi2)) (zero when pi1 + pi2 = 0).
struct RankOneAngles {
    double theta1;
    double theta2;
};
RankOneAngles deliberation_angles(double pi1, double pi2);

// Full rank-one deliberation template: 4 preparation pulses plus m Grover
// blocks of 12 pulses each (flag reflection Z1(pi); U-dagger, 4; D0 as
// MS(pi), Z1(2 pi), MS(-pi); U, 4). Total 4 + 12m. The flag set must be
// {c1, c2}: that is the only set realizable as the single Z pulse of the
// block contract under the Table-1 encoding.
PulseSequence compile_rank_one_deliberation(double theta1, double theta2, const std::set<int>& flags,
                                            int m);

// Clip-basis distribution (c1, c2, c3) after the preparation pulses on
// |00>; |10> and |11> decode jointly to c3.
Vector measurement_distribution(double theta1, double theta2);

// Elementary laser pulses of a k-qubit probability unitary assembled by the
// ion-chain controlization protocol: 7*2^(k+2) - 24k - 29, for k >= 2.
long pulse_count_formula(int k);

// Result of the two-ion coherent-controlization protocol.
struct ControlizationResult {
    CMatrix unitary;        // 32x32 multilevel unitary of the protocol steps
    PulseSequence schedule; // control block of the pulse program (32 laser pulses)

    // Applies the protocol to a multilevel state; the vibrational mode must
    // start in |0>_v.
    CVector apply(const CVector& state) const;
};

// Steps (i)-(viii) on two ions: encode the control ion in the vibrational
// mode, hide, apply U(theta3), switch, apply U(theta2), switch back, unhide,
// return control. Restricted to the computational subspace (x) |0>_v the
// protocol equals ctrl(U(theta2), U(theta3)) up to a global phase, and the
// vibrational mode and primed levels return to rest.
ControlizationResult controlization_protocol_2ion(double theta2, double theta3);

// Complete pulse program of the two-qubit probability unitary
// U(theta1, theta2, theta3): the initial U(theta1) rotation plus the control
// block, with the computational X pulses shared as one X(pi/2) at the start
// and one X(-pi/2) at the end. laser_pulse_count() == pulse_count_formula(2)
// == 35.
PulseSequence compile_controlization_2ion(double theta1, double theta2, double theta3);

// Embedding of a two-qubit computational state into the multilevel space
// (primed levels empty, vibrational mode in |0>_v) and projections back.
CVector embed_computational(const CVector& two_qubit_state);
CVector computational_block(const CVector& multilevel_state);
double off_computational_norm(const CVector& multilevel_state);
double vibrational_excited_norm(const CVector& multilevel_state);

} // namespace qps::ion
