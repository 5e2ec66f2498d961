#pragma once

#include "qps/classical.hpp"
#include "qps/ecm.hpp"
#include "qps/linalg.hpp"
#include "qps/rng.hpp"

#include <vector>

namespace qps::quantum {

// Ideal (noise-free) matrix-level quantum layer: probability unitaries built
// from nested controlization angles, the Szegedy walk operator on a doubled
// register, phase detection / approximate reflection, and the Grover-like
// deliberation loop with its rank-one fast path.
//
// Basis conventions: clip c_i is the computational basis state with index
// i-1, |0> is basis state 0, and the first register of a two-register state
// is the most significant index block (index = i * D + j for |c_i>|c_j>).

using classical::EmptyTail;
using classical::WalkOutcome;

class LengthNotPowerOfTwo : public Error {
  public:
    using Error::Error;
};

class NotReversible : public Error {
  public:
    using Error::Error;
};

class EmptyTargets : public Error {
  public:
    using Error::Error;
};

// Nested controlization angles for one probability distribution of length
// 2^k: level l (1-based) holds 2^(l-1) angles; the angle of a node satisfies
// cos^2(theta/2) = left-subtree mass / node mass, with theta = 0 on
// zero-mass nodes. All angles lie in [0, pi].
class AngleTree {
  public:
    AngleTree(int depth, std::vector<double> angles);

    int depth() const { return depth_; }
    Eigen::Index leaf_count() const { return Eigen::Index{1} << depth_; }
    double angle(int level, Eigen::Index index) const;
    const std::vector<double>& angles() const { return angles_; }

    // Leaf products cos^2/sin^2 along each root-to-leaf path; recovers the
    // source distribution.
    Vector reconstruct() const;

  private:
    int depth_;
    std::vector<double> angles_; // level-by-level
};

// Angles for a distribution of length 2^k. The caller pads shorter
// distributions first (see pad_distribution).
AngleTree controlization_angles(const Vector& p);

// Single-qubit Y rotation exp(-i theta/2 Y).
CMatrix rotation_y(double theta);

// Probability unitary U(theta_1, ..., theta_{N-1}) assembled by nested
// controlization; the first column is sqrt(p), real and non-negative.
CMatrix probability_unitary(const AngleTree& tree);

// Convenience: probability_unitary(controlization_angles(p)).
CMatrix probability_unitary(const Vector& p);

// Block-diagonal ctrl(U_0, ..., U_{M-1}): |j>|psi> -> |j> U_j |psi>.
// Branch count must be a power of two and all branches square of equal size.
CMatrix coherent_ctrl(const std::vector<CMatrix>& branches);

// Reflection 2 sum_{s in targets} |s><s| - 1 on one register of dimension
// `dim`; targets are basis-state indices (0-based).
CMatrix ref_actions(Eigen::Index dim, const std::vector<Eigen::Index>& target_states);

// Power-of-two embedding of a clip network: clip counts that are not powers
// of two are padded by duplicating the last clip, with its probability mass
// (and stationary mass) split equally across the duplicates. Measurement
// outcomes on duplicates decode back to the source clip.
struct PaddedChain {
    int original_n = 0;
    int qubits = 0;                      // k, register dimension is 2^k
    Matrix p;                            // padded transition matrix
    std::vector<int> owner;              // basis state (0-based) -> clip id (1-based)
    Eigen::Index dim() const { return p.rows(); }
    int decode(Eigen::Index basis_state) const { return owner[static_cast<std::size_t>(basis_state)]; }
    std::vector<Eigen::Index> states_of(int clip_id) const;
};

PaddedChain pad_chain(const Matrix& p);
Vector pad_distribution(const Vector& pi);

// Basis states (0-based) carrying the flags, duplicates included.
std::vector<Eigen::Index> flagged_states(const PaddedChain& chain, const ecm::FlagSet& flags);

// Diffusion operator U_P |c_i>|0> = |c_i> U_i |0> with U_i the probability
// unitary of column i.
CMatrix diffusion_operator(const Matrix& padded_p);

// SWAP of the two registers of a D x D two-register space.
CMatrix swap_registers(Eigen::Index d);

// Szegedy walk operator W(P) = ref(B) ref(A) on registers I (x) II, with
// ref(A) = U_P (1 (x) D0) U_P† and ref(B) = V_P (D0 (x) 1) V_P†. For
// time-reversible chains V_P = SWAP U_P SWAP; otherwise the caller must
// supply the time-reversed matrix P* (ecm::time_reversed) and V_P is built
// from its column unitaries. Throws NotReversible when P fails detailed
// balance and no P* is given. The input is padded internally.
CMatrix build_walk_operator(const Matrix& p);
CMatrix build_walk_operator(const Matrix& p, const Matrix& p_star);

bool satisfies_detailed_balance(const Matrix& p, const Vector& pi, double tol = 1e-10);

// Coherent encoding of the stationary distribution,
// |pi'> = U_P |pi>|0> = sum_i sqrt(pi_i) |c_i> U_i |0>; the unique (+1)
// eigenstate of W(P). Product state for rank-one chains.
CVector stationary_state(const Matrix& p);

// Approximate reflection operator on Aux (x) I (x) II with n+1 ancillas:
// PD(W)† (D0_Aux (x) 1) PD(W), where PD(W) sandwiches ancilla-controlled
// powers W^(2^m) between Hadamard layers. Fixes |0...0>_Aux |pi'>; on the
// remaining states it approximates -1, improving with n. For Hermitian W
// (rank-one chains) the ancilla-zero block equals W exactly.
CMatrix aro(const CMatrix& w, int n);

// Smallest ancilla count consistent with the log2(1/sqrt(delta)) scaling.
int default_ancilla_count(double delta);

// Maximum coherent iteration count m_eps = ceil(1/sqrt(epsilon)).
int m_eps_for(double epsilon);

// Clip-basis distribution (decoded to original clips) of one rank-one
// deliberation attempt with exactly m Grover iterations at sigma = 0:
// |<c | (U D0 U† ref(A))^m U |0>|^2. Shared by rank_one_deliberate and the
// pulse-level equivalence tests.
Vector rank_one_attempt_distribution(const Vector& pi, const ecm::FlagSet& flags, int m);

// Rank-one deliberation: draw m uniform on {0..m_eps}, rotate, measure,
// repeat until a flagged action appears. `steps` counts applications of U
// and U† (2m+1 per attempt).
WalkOutcome rank_one_deliberate(const Vector& pi, const ecm::FlagSet& flags, int m_eps, Rng& rng,
                                long attempt_limit = classical::kDefaultStepLimit);

// General-chain deliberation: prepare |pi'>, alternate ref over flagged
// actions (register I) with the ARO m times, measure register I, repeat
// until a flagged action appears. `steps` counts diffusion-operator calls:
// 1 per preparation plus 8 (2^(n+1) - 1) per ARO application (each walk
// step W costs four U_P-or-adjoint applications).
WalkOutcome grover_deliberate(const Matrix& p, const ecm::FlagSet& flags, int n, Rng& rng,
                              long attempt_limit = classical::kDefaultStepLimit);

} // namespace qps::quantum
