#include "qps/quantum.hpp"

#include <algorithm>
#include <cmath>

namespace qps::quantum {

namespace {

constexpr double kUnitaryTol = 1e-10;

void walsh_hadamard_blocks(CVector& v, Eigen::Index blocks, Eigen::Index block_dim) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index stride = 1; stride < blocks; stride <<= 1) {
        for (Eigen::Index base = 0; base < blocks; base += 2 * stride) {
            for (Eigen::Index a = base; a < base + stride; ++a) {
                auto x = v.segment(a * block_dim, block_dim);
                auto y = v.segment((a + stride) * block_dim, block_dim);
                const CVector sum = (x + y) * inv_sqrt2;
                const CVector diff = (x - y) * inv_sqrt2;
                x = sum;
                y = diff;
            }
        }
    }
}

} // namespace

AngleTree::AngleTree(int depth, std::vector<double> angles) : depth_(depth), angles_(std::move(angles)) {
    if (depth_ < 0) {
        throw Error("AngleTree: negative depth");
    }
    const auto expected = static_cast<std::size_t>((std::size_t{1} << depth_) - 1);
    if (angles_.size() != expected) {
        throw Error("AngleTree: depth " + std::to_string(depth_) + " needs " + std::to_string(expected) +
                    " angles, got " + std::to_string(angles_.size()));
    }
    for (double theta : angles_) {
        if (!(theta >= 0.0 && theta <= M_PI)) {
            throw Error("AngleTree: angle outside [0, pi]");
        }
    }
}

double AngleTree::angle(int level, Eigen::Index index) const {
    if (level < 1 || level > depth_) {
        throw Error("AngleTree: level out of range");
    }
    const Eigen::Index offset = (Eigen::Index{1} << (level - 1)) - 1;
    return angles_[static_cast<std::size_t>(offset + index)];
}

Vector AngleTree::reconstruct() const {
    const Eigen::Index n = leaf_count();
    Vector p(n);
    for (Eigen::Index leaf = 0; leaf < n; ++leaf) {
        double prob = 1.0;
        for (int level = 1; level <= depth_; ++level) {
            const Eigen::Index node = leaf >> (depth_ - level + 1);
            const bool right = (leaf >> (depth_ - level)) & 1;
            const double half = angle(level, node) / 2.0;
            prob *= right ? std::sin(half) * std::sin(half) : std::cos(half) * std::cos(half);
        }
        p(leaf) = prob;
    }
    return p;
}

AngleTree controlization_angles(const Vector& p) {
    const Eigen::Index n = p.size();
    if (!is_power_of_two(n)) {
        throw LengthNotPowerOfTwo("controlization_angles: length " + std::to_string(n) +
                                  " is not a power of two");
    }
    if (p.minCoeff() < -ecm::kStochasticTol) {
        throw Error("controlization_angles: negative probability entry");
    }
    const int k = log2_exact(n);
    std::vector<double> angles;
    angles.reserve(static_cast<std::size_t>(n - 1));
    for (int level = 1; level <= k; ++level) {
        const Eigen::Index nodes = Eigen::Index{1} << (level - 1);
        const Eigen::Index block = n >> (level - 1);
        for (Eigen::Index node = 0; node < nodes; ++node) {
            const double left = std::max(0.0, p.segment(node * block, block / 2).sum());
            const double right = std::max(0.0, p.segment(node * block + block / 2, block / 2).sum());
            angles.push_back(2.0 * std::atan2(std::sqrt(right), std::sqrt(left)));
        }
    }
    return AngleTree(k, std::move(angles));
}

CMatrix rotation_y(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    CMatrix u(2, 2);
    u << c, -s, s, c;
    return u;
}

namespace {

CMatrix assemble_unitary(const AngleTree& tree, int level, Eigen::Index node) {
    if (level > tree.depth()) {
        return CMatrix::Identity(1, 1);
    }
    const double half = tree.angle(level, node) / 2.0;
    const double c = std::cos(half);
    const double s = std::sin(half);
    const CMatrix top = assemble_unitary(tree, level + 1, 2 * node);
    const CMatrix bottom = assemble_unitary(tree, level + 1, 2 * node + 1);
    const Eigen::Index h = top.rows();
    CMatrix u(2 * h, 2 * h);
    u.topLeftCorner(h, h) = c * top;
    u.topRightCorner(h, h) = -s * top;
    u.bottomLeftCorner(h, h) = s * bottom;
    u.bottomRightCorner(h, h) = c * bottom;
    return u;
}

} // namespace

CMatrix probability_unitary(const AngleTree& tree) {
    CMatrix u = assemble_unitary(tree, 1, 0);
    assert_unitary(u, kUnitaryTol, "probability_unitary");
    return u;
}

CMatrix probability_unitary(const Vector& p) {
    return probability_unitary(controlization_angles(p));
}

CMatrix coherent_ctrl(const std::vector<CMatrix>& branches) {
    if (branches.empty() || !is_power_of_two(static_cast<Eigen::Index>(branches.size()))) {
        throw DimensionMismatch("coherent_ctrl: branch count must be a power of two");
    }
    const Eigen::Index d = branches.front().rows();
    for (const auto& b : branches) {
        if (b.rows() != d || b.cols() != d) {
            throw DimensionMismatch("coherent_ctrl: branches must be square and equally sized");
        }
    }
    const auto m = static_cast<Eigen::Index>(branches.size());
    CMatrix u = CMatrix::Zero(m * d, m * d);
    for (Eigen::Index j = 0; j < m; ++j) {
        u.block(j * d, j * d, d, d) = branches[static_cast<std::size_t>(j)];
    }
    assert_unitary(u, kUnitaryTol, "coherent_ctrl");
    return u;
}

CMatrix ref_actions(Eigen::Index dim, const std::vector<Eigen::Index>& target_states) {
    if (target_states.empty()) {
        throw EmptyTargets("ref_actions: empty target set");
    }
    CMatrix u = -CMatrix::Identity(dim, dim);
    for (Eigen::Index s : target_states) {
        if (s < 0 || s >= dim) {
            throw Error("ref_actions: target state out of range");
        }
        u(s, s) = 1.0;
    }
    return u;
}

std::vector<Eigen::Index> PaddedChain::states_of(int clip_id) const {
    std::vector<Eigen::Index> states;
    for (std::size_t s = 0; s < owner.size(); ++s) {
        if (owner[s] == clip_id) {
            states.push_back(static_cast<Eigen::Index>(s));
        }
    }
    return states;
}

PaddedChain pad_chain(const Matrix& p) {
    if (p.rows() != p.cols() || p.rows() == 0) {
        throw DimensionMismatch("pad_chain: matrix must be square and non-empty");
    }
    const auto n = p.rows();
    PaddedChain chain;
    chain.original_n = static_cast<int>(n);
    chain.qubits = log2_exact(n);
    const Eigen::Index d = Eigen::Index{1} << chain.qubits;
    const auto dup = static_cast<double>(d - n + 1);

    chain.owner.resize(static_cast<std::size_t>(d));
    for (Eigen::Index s = 0; s < d; ++s) {
        chain.owner[static_cast<std::size_t>(s)] = static_cast<int>(std::min(s, n - 1)) + 1;
    }

    chain.p.resize(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const Eigen::Index src = std::min(j, n - 1);
        for (Eigen::Index i = 0; i < d; ++i) {
            const Eigen::Index dst = std::min(i, n - 1);
            double value = p(dst, src);
            if (dst == n - 1) {
                value /= dup;
            }
            chain.p(i, j) = value;
        }
    }
    return chain;
}

Vector pad_distribution(const Vector& pi) {
    const auto n = pi.size();
    if (n == 0) {
        throw DimensionMismatch("pad_distribution: empty vector");
    }
    const Eigen::Index d = Eigen::Index{1} << log2_exact(n);
    Vector out(d);
    const auto dup = static_cast<double>(d - n + 1);
    for (Eigen::Index s = 0; s < d; ++s) {
        const Eigen::Index src = std::min(s, n - 1);
        out(s) = src == n - 1 ? pi(src) / dup : pi(src);
    }
    return out;
}

std::vector<Eigen::Index> flagged_states(const PaddedChain& chain, const ecm::FlagSet& flags) {
    std::vector<Eigen::Index> states;
    for (Eigen::Index s = 0; s < chain.dim(); ++s) {
        if (flags.is_flagged(chain.decode(s))) {
            states.push_back(s);
        }
    }
    return states;
}

CMatrix diffusion_operator(const Matrix& padded_p) {
    std::vector<CMatrix> columns;
    columns.reserve(static_cast<std::size_t>(padded_p.cols()));
    for (Eigen::Index i = 0; i < padded_p.cols(); ++i) {
        columns.push_back(probability_unitary(Vector(padded_p.col(i))));
    }
    return coherent_ctrl(columns);
}

CMatrix swap_registers(Eigen::Index d) {
    CMatrix s = CMatrix::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            s(j * d + i, i * d + j) = 1.0;
        }
    }
    return s;
}

bool satisfies_detailed_balance(const Matrix& p, const Vector& pi, double tol) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            if (std::abs(p(i, j) * pi(j) - p(j, i) * pi(i)) > tol) {
                return false;
            }
        }
    }
    return true;
}

namespace {

CMatrix walk_from_diffusion(const CMatrix& u_p, const CMatrix& v_p, Eigen::Index d) {
    CVector d0_second(d * d);
    CVector d0_first(d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            d0_second(i * d + j) = j == 0 ? 1.0 : -1.0;
            d0_first(i * d + j) = i == 0 ? 1.0 : -1.0;
        }
    }
    const CMatrix ref_a = u_p * d0_second.asDiagonal() * u_p.adjoint();
    const CMatrix ref_b = v_p * d0_first.asDiagonal() * v_p.adjoint();
    CMatrix w = ref_b * ref_a;
    assert_unitary(w, kUnitaryTol, "build_walk_operator");
    return w;
}

} // namespace

CMatrix build_walk_operator(const Matrix& p) {
    const PaddedChain chain = pad_chain(p);
    const Vector pi = classical::stationary_distribution(chain.p);
    if (!satisfies_detailed_balance(chain.p, pi, 1e-10)) {
        throw NotReversible("build_walk_operator: chain fails detailed balance; supply the "
                            "time-reversed matrix explicitly");
    }
    const CMatrix u_p = diffusion_operator(chain.p);
    const CMatrix s = swap_registers(chain.dim());
    const CMatrix v_p = s * u_p * s;
    return walk_from_diffusion(u_p, v_p, chain.dim());
}

CMatrix build_walk_operator(const Matrix& p, const Matrix& p_star) {
    if (p_star.rows() != p.rows() || p_star.cols() != p.cols()) {
        throw DimensionMismatch("build_walk_operator: P and P* dimensions disagree");
    }
    const PaddedChain chain = pad_chain(p);
    const PaddedChain chain_star = pad_chain(p_star);
    const CMatrix u_p = diffusion_operator(chain.p);
    const CMatrix s = swap_registers(chain.dim());
    const CMatrix v_p = s * diffusion_operator(chain_star.p) * s;
    return walk_from_diffusion(u_p, v_p, chain.dim());
}

CVector stationary_state(const Matrix& p) {
    const PaddedChain chain = pad_chain(p);
    const Vector pi = classical::stationary_distribution(chain.p);
    const Eigen::Index d = chain.dim();
    CVector state(d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            // U_i's first column is sqrt of column i, so <j| U_i |0> = sqrt(p_ji).
            state(i * d + j) = std::sqrt(pi(i) * chain.p(j, i));
        }
    }
    return state;
}

CMatrix aro(const CMatrix& w, int n) {
    if (n < 0) {
        throw Error("aro: ancilla count must be non-negative");
    }
    assert_unitary(w, kUnitaryTol, "aro: walk operator");
    const Eigen::Index d = w.rows();
    const Eigen::Index blocks = Eigen::Index{1} << (n + 1);

    std::vector<CMatrix> powers(static_cast<std::size_t>(blocks));
    powers[0] = CMatrix::Identity(d, d);
    for (Eigen::Index t = 1; t < blocks; ++t) {
        powers[static_cast<std::size_t>(t)] = powers[static_cast<std::size_t>(t - 1)] * w;
    }

    const Eigen::Index dim = blocks * d;
    CMatrix out(dim, dim);
    CVector v(dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        v.setZero();
        v(col) = 1.0;
        // PD(W) = (H (x) 1) C (H (x) 1) with C|a>|psi> = |a> W^a |psi>.
        walsh_hadamard_blocks(v, blocks, d);
        for (Eigen::Index a = 1; a < blocks; ++a) {
            v.segment(a * d, d) = powers[static_cast<std::size_t>(a)] * v.segment(a * d, d);
        }
        walsh_hadamard_blocks(v, blocks, d);
        v.segment(d, (blocks - 1) * d) *= -1.0; // D0 on the ancillas
        walsh_hadamard_blocks(v, blocks, d);
        for (Eigen::Index a = 1; a < blocks; ++a) {
            v.segment(a * d, d) = powers[static_cast<std::size_t>(a)].adjoint() * v.segment(a * d, d);
        }
        walsh_hadamard_blocks(v, blocks, d);
        out.col(col) = v;
    }
    assert_unitary(out, kUnitaryTol, "aro");
    return out;
}

int default_ancilla_count(double delta) {
    if (delta <= 0.0 || delta > 1.0) {
        throw Error("default_ancilla_count: spectral gap must lie in (0, 1]");
    }
    const double scale = std::log2(1.0 / std::sqrt(delta));
    return std::max(1, static_cast<int>(std::ceil(scale)));
}

int m_eps_for(double epsilon) {
    if (epsilon <= 0.0 || epsilon > 1.0) {
        throw Error("m_eps_for: epsilon must lie in (0, 1]");
    }
    return static_cast<int>(std::ceil(1.0 / std::sqrt(epsilon)));
}

Vector rank_one_attempt_distribution(const Vector& pi, const ecm::FlagSet& flags, int m) {
    if (m < 0) {
        throw Error("rank_one_attempt_distribution: negative iteration count");
    }
    const Vector padded = pad_distribution(pi);
    const Eigen::Index d = padded.size();

    Vector u(d);
    for (Eigen::Index s = 0; s < d; ++s) {
        u(s) = std::sqrt(std::max(0.0, padded(s)));
    }

    // Signs of the reflection over flagged actions, duplicates included.
    Vector flag_sign = -Vector::Ones(d);
    const auto n = pi.size();
    for (Eigen::Index s = 0; s < d; ++s) {
        const int clip = static_cast<int>(std::min(s, n - 1)) + 1;
        if (flags.is_flagged(clip)) {
            flag_sign(s) = 1.0;
        }
    }

    // Everything is real: U D0 U† = 2|u><u| - 1 with u = U|0> = sqrt(p).
    Vector state = u;
    for (int it = 0; it < m; ++it) {
        state = state.cwiseProduct(flag_sign);
        state = 2.0 * u * u.dot(state) - state;
    }

    Vector decoded = Vector::Zero(n);
    for (Eigen::Index s = 0; s < d; ++s) {
        decoded(std::min(s, n - 1)) += state(s) * state(s);
    }
    return decoded;
}

namespace {

double flagged_mass(const Vector& pi, const ecm::FlagSet& flags) {
    double mass = 0.0;
    for (int id : flags.flagged()) {
        if (id >= 1 && id <= pi.size()) {
            mass += pi(id - 1);
        }
    }
    return mass;
}

} // namespace

WalkOutcome rank_one_deliberate(const Vector& pi, const ecm::FlagSet& flags, int m_eps, Rng& rng,
                                long attempt_limit) {
    if (m_eps < 0) {
        throw Error("rank_one_deliberate: m_eps must be non-negative");
    }
    if (flagged_mass(pi, flags) <= 0.0) {
        throw EmptyTail("rank_one_deliberate: flagged actions carry no stationary mass");
    }
    std::vector<Vector> cache(static_cast<std::size_t>(m_eps) + 1);
    long calls = 0;
    for (long attempt = 0; attempt < attempt_limit; ++attempt) {
        const int m = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m_eps) + 1));
        auto& dist = cache[static_cast<std::size_t>(m)];
        if (dist.size() == 0) {
            dist = rank_one_attempt_distribution(pi, flags, m);
        }
        calls += 2 * m + 1;
        const int clip = classical::sample_index(dist, rng) + 1;
        if (flags.is_flagged(clip)) {
            return {clip, calls};
        }
    }
    throw classical::StepLimitExceeded(attempt_limit);
}

WalkOutcome grover_deliberate(const Matrix& p, const ecm::FlagSet& flags, int n, Rng& rng,
                              long attempt_limit) {
    const PaddedChain chain = pad_chain(p);
    const Vector pi_padded = classical::stationary_distribution(chain.p);

    Vector pi_clips = Vector::Zero(chain.original_n);
    for (Eigen::Index s = 0; s < chain.dim(); ++s) {
        pi_clips(chain.decode(s) - 1) += pi_padded(s);
    }
    const double eps = flagged_mass(pi_clips, flags);
    if (eps <= 0.0) {
        throw EmptyTail("grover_deliberate: flagged actions carry no stationary mass");
    }
    const int m_eps = m_eps_for(eps);

    const CMatrix w = build_walk_operator(p);
    const CMatrix reflector = aro(w, n);
    const CVector pi_state = stationary_state(p);

    const Eigen::Index d = chain.dim();
    const Eigen::Index blocks = Eigen::Index{1} << (n + 1);
    const Eigen::Index dim = blocks * d * d;
    const long calls_per_aro = 8 * (static_cast<long>(blocks) - 1);

    const auto flag_states = flagged_states(chain, flags);
    std::vector<bool> flagged_first(static_cast<std::size_t>(d), false);
    for (Eigen::Index s : flag_states) {
        flagged_first[static_cast<std::size_t>(s)] = true;
    }

    CVector v(dim);
    Vector register_probs(d);
    long calls = 0;
    for (long attempt = 0; attempt < attempt_limit; ++attempt) {
        v.setZero();
        v.head(d * d) = pi_state; // ancillas |0...0>
        calls += 1;               // one U_P to prepare |pi'>

        const int m = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m_eps) + 1));
        for (int it = 0; it < m; ++it) {
            for (Eigen::Index idx = 0; idx < dim; ++idx) {
                const Eigen::Index first = (idx / d) % d;
                if (!flagged_first[static_cast<std::size_t>(first)]) {
                    v(idx) = -v(idx);
                }
            }
            v = reflector * v;
            calls += calls_per_aro;
        }

        register_probs.setZero();
        for (Eigen::Index idx = 0; idx < dim; ++idx) {
            const Eigen::Index first = (idx / d) % d;
            register_probs(first) += std::norm(v(idx));
        }
        const Eigen::Index state = classical::sample_index(register_probs, rng);
        const int clip = chain.decode(state);
        if (flags.is_flagged(clip)) {
            return {clip, calls};
        }
    }
    throw classical::StepLimitExceeded(attempt_limit);
}

} // namespace qps::quantum
