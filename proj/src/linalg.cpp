#include "qps/linalg.hpp"

#include <cmath>

namespace qps {

double unitarity_defect(const CMatrix& u, Eigen::Index full_check_dim) {
    const Eigen::Index d = u.rows();
    if (d != u.cols()) {
        return 1.0;
    }
    if (d <= full_check_dim) {
        CMatrix g = u.adjoint() * u;
        g.diagonal().array() -= 1.0;
        return g.cwiseAbs().maxCoeff();
    }
    // Probe with deterministic pseudo-random vectors: ||U†U v - v|| per probe.
    double worst = 0.0;
    std::uint64_t s = 0x51ed2701u;
    for (int probe = 0; probe < 8; ++probe) {
        CVector v(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            s = s * 6364136223846793005ULL + 1442695040888963407ULL;
            const double re = static_cast<double>(s >> 40) / (1 << 24) - 0.5;
            s = s * 6364136223846793005ULL + 1442695040888963407ULL;
            const double im = static_cast<double>(s >> 40) / (1 << 24) - 0.5;
            v(i) = Complex(re, im);
        }
        v.normalize();
        const CVector r = u.adjoint() * (u * v) - v;
        worst = std::max(worst, r.norm());
    }
    return worst;
}

bool is_unitary(const CMatrix& u, double tol) {
    return unitarity_defect(u) <= tol;
}

void assert_unitary(const CMatrix& u, double tol, const std::string& context) {
    const double defect = unitarity_defect(u);
    if (defect > tol) {
        throw Error(context + ": operator is not unitary (defect " + std::to_string(defect) + ")");
    }
}

double phase_aligned_distance(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("phase_aligned_distance: shape mismatch");
    }
    const Complex overlap = (a.adjoint() * b).trace();
    Complex phase(1.0, 0.0);
    if (std::abs(overlap) > 0.0) {
        phase = overlap / std::abs(overlap);
    }
    return (a - b / phase).norm();
}

double phase_aligned_distance(const CVector& a, const CVector& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("phase_aligned_distance: length mismatch");
    }
    const Complex overlap = a.dot(b);
    Complex phase(1.0, 0.0);
    if (std::abs(overlap) > 0.0) {
        phase = overlap / std::abs(overlap);
    }
    return (a - b / phase).norm();
}

bool equal_up_to_phase(const CMatrix& a, const CMatrix& b, double tol) {
    return phase_aligned_distance(a, b) <= tol * std::sqrt(static_cast<double>(a.rows()));
}

double total_variation(const Vector& p, const Vector& q) {
    if (p.size() != q.size()) {
        throw DimensionMismatch("total_variation: length mismatch");
    }
    return 0.5 * (p - q).cwiseAbs().sum();
}

bool is_probability_vector(const Vector& p, double tol) {
    if (p.size() == 0 || p.minCoeff() < -tol) {
        return false;
    }
    return std::abs(p.sum() - 1.0) <= tol;
}

bool is_column_stochastic(const Matrix& p, double tol) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
        if (!is_probability_vector(p.col(j), tol)) {
            return false;
        }
    }
    return p.cols() > 0;
}

bool is_power_of_two(Eigen::Index n) {
    return n > 0 && (n & (n - 1)) == 0;
}

int log2_exact(Eigen::Index n) {
    int k = 0;
    while ((Eigen::Index{1} << k) < n) {
        ++k;
    }
    return k;
}

} // namespace qps
