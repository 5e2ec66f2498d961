#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qps {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Base class for all error conditions raised by the library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
  public:
    using Error::Error;
};

// Max deviation of U†U from the identity. For dimensions above `full_check_dim`
// the check is done on a handful of deterministic probe vectors instead of the
// full product.
double unitarity_defect(const CMatrix& u, Eigen::Index full_check_dim = 256);

bool is_unitary(const CMatrix& u, double tol = 1e-10);

void assert_unitary(const CMatrix& u, double tol, const std::string& context);

// Frobenius distance between A and e^{i phi} B, minimized over the global
// phase phi (phi maximizes |trace(A† B)|). Matrices equal up to a global
// phase have distance ~0.
double phase_aligned_distance(const CMatrix& a, const CMatrix& b);

double phase_aligned_distance(const CVector& a, const CVector& b);

bool equal_up_to_phase(const CMatrix& a, const CMatrix& b, double tol = 1e-10);

// Total variation distance (1/2)*sum|p_i - q_i| between same-length vectors.
double total_variation(const Vector& p, const Vector& q);

// True when every entry is >= -tol and entries sum to 1 within tol.
bool is_probability_vector(const Vector& p, double tol = 1e-12);

// True when every column of p is a probability distribution within tol.
bool is_column_stochastic(const Matrix& p, double tol = 1e-12);

bool is_power_of_two(Eigen::Index n);

int log2_exact(Eigen::Index n);

} // namespace qps
