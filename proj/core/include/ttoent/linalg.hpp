#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace ttoent {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Residual tolerance for decompositions (SVD / eigendecomposition checks).
inline constexpr double kDecompositionTol = 1e-10;
/// Tolerance for unitarity / isometry defects of constructed matrices.
inline constexpr double kUnitaryTol = 1e-12;
/// Relative spacing below which singular values count as a degenerate multiplet.
inline constexpr double kDegeneracyRelTol = 1e-12;

struct SvdResult {
  ComplexMatrix left_vectors;       // column-orthonormal, one column per kept value
  RealVector singular_values;       // non-negative, non-increasing
  ComplexMatrix right_vectors_adj;  // V^dagger of the kept block (row-orthonormal)
  double discarded_weight = 0.0;    // sum of squared dropped singular values
  // True when the max_rank cap forced a cut through a degenerate multiplet
  // (values equal within kDegeneracyRelTol), which would otherwise have been
  // kept whole.
  bool split_degenerate = false;
};

struct EighResult {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // unitary, column k pairs with eigenvalue k
};

/// Thin SVD truncated to at most `max_rank` values, additionally dropping
/// values <= rel_tol * s_max. If the relative threshold lands inside a
/// degenerate multiplet the whole multiplet is kept (up to the hard
/// max_rank cap; a cap-forced split is flagged in the result).
SvdResult svd_truncated(const ComplexMatrix& m, Eigen::Index max_rank, double rel_tol);

/// Singular values only, non-increasing. One-sided Jacobi orthogonalization:
/// a single algorithm across all sizes with high relative accuracy on small
/// values, which is what entropy sums -s^2 log s^2 care about.
RealVector singular_values(const ComplexMatrix& m);

/// Dense Hermitian eigendecomposition, ascending eigenvalues.
/// Throws InvalidInputError if `h` is not square-Hermitian within 1e-10.
EighResult eigh(const ComplexMatrix& h);

/// exp(iA) for Hermitian A, built from the spectral decomposition of A.
/// Unitary to kUnitaryTol by construction.
ComplexMatrix unitary_from_generator(const ComplexMatrix& a);

/// Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal
/// phase correction (plain QR is biased). Pure function of (dim, seed).
ComplexMatrix haar_random_unitary(Eigen::Index dim, std::uint64_t seed);

/// Complex Ginibre matrix: independent standard-normal real and imaginary
/// parts, filled column-major. Pure function of (rows, cols, seed).
ComplexMatrix ginibre_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

/// Entanglement entropy in bits from the singular values of a pure-state
/// matricization with squared norm `norm_sq`: -sum (s^2/norm) log2 (s^2/norm).
/// Values below 1e-14 * s_max are treated as exact zeros.
double entropy_bits_from_singular_values(const RealVector& s, double norm_sq = 1.0);

/// Max-norm Hermiticity defect ||h - h^dagger||_max.
double hermiticity_defect(const ComplexMatrix& h);

}  // namespace ttoent
