#pragma once

#include <utility>
#include <vector>

#include "ttoent/linalg.hpp"

namespace ttoent {

/// Contiguous bipartition of a chain: sites 1..sites_a | sites_a+1..N.
struct Bipartition {
  int sites_a = 1;
  int sites_b = 1;
};

/// Rectangular factor X with rho = X X^dagger, Tr(X X^dagger) = 1.
/// Columns are sqrt(p_j) |psi_j>; the column count is the Kraus dimension.
struct PurificationFactor {
  ComplexMatrix data;  // d^sites x kraus_dim
  int sites = 0;
  int local_dim = 2;

  Eigen::Index kraus_dim() const { return data.cols(); }
  double trace() const { return data.squaredNorm(); }
};

/// Depth-1 tree factorization X = (V_L kron V_R) R with isometric branches.
/// The root is stored as an (rows_a * rows_b) x K0 matrix, row index a*rows_b + b.
struct TreeTensorOperator {
  ComplexMatrix branch_left;   // d^{N_A} x rows_a, V^dagger V = 1
  ComplexMatrix branch_right;  // d^{N_B} x rows_b
  ComplexMatrix root;
  Eigen::Index rows_a = 0;  // M_A
  Eigen::Index rows_b = 0;  // M_B
  Bipartition bipartition;
  double discarded_weight = 0.0;
};

struct EntropyReport {
  double von_neumann = 0.0;                      // bits
  std::vector<std::pair<double, double>> renyi;  // (alpha, bits)
  double purity = 1.0;
};

/// Two-stage truncated SVD compression of a purification factor into the
/// tree form; both stages truncate to the same max_bond.
TreeTensorOperator compress_to_root(const PurificationFactor& x, Bipartition split,
                                    Eigen::Index max_bond);

/// Reconstruction (V_L kron V_R) R, for residual checks.
ComplexMatrix reconstruct(const TreeTensorOperator& tto);

/// Copies a state vector of length rows_a*rows_b into its rows_a x rows_b
/// matricization (index i = a*rows_b + b).
ComplexMatrix reshape_state(const ComplexVector& state, Eigen::Index rows_a, Eigen::Index rows_b);

/// Bipartite entanglement entropy in bits of a normalized pure state.
double entanglement_entropy(const ComplexVector& state, Eigen::Index rows_a, Eigen::Index rows_b);

/// Von Neumann / Renyi entropies (bits) and purity of a probability vector.
EntropyReport spectrum_entropies(const RealVector& probabilities, const std::vector<double>& alphas);

/// Per-Kraus-column (probability, entropy bits) computed from the root tensor.
std::vector<std::pair<double, double>> root_column_entropies(const TreeTensorOperator& tto);

}  // namespace ttoent
