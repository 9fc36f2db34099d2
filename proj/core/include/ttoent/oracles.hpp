#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ttoent/linalg.hpp"
#include "ttoent/tto.hpp"

namespace ttoent {

struct DensityMatrix {
  ComplexMatrix data;

  Eigen::Index dim() const { return data.rows(); }
};

/// Hermiticity / positivity / trace gate every generated state must pass.
void validate_density_matrix(const DensityMatrix& rho, double tol = 1e-10);

/// Eigendecomposition-based purification: columns sqrt(p_j)|psi_j> for all
/// eigenvalues above `eps`. sites/local_dim describe the bipartite layout
/// of the row space.
PurificationFactor purification_from_density(const DensityMatrix& rho, int sites, int local_dim,
                                             double eps = 1e-12);

/// Wootters construction: exact 2-qubit EoF in bits.
double concurrence_eof_2qubit(const DensityMatrix& rho);

/// Binary entropy in bits.
double binary_entropy_bits(double p);

/// lambda |phi+><phi+| + (1-lambda) |phi-><phi-| with phi+- = (|00> +- |11>)/sqrt(2).
DensityMatrix bell_mixture(double lambda);

/// Closed-form EoF of the Bell mixture: C = |2 lambda - 1|.
double bell_mixture_exact_eof(double lambda);

/// Same mixture built on N-qubit GHZ+- states, returned as a purification
/// factor with K0 = 2 (K0 = 1 at lambda in {0, 1}).
PurificationFactor ghz_mixture(int sites, double lambda);

/// K0 Haar-random N-qubit states with equal probabilities 1/K0.
PurificationFactor random_pure_ensemble(int sites, int kraus_dim, std::uint64_t seed);

/// Hilbert-Schmidt random density matrix rho = G G^dagger / Tr from a
/// square Ginibre G.
DensityMatrix random_dm_hilbert_schmidt(Eigen::Index dim, std::uint64_t seed);

/// sum_i p_i rho_i^A kron rho_i^B with K0 ~ U{1..4} terms, uniform-then-
/// normalized p_i and independent Hilbert-Schmidt factors on each half.
DensityMatrix random_separable(int sites, std::uint64_t seed);

/// Werner state on d x d: [(d-f) 1 + (df-1) F] / (d(d^2-1)), F the flip.
DensityMatrix werner_state(int local_dim, double flip_expectation);

/// Isotropic state on d x d: (1-f)/(d^2-1) (1 - P+) + f P+.
DensityMatrix isotropic_state(int local_dim, double fidelity);

enum class ReferenceFamily { Werner, Isotropic };

struct ReferencePoint {
  double f = 0.0;
  double eof_bits = 0.0;
  std::string source;  // "concurrence" (d=2) or "literature" (d=3)
};

/// Exact EoF curves. d=2 goes through the concurrence oracle on the
/// constructed states; d=3 uses the closed-form results for these families,
/// with separable regions pinned to exactly 0.
std::vector<ReferencePoint> reference_eof_curve(ReferenceFamily family, int local_dim,
                                                const std::vector<double>& f_grid);

}  // namespace ttoent
