#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ttoent/linalg.hpp"
#include "ttoent/spin_models.hpp"
#include "ttoent/tto.hpp"

namespace ttoent {

/// A pure-state decomposition: probabilities p_j and the (unnormalized)
/// columns of X' = factor * mixer; states carries the normalized columns,
/// zeroed where p_j <= 1e-14.
struct PureStateEnsemble {
  RealVector probabilities;
  ComplexMatrix states;
};

/// Point in the search space: a K x K Hermitian generator A. The mixer is
/// built from kraus_dim rows of exp(iA); by default the first rows (rows of
/// a Haar-like unitary are exchangeable), optionally a seeded random subset.
struct SearchState {
  ComplexMatrix generator;
  int kraus_dim = 1;
  std::vector<int> row_selection;  // empty means rows 0..kraus_dim-1

  int search_dim() const { return static_cast<int>(generator.rows()); }
};

struct EofOptions {
  long max_evals = 0;        // 0 -> 200 * K^2
  int restarts = 3;          // additional perturbed starts after the first
  std::uint64_t seed = 0;
  double ftol = 1e-8;        // simplex f-spread termination
  double simplex_step = 0.5;
  double perturbation = 0.3;  // scale of the seeded restart perturbations
  bool random_rows = false;   // pick the K0 mixer rows at random (seeded)
  std::optional<ComplexMatrix> initial_generator;  // warm start
};

struct EofResult {
  double value = 0.0;  // bits; an upper bound on the EoF regardless of convergence
  ComplexMatrix best_generator;
  int kraus_dim = 0;   // K0
  int search_dim = 0;  // K
  int bond_dim = 0;    // M of the factor (0 = uncompressed)
  long evaluations = 0;
  int restarts_used = 0;
  bool converged = false;
  std::vector<double> trace;           // best objective after each simplex iteration
  std::vector<double> restart_values;  // best value at the end of each restart
};

/// K0 x K right-isometry built from rows of exp(iA); U U^dagger = 1.
ComplexMatrix build_mixer(const SearchState& state);

/// X' = factor * mixer with p'_j and normalized columns.
ComplexMatrix apply_mixer_raw(const ComplexMatrix& factor, const ComplexMatrix& mixer);
PureStateEnsemble apply_mixer(const ComplexMatrix& factor, const ComplexMatrix& mixer);

/// sum_j p'_j S(psi'_j) in bits, entropies from per-column SVDs of the
/// rows_a x rows_b matricization.
double average_entanglement(const PureStateEnsemble& ensemble, Eigen::Index rows_a,
                            Eigen::Index rows_b);

/// Derivative-free simplex minimization of the ensemble-averaged entanglement
/// over the K^2 real parameters of the Hermitian generator. The first start
/// is the identity mixer (or the provided warm start); later restarts perturb
/// the best point found so far. The reported value is the best objective ever
/// evaluated, hence always a valid upper bound.
EofResult minimize_eof(const ComplexMatrix& factor, Eigen::Index rows_a, Eigen::Index rows_b,
                       int kraus_dim, int search_dim, const EofOptions& opts = {});

/// Pads the generator with a zero row and column (K -> K+1); with
/// extend_kraus the ensemble rank grows too (K0 -> K0+1). Evaluating the
/// padded state on a factor padded with a zero column reproduces the
/// original objective exactly, since exp(i(A + 0)) = exp(iA) + 1.
SearchState warm_start_extend(const SearchState& state, bool extend_kraus = true);

// ---- Thermal drivers -------------------------------------------------------

struct ThermalEofPoint {
  double temperature = 0.0;
  double gap = 0.0;       // Delta(N) of the model
  double eof_bits = 0.0;
  int kraus_dim = 0;      // effective K0 after multiplet extension
  EofResult detail;
};

/// Full pipeline for one (model, T) point: ED (cached), truncation to K0,
/// optional compression to the root at max_bond (0 = optimize the full X),
/// then the convex-roof search with K = search_dim.
ThermalEofPoint thermal_eof_point(const ModelSpec& model, double temperature, int kraus_dim,
                                  int search_dim, int max_bond, const EofOptions& opts,
                                  SpectrumCache& cache);

struct K0ScanRow {
  int kraus_dim = 0;       // requested K0 (K = K0)
  int kraus_effective = 0; // after multiplet extension
  double eof_bits = 0.0;
  long evaluations = 0;
  bool converged = false;
};

/// EoF of the K0-truncated thermal state for K0 = 1..k0_max, each run
/// warm-started from the previous optimum via zero-padding; K = K0.
std::vector<K0ScanRow> scan_k0(const ModelSpec& model, double temperature, int k0_max,
                               const EofOptions& opts, SpectrumCache& cache);

struct MScanResult {
  std::vector<std::pair<int, double>> table;  // (M, E_F)
  int m_star = 0;       // smallest M from which all larger M stay within 1% of reference
  double reference = 0.0;  // E_F at the exact M = d^{N/2}
};

/// EoF versus bond dimension. The largest entry of bond_dims must be the
/// exact d^{N/2} so the 99% criterion has its reference.
MScanResult scan_m(const ModelSpec& model, double temperature, int kraus_dim,
                   const std::vector<int>& bond_dims, const EofOptions& opts,
                   SpectrumCache& cache);

}  // namespace ttoent
