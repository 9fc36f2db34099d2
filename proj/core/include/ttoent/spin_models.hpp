#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include "ttoent/linalg.hpp"
#include "ttoent/tto.hpp"

namespace ttoent {

enum class ModelKind { Ising, XXZ };

/// Periodic spin-1/2 chain, J = 1. `parameter` is the transverse field h for
/// Ising and the anisotropy xi for XXZ; the pairing is enforced by the
/// factory functions below.
struct ModelSpec {
  ModelKind kind = ModelKind::Ising;
  int sites = 2;
  double parameter = 0.0;

  std::string name() const { return kind == ModelKind::Ising ? "ising" : "xxz"; }
  std::string parameter_name() const { return kind == ModelKind::Ising ? "h" : "xi"; }
};

ModelSpec ising_chain(int sites, double transverse_field);
ModelSpec xxz_chain(int sites, double anisotropy);

/// Dense ED is capped here; beyond it the Hamiltonian no longer fits.
inline constexpr int kMaxDenseSites = 14;

struct SpectrumSlice {
  RealVector energies;  // ascending
  ComplexMatrix states; // d^N x k, orthonormal columns
};

struct ThermalSpec {
  ModelSpec model;
  double temperature = 0.1;  // units of J / k_B
  int kraus_dim = 2;         // retained eigenstates K0
};

/// H = J sum_j (sx_j sx_{j+1} + h sz_j)            [Ising]
/// H = J sum_j (sx sx + sy sy + xi sz sz)_{j,j+1}  [XXZ]
/// with site N+1 == 1. Site 1 maps to the most significant bit of the
/// basis index (Kronecker order).
ComplexMatrix build_hamiltonian(const ModelSpec& spec);

/// k lowest eigenpairs of a Hermitian matrix, ascending.
SpectrumSlice low_spectrum(const ComplexMatrix& h, Eigen::Index k);

/// Delta = E_1 - E_0.
double finite_size_gap(const SpectrumSlice& slice);

/// Thermal purification factor from a precomputed low-energy slice:
/// column j = sqrt(w_j / Z) |psi_j> with w_j = exp(-(E_j - E_0)/T) and Z
/// summed over the retained states only, so Tr(X X^dagger) = 1 exactly.
/// If the Boltzmann cut would split a degenerate level (within 1e-10
/// relative) the retained set is extended through the multiplet, as far as
/// the slice allows.
PurificationFactor thermal_purification(const SpectrumSlice& slice, double temperature,
                                        int kraus_dim, int sites);

/// Convenience form: diagonalizes the model first.
PurificationFactor thermal_purification(const ThermalSpec& spec);

/// Memoizes low-energy slices per (model, sites, parameter); the dense
/// diagonalization at N = 12..14 is expensive enough to do once per grid.
/// Thread-safe; the lock is held across the diagonalization so concurrent
/// requests for the same model do not duplicate it. A cached slice is never
/// mutated, only superseded, so returned pointers stay valid.
class SpectrumCache {
 public:
  std::shared_ptr<const SpectrumSlice> lowest(const ModelSpec& spec, Eigen::Index k);

 private:
  std::map<std::tuple<int, int, double>, std::shared_ptr<const SpectrumSlice>> slices_;
  std::mutex mutex_;
};

}  // namespace ttoent
