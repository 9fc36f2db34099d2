#include "ttoent/spin_models.hpp"

#include <cmath>

#include "ttoent/errors.hpp"

namespace ttoent {

ModelSpec ising_chain(int sites, double transverse_field) {
  if (sites < 2) throw InvalidInputError("ising_chain: need at least 2 sites");
  return {ModelKind::Ising, sites, transverse_field};
}

ModelSpec xxz_chain(int sites, double anisotropy) {
  if (sites < 2) throw InvalidInputError("xxz_chain: need at least 2 sites");
  return {ModelKind::XXZ, sites, anisotropy};
}

ComplexMatrix build_hamiltonian(const ModelSpec& spec) {
  const int n = spec.sites;
  if (n < 2) throw InvalidInputError("build_hamiltonian: need at least 2 sites");
  if (n > kMaxDenseSites)
    throw CapacityError("build_hamiltonian: N = " + std::to_string(n) +
                        " exceeds the dense-ED cap of " + std::to_string(kMaxDenseSites));

  const Eigen::Index dim = Eigen::Index(1) << n;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  const double J = 1.0;

  // Bit n-1-j holds site j+1 (site 1 = most significant bit). Spin up = bit 0.
  auto bit = [n](Eigen::Index state, int site) { return (state >> (n - 1 - site)) & 1; };

  for (Eigen::Index m = 0; m < dim; ++m) {
    for (int j = 0; j < n; ++j) {
      const int jn = (j + 1) % n;
      const Eigen::Index maskj = Eigen::Index(1) << (n - 1 - j);
      const Eigen::Index maskjn = Eigen::Index(1) << (n - 1 - jn);
      const int bj = static_cast<int>(bit(m, j));
      const int bjn = static_cast<int>(bit(m, jn));

      if (spec.kind == ModelKind::Ising) {
        // sx_j sx_{j+1}: flip both bits.
        h(m ^ maskj ^ maskjn, m) += J;
        // h * sz_j: diagonal, +1 for up (bit 0).
        h(m, m) += J * spec.parameter * (bj == 0 ? 1.0 : -1.0);
      } else {
        h(m ^ maskj ^ maskjn, m) += J;                             // sx sx
        h(m ^ maskj ^ maskjn, m) += J * (bj == bjn ? -1.0 : 1.0);  // sy sy
        h(m, m) += J * spec.parameter * (bj == bjn ? 1.0 : -1.0);  // xi sz sz
      }
    }
  }
  return h;
}

SpectrumSlice low_spectrum(const ComplexMatrix& h, Eigen::Index k) {
  if (k < 1 || k > h.rows())
    throw InvalidInputError("low_spectrum: k must be in [1, dim]");
  EighResult full = eigh(h);
  return {full.eigenvalues.head(k), full.eigenvectors.leftCols(k)};
}

double finite_size_gap(const SpectrumSlice& slice) {
  if (slice.energies.size() < 2)
    throw InvalidInputError("finite_size_gap: need at least 2 energies");
  return slice.energies(1) - slice.energies(0);
}

PurificationFactor thermal_purification(const SpectrumSlice& slice, double temperature,
                                        int kraus_dim, int sites) {
  if (temperature <= 0.0)
    throw InvalidInputError("thermal_purification: temperature must be > 0");
  if (kraus_dim < 1 || kraus_dim > slice.energies.size())
    throw InvalidInputError("thermal_purification: K0 outside the available slice");

  // Extend through a degenerate level at the cut so the retained set does
  // not depend on the eigensolver's basis choice inside the multiplet.
  Eigen::Index k0 = kraus_dim;
  while (k0 < slice.energies.size() &&
         std::abs(slice.energies(k0) - slice.energies(k0 - 1)) <=
             1e-10 * std::max(1.0, std::abs(slice.energies(k0 - 1))))
    ++k0;

  const double e0 = slice.energies(0);
  RealVector weights(k0);
  for (Eigen::Index j = 0; j < k0; ++j)
    weights(j) = std::exp(-(slice.energies(j) - e0) / temperature);
  const double z = weights.sum();

  PurificationFactor x;
  x.sites = sites;
  x.local_dim = 2;
  x.data.resize(slice.states.rows(), k0);
  for (Eigen::Index j = 0; j < k0; ++j)
    x.data.col(j) = slice.states.col(j) * std::sqrt(weights(j) / z);
  return x;
}

PurificationFactor thermal_purification(const ThermalSpec& spec) {
  ComplexMatrix h = build_hamiltonian(spec.model);
  const Eigen::Index dim = h.rows();
  const Eigen::Index want = std::min<Eigen::Index>(dim, spec.kraus_dim + 4);
  SpectrumSlice slice = low_spectrum(h, want);
  return thermal_purification(slice, spec.temperature, spec.kraus_dim, spec.model.sites);
}

std::shared_ptr<const SpectrumSlice> SpectrumCache::lowest(const ModelSpec& spec,
                                                           Eigen::Index k) {
  const auto key = std::make_tuple(static_cast<int>(spec.kind), spec.sites, spec.parameter);
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = slices_.find(key);
  if (it != slices_.end() && it->second->energies.size() >= k) return it->second;
  ComplexMatrix h = build_hamiltonian(spec);
  const Eigen::Index dim = h.rows();
  auto slice = std::make_shared<SpectrumSlice>(
      low_spectrum(h, std::min<Eigen::Index>(dim, std::max<Eigen::Index>(k, 24))));
  slices_[key] = slice;
  return slice;
}

}  // namespace ttoent
