#pragma once

// Test-only free-fermion reference for the periodic transverse-field chain
// H = J sum_j (sx_j sx_{j+1} + h sz_j), J = 1, N even.
//
// Jordan-Wigner maps the chain onto free fermions whose boundary condition
// depends on the fermion parity: even-parity states live in the
// antiperiodic-momentum quantization, odd-parity states in the periodic one.
// Each momentum pair (k, -k) carries four states with energies
//   a(k) - eps(k), a(k) + eps(k)   (even pair parity)
//   a(k), a(k)                     (odd pair parity)
// where a(k) = 2 cos k - 2h and eps(k) = 2 sqrt(1 + h^2 - 2 h cos k); the
// unpaired modes k = 0, pi of the periodic sector contribute (2 - 2h) n_0
// and (-2 - 2h) n_pi. Enumerating the per-pair states and filtering on the
// total parity of each sector reproduces the full 2^N spin spectrum.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace jw {

struct PairLevels {
  double even_low, even_high, odd;  // odd is doubly degenerate
};

inline void enumerate_pairs(const std::vector<PairLevels>& pairs, std::size_t idx,
                            double energy, int parity, bool want_odd_total, double offset,
                            std::vector<double>& out) {
  if (idx == pairs.size()) {
    if ((parity == 1) == want_odd_total) out.push_back(energy + offset);
    return;
  }
  const PairLevels& p = pairs[idx];
  enumerate_pairs(pairs, idx + 1, energy + p.even_low, parity, want_odd_total, offset, out);
  enumerate_pairs(pairs, idx + 1, energy + p.even_high, parity, want_odd_total, offset, out);
  // two singly-occupied states, both at p.odd
  enumerate_pairs(pairs, idx + 1, energy + p.odd, parity ^ 1, want_odd_total, offset, out);
  enumerate_pairs(pairs, idx + 1, energy + p.odd, parity ^ 1, want_odd_total, offset, out);
}

inline std::vector<double> ising_spectrum(int n, double h) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("jw oracle needs even N >= 2");
  std::vector<double> energies;

  auto pair_levels = [h](double k) {
    const double a = 2.0 * std::cos(k) - 2.0 * h;
    const double eps = 2.0 * std::sqrt(1.0 + h * h - 2.0 * h * std::cos(k));
    return PairLevels{a - eps, a + eps, a};
  };

  // Antiperiodic sector: k = +-(2m-1) pi / N, all modes paired; keep even parity.
  {
    std::vector<PairLevels> pairs;
    for (int m = 1; m <= n / 2; ++m) pairs.push_back(pair_levels((2.0 * m - 1.0) * M_PI / n));
    enumerate_pairs(pairs, 0, 0.0, 0, /*want_odd_total=*/false, h * n, energies);
  }

  // Periodic sector: k = 2 pi m / N with unpaired k = 0, pi; keep odd parity.
  {
    std::vector<PairLevels> pairs;
    for (int m = 1; m < n / 2; ++m) pairs.push_back(pair_levels(2.0 * M_PI * m / n));
    const double e0 = 2.0 - 2.0 * h;    // n_0 occupied
    const double epi = -2.0 - 2.0 * h;  // n_pi occupied
    for (int occ0 = 0; occ0 <= 1; ++occ0)
      for (int occpi = 0; occpi <= 1; ++occpi) {
        const int unpaired_parity = occ0 ^ occpi;
        std::vector<double> sector;
        enumerate_pairs(pairs, 0, occ0 * e0 + occpi * epi, unpaired_parity,
                        /*want_odd_total=*/true, h * n, sector);
        energies.insert(energies.end(), sector.begin(), sector.end());
      }
  }

  std::sort(energies.begin(), energies.end());
  return energies;
}

inline double ising_ground_energy(int n, double h) { return ising_spectrum(n, h).front(); }

inline double ising_gap(int n, double h) {
  auto s = ising_spectrum(n, h);
  return s[1] - s[0];
}

}  // namespace jw
