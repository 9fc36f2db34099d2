#include <doctest.h>

#include <array>
#include <cmath>

#include "support/jw_oracle.hpp"
#include "ttoent/errors.hpp"
#include "ttoent/spin_models.hpp"

using namespace ttoent;

namespace {

ComplexMatrix translation_operator(int n) {
  // Shifts site j -> j+1 (site 1 = most significant bit).
  const Eigen::Index dim = Eigen::Index(1) << n;
  ComplexMatrix t = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index m = 0; m < dim; ++m) {
    const Eigen::Index shifted = ((m >> 1) | ((m & 1) << (n - 1))) & (dim - 1);
    t(shifted, m) = 1.0;
  }
  return t;
}

}  // namespace

TEST_CASE("build_hamiltonian: Ising N=2 h=0 is the double bond 2 sxsx") {
  ComplexMatrix h = build_hamiltonian(ising_chain(2, 0.0));
  ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
  expect(0, 3) = 2.0;
  expect(3, 0) = 2.0;
  expect(1, 2) = 2.0;
  expect(2, 1) = 2.0;
  CHECK((h - expect).norm() <= 1e-14);

  EighResult ed = eigh(h);
  CHECK(ed.eigenvalues(0) == doctest::Approx(-2.0));
  CHECK(ed.eigenvalues(1) == doctest::Approx(-2.0));
  CHECK(ed.eigenvalues(2) == doctest::Approx(2.0));
  CHECK(ed.eigenvalues(3) == doctest::Approx(2.0));
}

TEST_CASE("build_hamiltonian: XXZ N=2 xi=0.5 spectrum {-5, 1, 1, 3}") {
  ComplexMatrix h = build_hamiltonian(xxz_chain(2, 0.5));
  EighResult ed = eigh(h);
  CHECK(ed.eigenvalues(0) == doctest::Approx(-5.0));
  CHECK(ed.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(ed.eigenvalues(2) == doctest::Approx(1.0));
  CHECK(ed.eigenvalues(3) == doctest::Approx(3.0));
}

TEST_CASE("build_hamiltonian: Hermitian by construction") {
  for (const auto& spec : {ising_chain(5, 0.7), xxz_chain(6, -0.3)}) {
    ComplexMatrix h = build_hamiltonian(spec);
    CHECK(hermiticity_defect(h) == 0.0);
  }
}

TEST_CASE("build_hamiltonian: commutes with translation under PBC") {
  for (const auto& spec : {ising_chain(6, 1.0), ising_chain(8, 0.5), xxz_chain(6, 0.5)}) {
    ComplexMatrix h = build_hamiltonian(spec);
    ComplexMatrix t = translation_operator(spec.sites);
    CHECK((h * t - t * h).norm() <= 1e-8);
  }
}

TEST_CASE("build_hamiltonian: capacity error beyond the dense cap") {
  CHECK_THROWS_AS(build_hamiltonian(ising_chain(16, 1.0)), CapacityError);
}

TEST_CASE("low_spectrum: Ising N=2 h=0 lowest pair") {
  ComplexMatrix h = build_hamiltonian(ising_chain(2, 0.0));
  SpectrumSlice s = low_spectrum(h, 2);
  CHECK(s.energies(0) == doctest::Approx(-2.0));
  CHECK(s.energies(1) == doctest::Approx(-2.0));
  CHECK((s.states.adjoint() * s.states - ComplexMatrix::Identity(2, 2)).norm() <= 1e-10);
}

TEST_CASE("low_spectrum: full spectrum preserves the trace") {
  ComplexMatrix h = build_hamiltonian(xxz_chain(4, 0.5));
  SpectrumSlice s = low_spectrum(h, 16);
  CHECK(s.energies.sum() == doctest::Approx(h.trace().real()).epsilon(1e-8));
}

TEST_CASE("dense ED matches the free-fermion oracle across the spectrum") {
  for (int n : {4, 6}) {
    for (double h : {0.5, 1.0, 1.3}) {
      ComplexMatrix ham = build_hamiltonian(ising_chain(n, h));
      SpectrumSlice s = low_spectrum(ham, ham.rows());
      auto oracle = jw::ising_spectrum(n, h);
      REQUIRE(static_cast<Eigen::Index>(oracle.size()) == s.energies.size());
      for (Eigen::Index i = 0; i < s.energies.size(); ++i) {
        CAPTURE(n);
        CAPTURE(h);
        CHECK(s.energies(i) ==
              doctest::Approx(oracle[static_cast<std::size_t>(i)]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("low_spectrum: critical Ising N=8 ground energy matches the oracle") {
  ComplexMatrix h = build_hamiltonian(ising_chain(8, 1.0));
  SpectrumSlice s = low_spectrum(h, 1);
  CHECK(s.energies(0) == doctest::Approx(jw::ising_ground_energy(8, 1.0)).epsilon(1e-10));
}

TEST_CASE("finite_size_gap: degenerate pair has zero gap, gaps are nonnegative") {
  ComplexMatrix h = build_hamiltonian(ising_chain(2, 0.0));
  SpectrumSlice s = low_spectrum(h, 4);
  CHECK(finite_size_gap(s) == doctest::Approx(0.0));

  SpectrumSlice s1 = low_spectrum(h, 1);
  CHECK_THROWS_AS(finite_size_gap(s1), InvalidInputError);
}

TEST_CASE("finite_size_gap: critical Ising gap halves from N=6 to N=12") {
  SpectrumCache cache;
  auto s6 = cache.lowest(ising_chain(6, 1.0), 2);
  auto s12 = cache.lowest(ising_chain(12, 1.0), 2);
  const double ratio = finite_size_gap(*s12) / finite_size_gap(*s6);
  CHECK(ratio == doctest::Approx(0.5).epsilon(0.10));
  // and both agree with the free-fermion value
  CHECK(finite_size_gap(*s6) == doctest::Approx(jw::ising_gap(6, 1.0)).epsilon(1e-9));
  CHECK(finite_size_gap(*s12) == doctest::Approx(jw::ising_gap(12, 1.0)).epsilon(1e-9));
}

TEST_CASE("thermal_purification: single retained state is the ground state") {
  ThermalSpec spec{ising_chain(4, 1.0), 0.7, 1};
  PurificationFactor x = thermal_purification(spec);
  REQUIRE(x.kraus_dim() == 1);
  CHECK(x.data.col(0).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("thermal_purification: unit trace and Boltzmann-ordered columns") {
  ThermalSpec spec{ising_chain(6, 0.8), 0.4, 5};
  PurificationFactor x = thermal_purification(spec);
  CHECK(x.trace() == doctest::Approx(1.0).epsilon(1e-12));
  double previous = 2.0;
  for (Eigen::Index j = 0; j < x.kraus_dim(); ++j) {
    const double p = x.data.col(j).squaredNorm();
    CHECK(p <= previous + 1e-14);
    previous = p;
  }
}

TEST_CASE("thermal_purification: column weights match analytic Boltzmann factors") {
  // Ising N=2 h=1 has the closed-form spectrum {-2 sqrt2, -2, 2, 2 sqrt2}.
  const double s2 = std::sqrt(2.0);
  const double temperature = 0.5;
  std::array<double, 4> energies{-2.0 * s2, -2.0, 2.0, 2.0 * s2};
  std::array<double, 4> weights{};
  double z = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    weights[j] = std::exp(-(energies[j] - energies[0]) / temperature);
    z += weights[j];
  }

  ThermalSpec spec{ising_chain(2, 1.0), temperature, 4};
  PurificationFactor x = thermal_purification(spec);
  REQUIRE(x.kraus_dim() == 4);
  for (Eigen::Index j = 0; j < 4; ++j)
    CHECK(x.data.col(j).squaredNorm() ==
          doctest::Approx(weights[static_cast<std::size_t>(j)] / z).epsilon(1e-10));
}

TEST_CASE("thermal_purification: XX-dagger is a valid density matrix") {
  for (const auto& spec : {ThermalSpec{ising_chain(6, 1.0), 0.3, 4},
                           ThermalSpec{xxz_chain(6, 0.5), 0.5, 4}}) {
    PurificationFactor x = thermal_purification(spec);
    ComplexMatrix rho = x.data * x.data.adjoint();
    CHECK(hermiticity_defect(rho) <= 1e-12);
    CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("thermal_purification: degenerate cut extends the retained set") {
  // Ising N=2 h=0: spectrum {-2, -2, 2, 2}; K0=1 must keep both ground states.
  ThermalSpec spec{ising_chain(2, 0.0), 0.5, 1};
  PurificationFactor x = thermal_purification(spec);
  CHECK(x.kraus_dim() == 2);
}

TEST_CASE("thermal_purification: rejects non-positive temperature") {
  ComplexMatrix h = build_hamiltonian(ising_chain(2, 1.0));
  SpectrumSlice s = low_spectrum(h, 4);
  CHECK_THROWS_AS(thermal_purification(s, 0.0, 2, 2), InvalidInputError);
  CHECK_THROWS_AS(thermal_purification(s, -1.0, 2, 2), InvalidInputError);
}
