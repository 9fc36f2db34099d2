#include <doctest.h>

#include <cmath>

#include "ttoent/eof.hpp"
#include "ttoent/errors.hpp"
#include "ttoent/oracles.hpp"
#include "ttoent/rng.hpp"
#include "ttoent/spin_models.hpp"

using namespace ttoent;

namespace {

// Independent route for per-column entanglement: form the reduced density
// matrix of block A by an explicit partial trace and diagonalize it.
double partial_trace_entropy(const ComplexVector& state, Eigen::Index ra, Eigen::Index rb) {
  ComplexMatrix rho_a = ComplexMatrix::Zero(ra, ra);
  for (Eigen::Index a1 = 0; a1 < ra; ++a1)
    for (Eigen::Index a2 = 0; a2 < ra; ++a2)
      for (Eigen::Index b = 0; b < rb; ++b)
        rho_a(a1, a2) += state(a1 * rb + b) * std::conj(state(a2 * rb + b));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho_a, Eigen::EigenvaluesOnly);
  double bits = 0.0;
  for (Eigen::Index i = 0; i < ra; ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-14) bits -= p * std::log2(p);
  }
  return bits;
}

ComplexMatrix random_hermitian(int n, std::uint64_t seed) {
  ComplexMatrix g = ginibre_matrix(n, n, seed);
  return (g + g.adjoint()) / 2.0;
}

ComplexMatrix normalized_factor(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  ComplexMatrix x = ginibre_matrix(rows, cols, seed);
  return x / std::sqrt(x.squaredNorm());
}

}  // namespace

TEST_CASE("build_mixer: zero generator selects the leading identity block") {
  SearchState state{ComplexMatrix::Zero(4, 4), 2, {}};
  ComplexMatrix mixer = build_mixer(state);
  REQUIRE(mixer.rows() == 2);
  REQUIRE(mixer.cols() == 4);
  CHECK((mixer.leftCols(2) - ComplexMatrix::Identity(2, 2)).norm() <= kUnitaryTol);
  CHECK(mixer.rightCols(2).norm() <= kUnitaryTol);
}

TEST_CASE("build_mixer: rows of a unitary form an isometry") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SearchState state{random_hermitian(5, seed), 3, {}};
    ComplexMatrix mixer = build_mixer(state);
    CHECK((mixer * mixer.adjoint() - ComplexMatrix::Identity(3, 3)).norm() <= kUnitaryTol);
  }
}

TEST_CASE("build_mixer: square case is the full unitary") {
  SearchState state{random_hermitian(3, 9), 3, {}};
  ComplexMatrix mixer = build_mixer(state);
  CHECK((mixer - unitary_from_generator(state.generator)).norm() <= kUnitaryTol);
}

TEST_CASE("apply_mixer: identity mixer reproduces the input columns") {
  ComplexMatrix x = normalized_factor(8, 3, 4);
  PureStateEnsemble e = apply_mixer(x, ComplexMatrix::Identity(3, 3));
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(e.probabilities(j) == doctest::Approx(x.col(j).squaredNorm()).epsilon(1e-12));
    CHECK((e.states.col(j) * std::sqrt(e.probabilities(j)) - x.col(j)).norm() <= 1e-12);
  }
}

TEST_CASE("apply_mixer: probabilities sum to one for any isometric mixer") {
  ComplexMatrix x = normalized_factor(16, 4, 5);
  for (std::uint64_t seed : {7u, 8u}) {
    SearchState state{random_hermitian(6, seed), 4, {}};
    PureStateEnsemble e = apply_mixer(x, build_mixer(state));
    CHECK(e.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("apply_mixer: the mixed ensemble rebuilds the density matrix") {
  ComplexMatrix x = normalized_factor(16, 4, 6);
  ComplexMatrix rho = x * x.adjoint();
  SearchState state{random_hermitian(7, 10), 4, {}};
  PureStateEnsemble e = apply_mixer(x, build_mixer(state));
  ComplexMatrix rebuilt = ComplexMatrix::Zero(16, 16);
  for (Eigen::Index j = 0; j < e.states.cols(); ++j)
    rebuilt += e.probabilities(j) * (e.states.col(j) * e.states.col(j).adjoint());
  CHECK((rebuilt - rho).norm() <= 1e-10);
}

TEST_CASE("apply_mixer: dimension mismatch is rejected") {
  ComplexMatrix x = normalized_factor(8, 3, 11);
  CHECK_THROWS_AS(apply_mixer(x, ComplexMatrix::Identity(4, 4)), InvalidInputError);
}

TEST_CASE("average_entanglement: product state and Bell columns") {
  ComplexMatrix product = ComplexMatrix::Zero(4, 1);
  product(0, 0) = 1.0;
  PureStateEnsemble single = apply_mixer(product, ComplexMatrix::Identity(1, 1));
  CHECK(average_entanglement(single, 2, 2) == doctest::Approx(0.0));

  // Equal mixture of the two Bell states, expressed in the Bell columns
  // themselves: every column is maximally entangled.
  ComplexMatrix bells(4, 2);
  bells.setZero();
  const double r = 0.5;  // sqrt(1/2) amplitude times sqrt(1/2) probability
  bells(0, 0) = r;
  bells(3, 0) = r;
  bells(0, 1) = r;
  bells(3, 1) = -r;
  PureStateEnsemble mix = apply_mixer(bells, ComplexMatrix::Identity(2, 2));
  CHECK(average_entanglement(mix, 2, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("average_entanglement: agrees with the partial-trace oracle") {
  ComplexMatrix x = normalized_factor(4, 3, 21);
  SearchState state{random_hermitian(4, 22), 3, {}};
  PureStateEnsemble e = apply_mixer(x, build_mixer(state));
  double expected = 0.0;
  for (Eigen::Index j = 0; j < e.states.cols(); ++j) {
    if (e.probabilities(j) <= 1e-14) continue;
    expected += e.probabilities(j) * partial_trace_entropy(e.states.col(j), 2, 2);
  }
  CHECK(average_entanglement(e, 2, 2) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("minimize_eof: a pure state returns its entanglement entropy exactly") {
  ComplexVector ghz = ComplexVector::Zero(16);
  ghz(0) = 1.0 / std::sqrt(2.0);
  ghz(15) = 1.0 / std::sqrt(2.0);
  EofOptions opts;
  opts.restarts = 1;
  EofResult r = minimize_eof(ghz, 4, 4, 1, 3, opts);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("minimize_eof: balanced Bell mixture is separable") {
  PurificationFactor x =
      purification_from_density(bell_mixture(0.5), 2, 2);
  EofResult r = minimize_eof(x.data, 2, 2, static_cast<int>(x.kraus_dim()),
                             static_cast<int>(x.kraus_dim()), {});
  CHECK(r.value <= 1e-6);
}

TEST_CASE("minimize_eof: lambda = 0.9 Bell mixture matches the closed form") {
  PurificationFactor x = purification_from_density(bell_mixture(0.9), 2, 2);
  EofResult r = minimize_eof(x.data, 2, 2, static_cast<int>(x.kraus_dim()),
                             static_cast<int>(x.kraus_dim()), {});
  // h2((1 + sqrt(1 - 0.64))/2) = h2(0.8)
  CHECK(r.value == doctest::Approx(binary_entropy_bits(0.8)).epsilon(1e-4));
  CHECK(r.value == doctest::Approx(0.721928).epsilon(1e-4));
}

TEST_CASE("minimize_eof: value never exceeds the starting decomposition") {
  ComplexMatrix x = normalized_factor(4, 4, 30);
  PureStateEnsemble start = apply_mixer(x, ComplexMatrix::Identity(4, 4));
  const double start_value = average_entanglement(start, 2, 2);
  EofResult r = minimize_eof(x, 2, 2, 4, 4, {});
  CHECK(r.value <= start_value + 1e-12);
}

TEST_CASE("minimize_eof: upper bound against the concurrence oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    DensityMatrix rho = random_dm_hilbert_schmidt(4, derive_seed(900, seed));
    PurificationFactor x = purification_from_density(rho, 2, 2);
    EofResult r = minimize_eof(x.data, 2, 2, static_cast<int>(x.kraus_dim()),
                               static_cast<int>(x.kraus_dim()), {});
    const double exact = concurrence_eof_2qubit(rho);
    CHECK(r.value >= exact - 1e-9);
    CHECK(r.value - exact <= 1e-4);
  }
}

TEST_CASE("minimize_eof: restart best values are non-increasing") {
  ComplexMatrix x = normalized_factor(4, 4, 31);
  EofOptions opts;
  opts.restarts = 4;
  EofResult r = minimize_eof(x, 2, 2, 4, 4, opts);
  REQUIRE(r.restart_values.size() == 5);
  for (std::size_t i = 1; i < r.restart_values.size(); ++i)
    CHECK(r.restart_values[i] <= r.restart_values[i - 1] + 1e-15);
}

TEST_CASE("minimize_eof: objective invariant under a constant diagonal shift") {
  ComplexMatrix x = normalized_factor(4, 3, 32);
  ComplexMatrix a = random_hermitian(3, 33);
  SearchState s1{a, 3, {}};
  ComplexMatrix shifted = a + 0.7 * ComplexMatrix::Identity(3, 3);
  SearchState s2{shifted, 3, {}};
  const double v1 = average_entanglement(apply_mixer(x, build_mixer(s1)), 2, 2);
  const double v2 = average_entanglement(apply_mixer(x, build_mixer(s2)), 2, 2);
  CHECK(std::abs(v1 - v2) <= 1e-12);
}

TEST_CASE("minimize_eof: deterministic under a fixed seed") {
  ComplexMatrix x = normalized_factor(8, 3, 40);
  EofOptions opts;
  opts.seed = 1234;
  EofResult r1 = minimize_eof(x, 4, 2, 3, 3, opts);
  EofResult r2 = minimize_eof(x, 4, 2, 3, 3, opts);
  CHECK(r1.value == r2.value);
  CHECK(r1.evaluations == r2.evaluations);
}

TEST_CASE("warm_start_extend: padding is block diagonal and Hermitian") {
  SearchState s{random_hermitian(2, 50), 2, {}};
  SearchState ext = warm_start_extend(s);
  REQUIRE(ext.search_dim() == 3);
  CHECK(ext.kraus_dim == 3);
  CHECK((ext.generator.topLeftCorner(2, 2) - s.generator).norm() == 0.0);
  CHECK(ext.generator.row(2).norm() == 0.0);
  CHECK(ext.generator.col(2).norm() == 0.0);
  CHECK(hermiticity_defect(ext.generator) == 0.0);

  SearchState ext2 = warm_start_extend(ext);
  CHECK(hermiticity_defect(ext2.generator) == 0.0);
  CHECK(ext2.search_dim() == 4);
}

TEST_CASE("warm_start_extend: objective is preserved at the padded point") {
  // Extending both K and K0 while padding the factor with a zero column
  // leaves every evaluated quantity unchanged: exp(i(A + 0)) = exp(iA) + 1.
  ComplexMatrix x = normalized_factor(4, 2, 51);
  SearchState s{random_hermitian(2, 52), 2, {}};
  const double before = average_entanglement(apply_mixer(x, build_mixer(s)), 2, 2);

  SearchState ext = warm_start_extend(s);
  ComplexMatrix x_ext(4, 3);
  x_ext << x, ComplexVector::Zero(4);
  const double after = average_entanglement(apply_mixer(x_ext, build_mixer(ext)), 2, 2);
  CHECK(std::abs(before - after) <= 1e-12);
}

TEST_CASE("scan_k0: first row is the ground-state entanglement entropy") {
  SpectrumCache cache;
  ModelSpec model = ising_chain(6, 1.0);
  EofOptions opts;
  opts.restarts = 1;
  auto rows = scan_k0(model, 0.1, 3, opts, cache);
  REQUIRE(rows.size() == 3);

  auto slice = cache.lowest(model, 2);
  ComplexVector ground = slice->states.col(0);
  CHECK(rows[0].eof_bits ==
        doctest::Approx(entanglement_entropy(ground, 8, 8)).epsilon(1e-9));
}

TEST_CASE("scan_k0: reproducible bit for bit") {
  SpectrumCache cache;
  ModelSpec model = ising_chain(6, 1.0);
  EofOptions opts;
  opts.seed = 7;
  opts.restarts = 1;
  auto rows1 = scan_k0(model, 0.2, 3, opts, cache);
  auto rows2 = scan_k0(model, 0.2, 3, opts, cache);
  REQUIRE(rows1.size() == rows2.size());
  for (std::size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows1[i].eof_bits == rows2[i].eof_bits);
    CHECK(rows1[i].evaluations == rows2[i].evaluations);
  }
}

TEST_CASE("scan_m: rank-1 root has zero entanglement, exact M matches full X") {
  SpectrumCache cache;
  ModelSpec model = ising_chain(6, 1.0);
  EofOptions opts;
  opts.seed = 3;
  auto scan = scan_m(model, 0.1, 2, {1, 2, 4, 8}, opts, cache);
  REQUIRE(scan.table.size() == 4);
  CHECK(scan.table.front().second <= 1e-12);  // M = 1

  ThermalEofPoint full = thermal_eof_point(model, 0.1, 2, 2, 0, opts, cache);
  CHECK(std::abs(scan.reference - full.eof_bits) <= 1e-6);
  CHECK(scan.m_star >= 1);
}

TEST_CASE("scan_m: largest M must be the exact bond dimension") {
  SpectrumCache cache;
  CHECK_THROWS_AS(scan_m(ising_chain(6, 1.0), 0.1, 2, {1, 2, 4}, {}, cache),
                  InvalidInputError);
}
