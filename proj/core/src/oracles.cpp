#include "ttoent/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ttoent/errors.hpp"
#include "ttoent/rng.hpp"

namespace ttoent {

namespace {

Eigen::Index ipow(int base, int exp) {
  Eigen::Index v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

}  // namespace

void validate_density_matrix(const DensityMatrix& rho, double tol) {
  if (rho.data.rows() != rho.data.cols())
    throw InvalidInputError("density matrix must be square");
  if (hermiticity_defect(rho.data) > tol)
    throw InvalidInputError("density matrix is not Hermitian");
  if (std::abs(rho.data.trace().real() - 1.0) > tol || std::abs(rho.data.trace().imag()) > tol)
    throw InvalidInputError("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.data, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol)
    throw InvalidInputError("density matrix has a negative eigenvalue");
}

PurificationFactor purification_from_density(const DensityMatrix& rho, int sites, int local_dim,
                                             double eps) {
  EighResult ed = eigh(rho.data);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i)
    if (ed.eigenvalues(i) > eps) ++rank;
  if (rank == 0) throw InvalidInputError("purification_from_density: zero-rank input");

  PurificationFactor x;
  x.sites = sites;
  x.local_dim = local_dim;
  x.data.resize(rho.dim(), rank);
  // Largest probabilities first (eigh is ascending).
  Eigen::Index col = 0;
  for (Eigen::Index i = ed.eigenvalues.size() - 1; i >= 0; --i)
    if (ed.eigenvalues(i) > eps)
      x.data.col(col++) = ed.eigenvectors.col(i) * std::sqrt(ed.eigenvalues(i));
  return x;
}

double binary_entropy_bits(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double concurrence_eof_2qubit(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw InvalidInputError("concurrence_eof_2qubit: dimension must be 4");
  ComplexMatrix yy = ComplexMatrix::Zero(4, 4);  // sigma_y kron sigma_y
  yy(0, 3) = -1;
  yy(1, 2) = 1;
  yy(2, 1) = 1;
  yy(3, 0) = -1;
  ComplexMatrix m = rho.data * yy * rho.data.conjugate() * yy;
  Eigen::ComplexEigenSolver<ComplexMatrix> es(m);
  std::array<double, 4> lambda{};
  for (int i = 0; i < 4; ++i) lambda[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
  std::sort(lambda.begin(), lambda.end(), std::greater<double>());
  const double c = std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
  return binary_entropy_bits((1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))) / 2.0);
}

DensityMatrix bell_mixture(double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw InvalidInputError("bell_mixture: lambda must be in [0, 1]");
  ComplexVector plus = ComplexVector::Zero(4), minus = ComplexVector::Zero(4);
  const double r = 1.0 / std::sqrt(2.0);
  plus(0) = r;
  plus(3) = r;
  minus(0) = r;
  minus(3) = -r;
  DensityMatrix rho;
  rho.data = lambda * (plus * plus.adjoint()) + (1.0 - lambda) * (minus * minus.adjoint());
  return rho;
}

double bell_mixture_exact_eof(double lambda) {
  const double c = std::abs(2.0 * lambda - 1.0);
  return binary_entropy_bits((1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))) / 2.0);
}

PurificationFactor ghz_mixture(int sites, double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw InvalidInputError("ghz_mixture: lambda must be in [0, 1]");
  if (sites < 2) throw InvalidInputError("ghz_mixture: need at least 2 sites");
  const Eigen::Index dim = ipow(2, sites);
  ComplexVector plus = ComplexVector::Zero(dim), minus = ComplexVector::Zero(dim);
  const double r = 1.0 / std::sqrt(2.0);
  plus(0) = r;
  plus(dim - 1) = r;
  minus(0) = r;
  minus(dim - 1) = -r;

  PurificationFactor x;
  x.sites = sites;
  x.local_dim = 2;
  if (lambda == 0.0 || lambda == 1.0) {
    x.data.resize(dim, 1);
    x.data.col(0) = lambda == 1.0 ? plus : minus;
  } else {
    x.data.resize(dim, 2);
    x.data.col(0) = std::sqrt(lambda) * plus;
    x.data.col(1) = std::sqrt(1.0 - lambda) * minus;
  }
  return x;
}

PurificationFactor random_pure_ensemble(int sites, int kraus_dim, std::uint64_t seed) {
  if (kraus_dim < 1) throw InvalidInputError("random_pure_ensemble: K0 must be >= 1");
  const Eigen::Index dim = ipow(2, sites);
  PurificationFactor x;
  x.sites = sites;
  x.local_dim = 2;
  x.data.resize(dim, kraus_dim);
  const double p = 1.0 / kraus_dim;
  for (int j = 0; j < kraus_dim; ++j) {
    // A Haar state is the first column of a Haar unitary (its action on a
    // reference state).
    ComplexMatrix u = haar_random_unitary(dim, derive_seed(seed, static_cast<std::uint64_t>(j)));
    x.data.col(j) = std::sqrt(p) * u.col(0);
  }
  return x;
}

DensityMatrix random_dm_hilbert_schmidt(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 2) throw InvalidInputError("random_dm_hilbert_schmidt: dim must be >= 2");
  ComplexMatrix g = ginibre_matrix(dim, dim, seed);
  DensityMatrix rho;
  rho.data = g * g.adjoint();
  rho.data /= rho.data.trace().real();
  return rho;
}

DensityMatrix random_separable(int sites, std::uint64_t seed) {
  if (sites < 2 || sites % 2 != 0)
    throw InvalidInputError("random_separable: N must be even and >= 2");
  const Eigen::Index half = ipow(2, sites / 2);
  Rng rng(seed);
  const int terms = rng.uniform_int(1, 4);
  RealVector p(terms);
  for (int i = 0; i < terms; ++i) p(i) = rng.uniform();
  p /= p.sum();

  DensityMatrix rho;
  rho.data = ComplexMatrix::Zero(half * half, half * half);
  for (int i = 0; i < terms; ++i) {
    DensityMatrix a = random_dm_hilbert_schmidt(half, derive_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1));
    DensityMatrix b = random_dm_hilbert_schmidt(half, derive_seed(seed, 2 * static_cast<std::uint64_t>(i) + 2));
    for (Eigen::Index r1 = 0; r1 < half; ++r1)
      for (Eigen::Index r2 = 0; r2 < half; ++r2)
        for (Eigen::Index c1 = 0; c1 < half; ++c1)
          for (Eigen::Index c2 = 0; c2 < half; ++c2)
            rho.data(r1 * half + r2, c1 * half + c2) += p(i) * a.data(r1, c1) * b.data(r2, c2);
  }
  return rho;
}

DensityMatrix werner_state(int local_dim, double flip_expectation) {
  const int d = local_dim;
  const double f = flip_expectation;
  if (d < 2) throw InvalidInputError("werner_state: d must be >= 2");
  if (f < -1.0 || f > 1.0) throw InvalidInputError("werner_state: f must be in [-1, 1]");
  const Eigen::Index dim = static_cast<Eigen::Index>(d) * d;
  ComplexMatrix flip = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) flip(i * d + j, j * d + i) = 1.0;
  DensityMatrix rho;
  rho.data = ((d - f) * ComplexMatrix::Identity(dim, dim) + (d * f - 1.0) * flip) /
             (d * (static_cast<double>(d) * d - 1.0));
  return rho;
}

DensityMatrix isotropic_state(int local_dim, double fidelity) {
  const int d = local_dim;
  const double f = fidelity;
  if (d < 2) throw InvalidInputError("isotropic_state: d must be >= 2");
  if (f < 0.0 || f > 1.0) throw InvalidInputError("isotropic_state: f must be in [0, 1]");
  const Eigen::Index dim = static_cast<Eigen::Index>(d) * d;
  ComplexVector psi = ComplexVector::Zero(dim);
  for (int i = 0; i < d; ++i) psi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  ComplexMatrix proj = psi * psi.adjoint();
  DensityMatrix rho;
  rho.data = (1.0 - f) / (static_cast<double>(d) * d - 1.0) *
                 (ComplexMatrix::Identity(dim, dim) - proj) +
             f * proj;
  return rho;
}

namespace {

// Closed-form Werner EoF, independent of d: h2((1 + sqrt(1 - f^2))/2) for
// f <= 0, separable otherwise.
double werner_exact_eof(double f) {
  if (f >= 0.0) return 0.0;
  return binary_entropy_bits((1.0 + std::sqrt(std::max(0.0, 1.0 - f * f))) / 2.0);
}

// Closed-form isotropic EoF: separable up to f = 1/d, then a binary-entropy
// branch up to 4(d-1)/d^2, then linear in f up to log2 d.
double isotropic_exact_eof(int d, double f) {
  if (f <= 1.0 / d) return 0.0;
  const double knee = 4.0 * (d - 1.0) / (static_cast<double>(d) * d);
  if (f <= knee || d == 2) {
    const double gamma =
        std::pow(std::sqrt(f) + std::sqrt((d - 1.0) * (1.0 - f)), 2.0) / d;
    return binary_entropy_bits(gamma) + (1.0 - gamma) * std::log2(d - 1.0);
  }
  return d * std::log2(d - 1.0) / (d - 2.0) * (f - 1.0) + std::log2(static_cast<double>(d));
}

}  // namespace

std::vector<ReferencePoint> reference_eof_curve(ReferenceFamily family, int local_dim,
                                                const std::vector<double>& f_grid) {
  if (local_dim != 2 && local_dim != 3)
    throw UnsupportedError("reference_eof_curve: only d = 2 and d = 3 are supported");
  std::vector<ReferencePoint> out;
  out.reserve(f_grid.size());
  for (double f : f_grid) {
    ReferencePoint point;
    point.f = f;
    if (local_dim == 2) {
      DensityMatrix rho = family == ReferenceFamily::Werner ? werner_state(2, f)
                                                            : isotropic_state(2, f);
      point.eof_bits = concurrence_eof_2qubit(rho);
      point.source = "concurrence";
    } else {
      point.eof_bits = family == ReferenceFamily::Werner ? werner_exact_eof(f)
                                                         : isotropic_exact_eof(3, f);
      point.source = "literature";
    }
    out.push_back(point);
  }
  return out;
}

}  // namespace ttoent
