#include "ttoent/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "ttoent/errors.hpp"
#include "ttoent/rng.hpp"

namespace ttoent {

double hermiticity_defect(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

void require_hermitian(const ComplexMatrix& h, const char* who) {
  if (h.rows() != h.cols())
    throw InvalidInputError(std::string(who) + ": matrix must be square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (hermiticity_defect(h) > 1e-10 * scale)
    throw InvalidInputError(std::string(who) + ": matrix is not Hermitian within 1e-10");
}

}  // namespace

SvdResult svd_truncated(const ComplexMatrix& m, Eigen::Index max_rank, double rel_tol) {
  if (!m.allFinite()) throw InvalidInputError("svd_truncated: non-finite input");
  if (max_rank < 1) throw InvalidInputError("svd_truncated: max_rank must be >= 1");
  if (rel_tol < 0.0) throw InvalidInputError("svd_truncated: rel_tol must be >= 0");

  Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  const Eigen::Index full = s.size();
  const double s_max = full > 0 ? s(0) : 0.0;

  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < full; ++i)
    if (s(i) > rel_tol * s_max) ++keep;
  keep = std::max<Eigen::Index>(1, std::min(keep, max_rank));

  // Never split a degenerate multiplet silently: push the cut past values
  // equal (within relative tolerance) to the last kept one, up to max_rank.
  while (keep < full && keep < max_rank && s(keep) >= s(keep - 1) * (1.0 - kDegeneracyRelTol))
    ++keep;
  const bool split =
      keep < full && s(keep) >= s(keep - 1) * (1.0 - kDegeneracyRelTol) && s(keep) > 0.0;

  SvdResult out;
  out.left_vectors = svd.matrixU().leftCols(keep);
  out.singular_values = s.head(keep);
  out.right_vectors_adj = svd.matrixV().leftCols(keep).adjoint();
  out.discarded_weight = s.tail(full - keep).squaredNorm();
  out.split_degenerate = split;
  return out;
}

RealVector singular_values(const ComplexMatrix& m) {
  if (!m.allFinite()) throw InvalidInputError("singular_values: non-finite input");
  // Work on the orientation with fewer columns; the Jacobi sweeps
  // orthogonalize columns in place.
  ComplexMatrix a = m.rows() >= m.cols() ? m : ComplexMatrix(m.adjoint());
  const Eigen::Index n = a.cols();
  ComplexVector tmp(a.rows());

  // |cos angle|^2 between columns below this counts as orthogonal.
  const double tol2 = 1e-28;
  bool converged = false;
  for (int sweep = 0; sweep < 60 && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex gpq = a.col(p).dot(a.col(q));
        const double app = a.col(p).squaredNorm();
        const double aqq = a.col(q).squaredNorm();
        if (std::norm(gpq) <= tol2 * app * aqq) continue;
        converged = false;
        const double apq = std::abs(gpq);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = c * t;
        const Complex phase = gpq / apq;
        tmp = a.col(p);
        a.col(p) = c * tmp - (sn * std::conj(phase)) * a.col(q);
        a.col(q) = (sn * phase) * tmp + c * a.col(q);
      }
    }
  }

  RealVector sv = a.colwise().norm();
  std::sort(sv.data(), sv.data() + n, std::greater<double>());
  return sv;
}

EighResult eigh(const ComplexMatrix& h) {
  require_hermitian(h, "eigh");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw InvalidInputError("eigh: eigendecomposition failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix unitary_from_generator(const ComplexMatrix& a) {
  require_hermitian(a, "unitary_from_generator");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a);
  if (solver.info() != Eigen::Success)
    throw InvalidInputError("unitary_from_generator: eigendecomposition failed");
  ComplexVector phases(a.rows());
  for (Eigen::Index k = 0; k < a.rows(); ++k)
    phases(k) = std::polar(1.0, solver.eigenvalues()(k));
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

ComplexMatrix ginibre_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw InvalidInputError("ginibre_matrix: dimensions must be >= 1");
  Rng rng(seed);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(r, c) = Complex(re, im);
    }
  return g;
}

ComplexMatrix haar_random_unitary(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw InvalidInputError("haar_random_unitary: dim must be >= 1");
  ComplexMatrix g = ginibre_matrix(dim, dim, seed);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  // Fix the gauge: multiply each column by the phase of the matching R
  // diagonal entry, otherwise the distribution is not Haar.
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
  }
  return q;
}

double entropy_bits_from_singular_values(const RealVector& s, double norm_sq) {
  if (s.size() == 0 || norm_sq <= 0.0) return 0.0;
  const double cutoff = 1e-14 * s.maxCoeff();
  double bits = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) <= cutoff) continue;
    const double p = s(i) * s(i) / norm_sq;
    if (p > 0.0) bits -= p * std::log2(p);
  }
  return bits;
}

}  // namespace ttoent
