#include "ttoent/tto.hpp"

#include <cmath>

#include "ttoent/errors.hpp"

namespace ttoent {

namespace {

Eigen::Index ipow(int base, int exp) {
  Eigen::Index v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

}  // namespace

ComplexMatrix reshape_state(const ComplexVector& state, Eigen::Index rows_a,
                            Eigen::Index rows_b) {
  if (state.size() != rows_a * rows_b)
    throw InvalidInputError("reshape_state: length does not match rows_a * rows_b");
  return Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      state.data(), rows_a, rows_b);
}

TreeTensorOperator compress_to_root(const PurificationFactor& x, Bipartition split,
                                    Eigen::Index max_bond) {
  if (split.sites_a + split.sites_b != x.sites)
    throw InvalidInputError("compress_to_root: bipartition does not sum to the site count");
  if (split.sites_a < 1 || split.sites_b < 1)
    throw InvalidInputError("compress_to_root: both blocks need at least one site");
  if (max_bond < 1) throw InvalidInputError("compress_to_root: max_bond must be >= 1");

  const Eigen::Index da = ipow(x.local_dim, split.sites_a);
  const Eigen::Index db = ipow(x.local_dim, split.sites_b);
  const Eigen::Index k0 = x.kraus_dim();
  if (x.data.rows() != da * db)
    throw InvalidInputError("compress_to_root: factor rows do not match d^N");

  // Stage a: matricize T[iA, iB, k] as iA x (iB, k) and split off the left branch.
  ComplexMatrix m1(da, db * k0);
  for (Eigen::Index k = 0; k < k0; ++k)
    for (Eigen::Index ia = 0; ia < da; ++ia)
      for (Eigen::Index ib = 0; ib < db; ++ib)
        m1(ia, k * db + ib) = x.data(ia * db + ib, k);

  SvdResult svd_a = svd_truncated(m1, max_bond, 0.0);
  const Eigen::Index ma = svd_a.singular_values.size();
  ComplexMatrix rem1 = svd_a.singular_values.asDiagonal() * svd_a.right_vectors_adj;  // ma x (db*k0)

  // Stage b: matricize the remainder W[a, iB, k] as iB x (a, k) for the right branch.
  ComplexMatrix m2(db, ma * k0);
  for (Eigen::Index k = 0; k < k0; ++k)
    for (Eigen::Index a = 0; a < ma; ++a)
      for (Eigen::Index ib = 0; ib < db; ++ib)
        m2(ib, k * ma + a) = rem1(a, k * db + ib);

  SvdResult svd_b = svd_truncated(m2, max_bond, 0.0);
  const Eigen::Index mb = svd_b.singular_values.size();
  ComplexMatrix rem2 = svd_b.singular_values.asDiagonal() * svd_b.right_vectors_adj;  // mb x (ma*k0)

  // Everything left after pulling out both isometries is the root.
  TreeTensorOperator out;
  out.branch_left = svd_a.left_vectors;
  out.branch_right = svd_b.left_vectors;
  out.rows_a = ma;
  out.rows_b = mb;
  out.bipartition = split;
  out.discarded_weight = svd_a.discarded_weight + svd_b.discarded_weight;
  out.root.resize(ma * mb, k0);
  for (Eigen::Index k = 0; k < k0; ++k)
    for (Eigen::Index a = 0; a < ma; ++a)
      for (Eigen::Index b = 0; b < mb; ++b)
        out.root(a * mb + b, k) = rem2(b, k * ma + a);
  return out;
}

ComplexMatrix reconstruct(const TreeTensorOperator& tto) {
  const Eigen::Index da = tto.branch_left.rows();
  const Eigen::Index db = tto.branch_right.rows();
  const Eigen::Index k0 = tto.root.cols();
  ComplexMatrix x = ComplexMatrix::Zero(da * db, k0);
  // (V_L kron V_R) R without forming the Kronecker product.
  for (Eigen::Index k = 0; k < k0; ++k) {
    ComplexMatrix rk = reshape_state(tto.root.col(k), tto.rows_a, tto.rows_b);
    ComplexMatrix xk = tto.branch_left * rk * tto.branch_right.transpose();
    for (Eigen::Index ia = 0; ia < da; ++ia)
      for (Eigen::Index ib = 0; ib < db; ++ib) x(ia * db + ib, k) = xk(ia, ib);
  }
  return x;
}

double entanglement_entropy(const ComplexVector& state, Eigen::Index rows_a,
                            Eigen::Index rows_b) {
  const double norm = state.norm();
  if (std::abs(norm - 1.0) > 1e-10)
    throw InvalidInputError("entanglement_entropy: state is not normalized within 1e-10");
  RealVector s = singular_values(reshape_state(state, rows_a, rows_b));
  return entropy_bits_from_singular_values(s, norm * norm);
}

EntropyReport spectrum_entropies(const RealVector& probabilities,
                                 const std::vector<double>& alphas) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    if (probabilities(i) < -1e-12)
      throw InvalidInputError("spectrum_entropies: negative probability");
    total += std::max(0.0, probabilities(i));
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw InvalidInputError("spectrum_entropies: probabilities do not sum to 1 within 1e-10");

  EntropyReport report;
  report.purity = 0.0;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    const double p = std::max(0.0, probabilities(i));
    report.purity += p * p;
    if (p > 0.0) report.von_neumann -= p * std::log2(p);
  }
  for (double alpha : alphas) {
    if (std::abs(alpha - 1.0) < 1e-12) {
      report.renyi.emplace_back(alpha, report.von_neumann);
      continue;
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
      const double p = std::max(0.0, probabilities(i));
      if (p > 0.0) sum += std::pow(p, alpha);
    }
    report.renyi.emplace_back(alpha, std::log2(sum) / (1.0 - alpha));
  }
  return report;
}

std::vector<std::pair<double, double>> root_column_entropies(const TreeTensorOperator& tto) {
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(tto.root.cols()));
  for (Eigen::Index k = 0; k < tto.root.cols(); ++k) {
    const double p = tto.root.col(k).squaredNorm();
    if (p <= 1e-14) {
      out.emplace_back(p, 0.0);
      continue;
    }
    RealVector s = singular_values(reshape_state(tto.root.col(k), tto.rows_a, tto.rows_b));
    out.emplace_back(p, entropy_bits_from_singular_values(s, p));
  }
  return out;
}

}  // namespace ttoent
