#include "ttoent/eof.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ttoent/errors.hpp"
#include "ttoent/rng.hpp"

namespace ttoent {

namespace {

// Hermitian K x K <-> K^2 real parameters: diagonal first, then the upper
// triangle row-wise as (real, imag) pairs.
ComplexMatrix unpack_generator(const RealVector& params, int k) {
  ComplexMatrix a(k, k);
  int idx = 0;
  for (int i = 0; i < k; ++i) a(i, i) = params(idx++);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      a(i, j) = Complex(params(idx), params(idx + 1));
      a(j, i) = std::conj(a(i, j));
      idx += 2;
    }
  return a;
}

RealVector pack_generator(const ComplexMatrix& a) {
  const int k = static_cast<int>(a.rows());
  RealVector params(k * k);
  int idx = 0;
  for (int i = 0; i < k; ++i) params(idx++) = a(i, i).real();
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      params(idx) = a(i, j).real();
      params(idx + 1) = a(i, j).imag();
      idx += 2;
    }
  return params;
}

std::vector<int> resolve_rows(const SearchState& state) {
  if (state.row_selection.empty()) {
    std::vector<int> rows(static_cast<std::size_t>(state.kraus_dim));
    std::iota(rows.begin(), rows.end(), 0);
    return rows;
  }
  return state.row_selection;
}

std::vector<int> random_row_selection(int kraus_dim, int search_dim, std::uint64_t seed) {
  std::vector<int> all(static_cast<std::size_t>(search_dim));
  std::iota(all.begin(), all.end(), 0);
  Rng rng = Rng::substream(seed, 0x726f7773ULL);
  for (int i = search_dim - 1; i > 0; --i)
    std::swap(all[static_cast<std::size_t>(i)],
              all[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  all.resize(static_cast<std::size_t>(kraus_dim));
  return all;
}

// Objective for one factor: average entanglement of the mixed decomposition.
// Buffers are reused across the (many) evaluations of one optimization run.
class RoofObjective {
 public:
  RoofObjective(const ComplexMatrix& factor, Eigen::Index rows_a, Eigen::Index rows_b,
                int kraus_dim, int search_dim, std::vector<int> rows)
      : factor_(factor),
        rows_a_(rows_a),
        rows_b_(rows_b),
        kraus_dim_(kraus_dim),
        search_dim_(search_dim),
        rows_(std::move(rows)),
        mixer_(kraus_dim, search_dim),
        mixed_(factor.rows(), search_dim),
        column_(rows_a, rows_b) {}

  long evaluations() const { return evaluations_; }

  double operator()(const RealVector& params) {
    ++evaluations_;
    ComplexMatrix a = unpack_generator(params, search_dim_);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
    ComplexVector phases(search_dim_);
    for (int k = 0; k < search_dim_; ++k) phases(k) = std::polar(1.0, es.eigenvalues()(k));
    ComplexMatrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    for (int r = 0; r < kraus_dim_; ++r) mixer_.row(r) = u.row(rows_[static_cast<std::size_t>(r)]);
    mixed_.noalias() = factor_ * mixer_;

    double total = 0.0;
    for (int j = 0; j < search_dim_; ++j) {
      const double p = mixed_.col(j).squaredNorm();
      if (p <= 1e-14) continue;
      for (Eigen::Index ia = 0; ia < rows_a_; ++ia)
        column_.row(ia) = mixed_.col(j).segment(ia * rows_b_, rows_b_).transpose();
      RealVector s = singular_values(column_);
      total += p * entropy_bits_from_singular_values(s, p);
    }
    return total;
  }

 private:
  const ComplexMatrix& factor_;
  Eigen::Index rows_a_, rows_b_;
  int kraus_dim_, search_dim_;
  std::vector<int> rows_;
  ComplexMatrix mixer_, mixed_, column_;
  long evaluations_ = 0;
};

// Nelder-Mead with the dimension-adaptive expansion/contraction/shrink
// coefficients; terminates on the f-spread of the simplex or the eval budget.
struct SimplexOutcome {
  double best_value = 0.0;
  RealVector best_point;
  bool converged = false;
};

template <typename F>
SimplexOutcome nelder_mead(F& f, const RealVector& start, double step, double ftol,
                           long max_evals, long& evals_used, std::vector<double>* trace) {
  const int n = static_cast<int>(start.size());
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / n;
  const double gamma = 0.75 - 0.5 / n;
  const double delta = 1.0 - 1.0 / n;

  std::vector<RealVector> pts(static_cast<std::size_t>(n) + 1, start);
  std::vector<double> fv(static_cast<std::size_t>(n) + 1);
  for (int i = 1; i <= n; ++i) pts[static_cast<std::size_t>(i)](i - 1) += step;
  for (int i = 0; i <= n; ++i) fv[static_cast<std::size_t>(i)] = f(pts[static_cast<std::size_t>(i)]);
  long evals = n + 1;

  std::vector<int> ord(static_cast<std::size_t>(n) + 1);
  bool converged = false;
  while (evals < max_evals) {
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(),
              [&](int a, int b) { return fv[static_cast<std::size_t>(a)] < fv[static_cast<std::size_t>(b)]; });
    const int ib = ord[0], iw = ord[static_cast<std::size_t>(n)], is = ord[static_cast<std::size_t>(n) - 1];
    if (trace) trace->push_back(fv[static_cast<std::size_t>(ib)]);
    if (fv[static_cast<std::size_t>(iw)] - fv[static_cast<std::size_t>(ib)] <= ftol) {
      converged = true;
      break;
    }

    RealVector centroid = RealVector::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[static_cast<std::size_t>(ord[static_cast<std::size_t>(i)])];
    centroid /= n;

    RealVector xr = centroid + alpha * (centroid - pts[static_cast<std::size_t>(iw)]);
    const double fr = f(xr);
    ++evals;
    if (fr < fv[static_cast<std::size_t>(ib)]) {
      RealVector xe = centroid + beta * (xr - centroid);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) {
        pts[static_cast<std::size_t>(iw)] = std::move(xe);
        fv[static_cast<std::size_t>(iw)] = fe;
      } else {
        pts[static_cast<std::size_t>(iw)] = std::move(xr);
        fv[static_cast<std::size_t>(iw)] = fr;
      }
    } else if (fr < fv[static_cast<std::size_t>(is)]) {
      pts[static_cast<std::size_t>(iw)] = std::move(xr);
      fv[static_cast<std::size_t>(iw)] = fr;
    } else {
      const bool outside = fr < fv[static_cast<std::size_t>(iw)];
      RealVector xc = outside ? RealVector(centroid + gamma * (xr - centroid))
                              : RealVector(centroid - gamma * (xr - centroid));
      const double fc = f(xc);
      ++evals;
      if (fc < std::min(fr, fv[static_cast<std::size_t>(iw)])) {
        pts[static_cast<std::size_t>(iw)] = std::move(xc);
        fv[static_cast<std::size_t>(iw)] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          const int ii = ord[static_cast<std::size_t>(i)];
          pts[static_cast<std::size_t>(ii)] =
              pts[static_cast<std::size_t>(ib)] + delta * (pts[static_cast<std::size_t>(ii)] - pts[static_cast<std::size_t>(ib)]);
          fv[static_cast<std::size_t>(ii)] = f(pts[static_cast<std::size_t>(ii)]);
          ++evals;
        }
      }
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(fv.begin(), fv.end()) - fv.begin());
  evals_used += evals;
  return {fv[best], pts[best], converged};
}

}  // namespace

ComplexMatrix build_mixer(const SearchState& state) {
  ComplexMatrix u = unitary_from_generator(state.generator);
  const std::vector<int> rows = resolve_rows(state);
  ComplexMatrix mixer(state.kraus_dim, state.search_dim());
  for (int r = 0; r < state.kraus_dim; ++r) mixer.row(r) = u.row(rows[static_cast<std::size_t>(r)]);
  return mixer;
}

ComplexMatrix apply_mixer_raw(const ComplexMatrix& factor, const ComplexMatrix& mixer) {
  if (factor.cols() != mixer.rows())
    throw InvalidInputError("apply_mixer: factor columns do not match mixer rows");
  return factor * mixer;
}

PureStateEnsemble apply_mixer(const ComplexMatrix& factor, const ComplexMatrix& mixer) {
  ComplexMatrix mixed = apply_mixer_raw(factor, mixer);
  PureStateEnsemble ensemble;
  ensemble.probabilities.resize(mixed.cols());
  ensemble.states.resize(mixed.rows(), mixed.cols());
  for (Eigen::Index j = 0; j < mixed.cols(); ++j) {
    const double p = mixed.col(j).squaredNorm();
    ensemble.probabilities(j) = p;
    ensemble.states.col(j) =
        p > 1e-14 ? ComplexVector(mixed.col(j) / std::sqrt(p)) : ComplexVector(mixed.col(j));
  }
  return ensemble;
}

double average_entanglement(const PureStateEnsemble& ensemble, Eigen::Index rows_a,
                            Eigen::Index rows_b) {
  if (ensemble.states.rows() != rows_a * rows_b)
    throw InvalidInputError("average_entanglement: states not reshapeable to rows_a x rows_b");
  double total = 0.0;
  for (Eigen::Index j = 0; j < ensemble.states.cols(); ++j) {
    const double p = ensemble.probabilities(j);
    if (p <= 1e-14) continue;
    RealVector s = singular_values(reshape_state(ensemble.states.col(j), rows_a, rows_b));
    total += p * entropy_bits_from_singular_values(s, 1.0);
  }
  return total;
}

EofResult minimize_eof(const ComplexMatrix& factor, Eigen::Index rows_a, Eigen::Index rows_b,
                       int kraus_dim, int search_dim, const EofOptions& opts) {
  if (factor.rows() != rows_a * rows_b)
    throw InvalidInputError("minimize_eof: factor rows do not match rows_a * rows_b");
  if (factor.cols() != kraus_dim)
    throw InvalidInputError("minimize_eof: factor must have K0 columns");
  if (search_dim < kraus_dim)
    throw InvalidInputError("minimize_eof: K must be >= K0");

  const int n = search_dim * search_dim;
  const long budget = opts.max_evals > 0 ? opts.max_evals : 200L * n;

  std::vector<int> rows;
  if (opts.random_rows)
    rows = random_row_selection(kraus_dim, search_dim, opts.seed);
  else {
    rows.resize(static_cast<std::size_t>(kraus_dim));
    std::iota(rows.begin(), rows.end(), 0);
  }

  RoofObjective objective(factor, rows_a, rows_b, kraus_dim, search_dim, rows);

  EofResult result;
  result.kraus_dim = kraus_dim;
  result.search_dim = search_dim;

  RealVector start = RealVector::Zero(n);
  if (opts.initial_generator) {
    if (opts.initial_generator->rows() != search_dim)
      throw InvalidInputError("minimize_eof: warm-start generator has the wrong dimension");
    start = pack_generator(*opts.initial_generator);
  }

  double best = objective(start);
  RealVector best_point = start;
  long evals = 1;
  Rng perturb = Rng::substream(opts.seed, 0x70657274ULL);

  for (int r = 0; r <= opts.restarts; ++r) {
    RealVector x0 = best_point;
    if (r > 0)
      for (int i = 0; i < n; ++i) x0(i) += opts.perturbation * perturb.normal();
    SimplexOutcome run =
        nelder_mead(objective, x0, opts.simplex_step, opts.ftol, budget, evals, &result.trace);
    if (run.best_value < best) {
      best = run.best_value;
      best_point = run.best_point;
    }
    result.converged = result.converged || run.converged;
    result.restarts_used = r;
    result.restart_values.push_back(best);
  }

  result.value = best;
  result.best_generator = unpack_generator(best_point, search_dim);
  result.evaluations = objective.evaluations();
  (void)evals;
  return result;
}

SearchState warm_start_extend(const SearchState& state, bool extend_kraus) {
  const int k = state.search_dim();
  SearchState out;
  out.generator = ComplexMatrix::Zero(k + 1, k + 1);
  out.generator.topLeftCorner(k, k) = state.generator;
  out.kraus_dim = extend_kraus ? state.kraus_dim + 1 : state.kraus_dim;
  if (!state.row_selection.empty()) {
    out.row_selection = state.row_selection;
    if (extend_kraus) out.row_selection.push_back(k);  // the fresh row
  }
  return out;
}

// ---- Thermal drivers -------------------------------------------------------

ThermalEofPoint thermal_eof_point(const ModelSpec& model, double temperature, int kraus_dim,
                                  int search_dim, int max_bond, const EofOptions& opts,
                                  SpectrumCache& cache) {
  const Eigen::Index dim = Eigen::Index(1) << model.sites;
  auto slice = cache.lowest(model, std::min<Eigen::Index>(dim, kraus_dim + 4));
  PurificationFactor x = thermal_purification(*slice, temperature, kraus_dim, model.sites);

  ThermalEofPoint point;
  point.temperature = temperature;
  point.gap = finite_size_gap(*slice);
  point.kraus_dim = static_cast<int>(x.kraus_dim());

  const int k0 = point.kraus_dim;
  const int k = std::max(search_dim, k0);
  const Bipartition split{model.sites / 2, model.sites - model.sites / 2};
  const Eigen::Index half_dim = Eigen::Index(1) << split.sites_a;

  if (max_bond > 0 && max_bond < half_dim) {
    TreeTensorOperator tto = compress_to_root(x, split, max_bond);
    point.detail = minimize_eof(tto.root, tto.rows_a, tto.rows_b, k0, k, opts);
    point.detail.bond_dim = max_bond;
  } else {
    point.detail = minimize_eof(x.data, half_dim, dim / half_dim, k0, k, opts);
    point.detail.bond_dim = static_cast<int>(half_dim);
  }
  point.eof_bits = point.detail.value;
  return point;
}

std::vector<K0ScanRow> scan_k0(const ModelSpec& model, double temperature, int k0_max,
                               const EofOptions& opts, SpectrumCache& cache) {
  if (k0_max < 1) throw InvalidInputError("scan_k0: k0_max must be >= 1");
  const Eigen::Index dim = Eigen::Index(1) << model.sites;
  auto slice = cache.lowest(model, std::min<Eigen::Index>(dim, k0_max + 4));
  const Bipartition split{model.sites / 2, model.sites - model.sites / 2};
  const Eigen::Index ra = Eigen::Index(1) << split.sites_a;
  const Eigen::Index rb = dim / ra;

  std::vector<K0ScanRow> rows;
  std::optional<ComplexMatrix> warm;
  int previous_k = 0;
  for (int k0 = 1; k0 <= k0_max; ++k0) {
    PurificationFactor x = thermal_purification(*slice, temperature, k0, model.sites);
    const int k_eff = static_cast<int>(x.kraus_dim());

    EofOptions point_opts = opts;
    if (warm && previous_k > 0) {
      // Zero-pad the previous optimum up to the new K = K0.
      ComplexMatrix padded = ComplexMatrix::Zero(k_eff, k_eff);
      const int copy = std::min(previous_k, k_eff);
      padded.topLeftCorner(copy, copy) = warm->topLeftCorner(copy, copy);
      point_opts.initial_generator = padded;
    }
    point_opts.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(k0));

    EofResult res = minimize_eof(x.data, ra, rb, k_eff, k_eff, point_opts);
    warm = res.best_generator;
    previous_k = k_eff;
    rows.push_back({k0, k_eff, res.value, res.evaluations, res.converged});
  }
  return rows;
}

MScanResult scan_m(const ModelSpec& model, double temperature, int kraus_dim,
                   const std::vector<int>& bond_dims, const EofOptions& opts,
                   SpectrumCache& cache) {
  if (bond_dims.empty()) throw InvalidInputError("scan_m: empty bond dimension list");
  const Bipartition split{model.sites / 2, model.sites - model.sites / 2};
  const Eigen::Index half_dim = Eigen::Index(1) << split.sites_a;
  const int largest = *std::max_element(bond_dims.begin(), bond_dims.end());
  if (largest != half_dim)
    throw InvalidInputError("scan_m: the largest M must equal d^{N/2} = " +
                            std::to_string(half_dim));

  MScanResult out;
  for (std::size_t i = 0; i < bond_dims.size(); ++i) {
    EofOptions point_opts = opts;
    point_opts.seed = derive_seed(opts.seed, i);
    ThermalEofPoint point = thermal_eof_point(model, temperature, kraus_dim, kraus_dim,
                                              bond_dims[i], point_opts, cache);
    out.table.emplace_back(bond_dims[i], point.eof_bits);
  }
  std::sort(out.table.begin(), out.table.end());
  out.reference = out.table.back().second;

  // Smallest M from which every larger M stays above 99% of the reference.
  const double line = 0.99 * out.reference;
  out.m_star = out.table.back().first;
  for (auto it = out.table.rbegin(); it != out.table.rend(); ++it) {
    if (it->second >= line)
      out.m_star = it->first;
    else
      break;
  }
  return out;
}

}  // namespace ttoent
