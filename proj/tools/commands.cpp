#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "ttoent/eof.hpp"
#include "ttoent/errors.hpp"
#include "ttoent/oracles.hpp"
#include "ttoent/report.hpp"
#include "ttoent/rng.hpp"
#include "ttoent/scaling.hpp"
#include "ttoent/spin_models.hpp"
#include "ttoent/tto.hpp"

namespace ttoent::cli {

namespace {

int resolve_workers(const CommonOptions& common) {
  if (common.workers > 0) return common.workers;
  if (const char* env = std::getenv("THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

void emit(const CommonOptions& common, const std::vector<ResultRecord>& records) {
  auto write = [&](std::ostream& os) {
    if (common.format == "json")
      write_json(os, records);
    else
      write_csv(os, records);
  };
  if (common.output_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(common.output_path);
  if (!file) throw UsageError("cannot open output file '" + common.output_path + "'");
  write(file);
}

std::vector<double> parse_grid_or_usage(const std::string& text, const char* what) {
  try {
    return parse_value_grid(text);
  } catch (const InvalidInputError& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
}

ModelSpec resolve_model(const std::string& name, int sites, double field, double anisotropy,
                        bool field_set, bool anisotropy_set) {
  if (name == "ising") {
    if (anisotropy_set) throw UsageError("--xi is an XXZ parameter; the Ising model takes --h");
    return ising_chain(sites, field);
  }
  if (name == "xxz") {
    if (field_set) throw UsageError("--h is an Ising parameter; the XXZ model takes --xi");
    return xxz_chain(sites, anisotropy);
  }
  throw UsageError("unknown model '" + name + "' (expected ising or xxz)");
}

EofOptions make_eof_options(const CommonOptions& common, std::uint64_t stream) {
  EofOptions opts;
  opts.seed = derive_seed(common.seed, stream);
  opts.restarts = common.restarts;
  opts.max_evals = common.max_evals;
  return opts;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Eigen::Index isqrt_exact(Eigen::Index dim, const char* what) {
  const auto root = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(dim))));
  if (root * root != dim)
    throw UsageError(std::string(what) + ": dimension must be a perfect square for the "
                                         "half-half bipartition");
  return root;
}

}  // namespace

int run_thermal_eof(const ThermalOptions& opts) {
  const ModelSpec model = resolve_model(opts.model, opts.sites, opts.field, opts.anisotropy,
                                        opts.field_set, opts.anisotropy_set);
  if (opts.sites % 2 != 0) throw UsageError("--N must be even for the half-half bipartition");
  const std::vector<double> temps = parse_grid_or_usage(opts.t_grid, "--T");
  for (double t : temps)
    if (t <= 0.0) throw UsageError("--T values must be positive");
  if (opts.kraus_dim < 1) throw UsageError("--K0 must be >= 1");
  const int search = opts.search_dim > 0 ? opts.search_dim : opts.kraus_dim;
  if (search < opts.kraus_dim) throw UsageError("--K must be >= K0");

  SpectrumCache cache;
  // Diagonalize once up front so the parallel section only runs optimizations.
  cache.lowest(model, std::min<Eigen::Index>(Eigen::Index(1) << model.sites,
                                             opts.kraus_dim + 4));

  std::vector<ResultRecord> records(temps.size());
  parallel_for(temps.size(), resolve_workers(opts.common), [&](std::size_t i) {
    ThermalEofPoint point = thermal_eof_point(model, temps[i], opts.kraus_dim, search,
                                              opts.max_bond, make_eof_options(opts.common, i),
                                              cache);
    ResultRecord rec;
    rec.command = "thermal-eof";
    rec.parameters = {{"model", FieldValue{model.name()}},
                      {"N", FieldValue{static_cast<long>(model.sites)}},
                      {model.parameter_name(), FieldValue{model.parameter}},
                      {"T", FieldValue{temps[i]}},
                      {"delta", FieldValue{point.gap}}};
    rec.eof_bits = point.eof_bits;
    rec.k0 = point.kraus_dim;
    rec.k = point.detail.search_dim;
    rec.m = point.detail.bond_dim;
    rec.evaluations = point.detail.evaluations;
    rec.converged = point.detail.converged;
    rec.seed = opts.common.seed;
    records[i] = std::move(rec);
  });
  emit(opts.common, records);
  return 0;
}

namespace {

struct BenchInstance {
  std::vector<std::pair<std::string, FieldValue>> parameters;
  PurificationFactor factor;
  Eigen::Index rows_a = 2, rows_b = 2;
  std::optional<double> exact;
  int k_extra = 0;
};

std::vector<BenchInstance> make_bench_instances(const BenchOptions& opts) {
  std::vector<BenchInstance> out;
  const auto seed_for = [&](std::uint64_t i) { return derive_seed(opts.common.seed, i); };

  if (opts.family == "bell" || opts.family == "ghz") {
    const std::vector<double> lambdas = parse_grid_or_usage(opts.lambda_grid, "--lambda");
    const int sites = opts.family == "bell" ? 2 : opts.sites;
    if (sites < 2 || sites % 2 != 0) throw UsageError("--N must be even and >= 2");
    for (double lambda : lambdas) {
      if (lambda < 0.0 || lambda > 1.0) throw UsageError("--lambda values must be in [0, 1]");
      BenchInstance inst;
      inst.factor = ghz_mixture(sites, lambda);
      inst.rows_a = Eigen::Index(1) << (sites / 2);
      inst.rows_b = inst.rows_a;
      inst.exact = bell_mixture_exact_eof(lambda);
      inst.parameters = {{"family", FieldValue{opts.family}},
                         {"N", FieldValue{static_cast<long>(sites)}},
                         {"lambda", FieldValue{lambda}}};
      out.push_back(std::move(inst));
    }
    return out;
  }

  if (opts.family == "random-pure") {
    if (opts.sites < 2 || opts.sites % 2 != 0) throw UsageError("--N must be even and >= 2");
    if (opts.kraus_dim < 1) throw UsageError("--K0 must be >= 1");
    for (int i = 0; i < opts.instances; ++i) {
      BenchInstance inst;
      inst.factor = random_pure_ensemble(opts.sites, opts.kraus_dim,
                                         seed_for(static_cast<std::uint64_t>(i)));
      inst.rows_a = Eigen::Index(1) << (opts.sites / 2);
      inst.rows_b = inst.rows_a;
      if (opts.sites == 2) {
        DensityMatrix rho;
        rho.data = inst.factor.data * inst.factor.data.adjoint();
        inst.exact = concurrence_eof_2qubit(rho);
      }
      inst.parameters = {{"family", FieldValue{opts.family}},
                         {"N", FieldValue{static_cast<long>(opts.sites)}},
                         {"K0", FieldValue{static_cast<long>(opts.kraus_dim)}},
                         {"instance", FieldValue{static_cast<long>(i)}}};
      out.push_back(std::move(inst));
    }
    return out;
  }

  if (opts.family == "hs-random" || opts.family == "separable") {
    const bool separable = opts.family == "separable";
    for (int i = 0; i < opts.instances; ++i) {
      DensityMatrix rho;
      Eigen::Index half = 2;
      if (separable) {
        if (opts.sites < 2 || opts.sites % 2 != 0) throw UsageError("--N must be even and >= 2");
        rho = random_separable(opts.sites, seed_for(static_cast<std::uint64_t>(i)));
        half = Eigen::Index(1) << (opts.sites / 2);
      } else {
        if (opts.dim < 4) throw UsageError("--dim must be >= 4");
        half = isqrt_exact(opts.dim, "--dim");
        rho = random_dm_hilbert_schmidt(opts.dim, seed_for(static_cast<std::uint64_t>(i)));
      }
      BenchInstance inst;
      inst.factor = purification_from_density(rho, 2, static_cast<int>(half));
      inst.rows_a = half;
      inst.rows_b = half;
      if (rho.dim() == 4) inst.exact = concurrence_eof_2qubit(rho);
      inst.parameters = {{"family", FieldValue{opts.family}},
                         {separable ? "N" : "dim",
                          FieldValue{static_cast<long>(separable ? opts.sites : opts.dim)}},
                         {"instance", FieldValue{static_cast<long>(i)}}};
      out.push_back(std::move(inst));
    }
    return out;
  }

  if (opts.family == "werner" || opts.family == "isotropic") {
    if (opts.local_dim != 2 && opts.local_dim != 3)
      throw UsageError("--d must be 2 or 3 for the exact reference curves");
    if (opts.f_grid.empty()) throw UsageError("--f grid is required for this family");
    const std::vector<double> fs = parse_grid_or_usage(opts.f_grid, "--f");
    const bool werner = opts.family == "werner";
    for (double f : fs) {
      if (werner && (f < -1.0 || f > 1.0)) throw UsageError("--f must be in [-1, 1]");
      if (!werner && (f < 0.0 || f > 1.0)) throw UsageError("--f must be in [0, 1]");
      BenchInstance inst;
      DensityMatrix rho = werner ? werner_state(opts.local_dim, f)
                                 : isotropic_state(opts.local_dim, f);
      inst.factor = purification_from_density(rho, 2, opts.local_dim);
      inst.rows_a = opts.local_dim;
      inst.rows_b = opts.local_dim;
      inst.exact = reference_eof_curve(werner ? ReferenceFamily::Werner
                                              : ReferenceFamily::Isotropic,
                                       opts.local_dim, {f})[0]
                       .eof_bits;
      inst.k_extra = opts.k_extra;
      inst.parameters = {{"family", FieldValue{opts.family}},
                         {"d", FieldValue{static_cast<long>(opts.local_dim)}},
                         {"f", FieldValue{f}}};
      out.push_back(std::move(inst));
    }
    return out;
  }

  throw UsageError("unsupported family '" + opts.family + "'");
}

}  // namespace

int run_bench(const BenchOptions& opts) {
  std::vector<BenchInstance> instances = make_bench_instances(opts);
  std::vector<ResultRecord> records(instances.size());

  parallel_for(instances.size(), resolve_workers(opts.common), [&](std::size_t i) {
    const BenchInstance& inst = instances[i];
    const int k0 = static_cast<int>(inst.factor.kraus_dim());
    const int k = k0 + std::max(0, inst.k_extra);
    EofResult res = minimize_eof(inst.factor.data, inst.rows_a, inst.rows_b, k0, k,
                                 make_eof_options(opts.common, i));
    ResultRecord rec;
    rec.command = "bench";
    rec.parameters = inst.parameters;
    rec.eof_bits = res.value;
    rec.exact_eof = inst.exact;
    rec.k0 = k0;
    rec.k = k;
    rec.m = static_cast<int>(inst.rows_a);
    rec.evaluations = res.evaluations;
    rec.converged = res.converged;
    rec.seed = opts.common.seed;
    records[i] = std::move(rec);
  });

  // Aggregate quality: error statistics where an exact value exists, and the
  // fraction of exactly separable instances.
  std::vector<double> errors;
  int upper_bound_violations = 0;
  int separable_count = 0, with_exact = 0;
  for (const auto& rec : records) {
    if (!rec.exact_eof) continue;
    ++with_exact;
    errors.push_back(std::abs(rec.eof_bits - *rec.exact_eof));
    if (rec.eof_bits < *rec.exact_eof - 1e-9) ++upper_bound_violations;
    if (*rec.exact_eof <= 1e-12) ++separable_count;
  }
  emit(opts.common, records);
  std::ostream& log = std::cerr;
  if (!errors.empty()) {
    log << "summary: instances=" << records.size()
        << " max_abs_error=" << *std::max_element(errors.begin(), errors.end())
        << " median_abs_error=" << median(errors)
        << " separable_fraction=" << static_cast<double>(separable_count) / with_exact
        << " upper_bound_violations=" << upper_bound_violations << "\n";
  } else {
    log << "summary: instances=" << records.size() << " (no exact reference)\n";
  }
  return 0;
}

int run_scan_k0(const ScanK0Options& opts) {
  const ModelSpec model = resolve_model(opts.model, opts.sites, opts.field, opts.anisotropy,
                                        false, false);
  if (opts.sites % 2 != 0) throw UsageError("--N must be even for the half-half bipartition");
  if (opts.temperature <= 0.0) throw UsageError("--T must be positive");
  if (opts.k0_max < 1) throw UsageError("--K0-max must be >= 1");

  SpectrumCache cache;
  EofOptions eof_opts = make_eof_options(opts.common, 0);
  eof_opts.seed = opts.common.seed;
  auto rows = scan_k0(model, opts.temperature, opts.k0_max, eof_opts, cache);

  const double final_value = rows.back().eof_bits;
  int k0_star = rows.back().kraus_dim;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (final_value == 0.0 ? it->eof_bits == 0.0
                           : std::abs(it->eof_bits - final_value) <= 0.01 * std::abs(final_value))
      k0_star = it->kraus_dim;
    else
      break;
  }

  std::vector<ResultRecord> records;
  for (const auto& row : rows) {
    ResultRecord rec;
    rec.command = "scan-k0";
    const bool within = final_value == 0.0
                            ? row.eof_bits == 0.0
                            : std::abs(row.eof_bits - final_value) <= 0.01 * std::abs(final_value);
    rec.parameters = {{"model", FieldValue{model.name()}},
                      {"N", FieldValue{static_cast<long>(model.sites)}},
                      {model.parameter_name(), FieldValue{model.parameter}},
                      {"T", FieldValue{opts.temperature}},
                      {"K0_requested", FieldValue{static_cast<long>(row.kraus_dim)}},
                      {"within_1pct_of_final", FieldValue{within}}};
    rec.eof_bits = row.eof_bits;
    rec.k0 = row.kraus_effective;
    rec.k = row.kraus_effective;
    rec.m = 1 << (model.sites / 2);
    rec.evaluations = row.evaluations;
    rec.converged = row.converged;
    rec.seed = opts.common.seed;
    records.push_back(std::move(rec));
  }
  emit(opts.common, records);
  std::cerr << "summary: k0_star=" << k0_star << " E_F(final)=" << final_value << "\n";
  return 0;
}

int run_scan_m(const ScanMOptions& opts) {
  const ModelSpec model = resolve_model(opts.model, opts.sites, opts.field, opts.anisotropy,
                                        false, false);
  if (opts.sites % 2 != 0) throw UsageError("--N must be even for the half-half bipartition");
  if (opts.temperature <= 0.0) throw UsageError("--T must be positive");
  if (opts.m_list.empty()) throw UsageError("--M-list is required");
  std::vector<double> raw = parse_grid_or_usage(opts.m_list, "--M-list");
  std::vector<int> bonds;
  for (double v : raw) {
    if (v < 1.0 || v != std::floor(v)) throw UsageError("--M-list entries must be integers >= 1");
    bonds.push_back(static_cast<int>(v));
  }
  const int exact = 1 << (opts.sites / 2);
  if (*std::max_element(bonds.begin(), bonds.end()) != exact)
    throw UsageError("--M-list must end at the exact bond dimension d^{N/2} = " +
                     std::to_string(exact));

  SpectrumCache cache;
  EofOptions eof_opts = make_eof_options(opts.common, 0);
  eof_opts.seed = opts.common.seed;
  MScanResult scan = scan_m(model, opts.temperature, opts.kraus_dim, bonds, eof_opts, cache);

  std::vector<ResultRecord> records;
  for (const auto& [m, value] : scan.table) {
    ResultRecord rec;
    rec.command = "scan-m";
    rec.parameters = {{"model", FieldValue{model.name()}},
                      {"N", FieldValue{static_cast<long>(model.sites)}},
                      {model.parameter_name(), FieldValue{model.parameter}},
                      {"T", FieldValue{opts.temperature}}};
    rec.eof_bits = value;
    rec.k0 = opts.kraus_dim;
    rec.k = opts.kraus_dim;
    rec.m = m;
    rec.seed = opts.common.seed;
    records.push_back(std::move(rec));
  }
  emit(opts.common, records);
  std::cerr << "summary: m_star=" << scan.m_star << " E_F(exact_M)=" << scan.reference << "\n";
  return 0;
}

int run_scaling(const ScalingOptions& opts) {
  std::ifstream file(opts.input_path);
  if (!file) throw UsageError("cannot open input file '" + opts.input_path + "'");
  CsvTable table = read_csv(file);
  const int col_n = table.column("N");
  const int col_t = table.column("T");
  const int col_e = table.column("E_F");
  if (col_n < 0 || col_t < 0 || col_e < 0)
    throw FitError("input CSV must carry N, T and E_F columns");

  ScalingDataset data;
  for (const auto& row : table.rows) {
    ScalingPoint p;
    p.sites = std::stoi(row[static_cast<std::size_t>(col_n)]);
    p.temperature = std::stod(row[static_cast<std::size_t>(col_t)]);
    p.eof_bits = std::stod(row[static_cast<std::size_t>(col_e)]);
    data.points.push_back(p);
  }

  ScalingFit best;
  if (opts.fit_c) {
    double best_residual = std::numeric_limits<double>::infinity();
    for (double c = opts.c_min; c <= opts.c_max + 1e-12; c += opts.c_step) {
      ScalingFit fit = collapse_fit(data, c, opts.z_min, opts.z_max, opts.z_step);
      if (fit.collapse_residual < best_residual) {
        best_residual = fit.collapse_residual;
        best = fit;
      }
    }
  } else {
    best = collapse_fit(data, opts.c, opts.z_min, opts.z_max, opts.z_step);
  }

  auto write = [&](std::ostream& os) {
    if (opts.common.format == "json") {
      os << "{\n  \"c\": " << format_field(FieldValue{best.c})
         << ",\n  \"z\": " << format_field(FieldValue{best.z})
         << ",\n  \"z_err\": " << format_field(FieldValue{best.z_err})
         << ",\n  \"collapse_residual\": " << format_field(FieldValue{best.collapse_residual})
         << ",\n  \"g_table\": [";
      for (std::size_t i = 0; i < best.g_table.size(); ++i)
        os << (i ? ", " : "") << "[" << format_field(FieldValue{best.g_table[i].first}) << ", "
           << format_field(FieldValue{best.g_table[i].second}) << "]";
      os << "]\n}\n";
    } else {
      os << "c,z,z_err,collapse_residual\n"
         << format_field(FieldValue{best.c}) << ',' << format_field(FieldValue{best.z}) << ','
         << format_field(FieldValue{best.z_err}) << ','
         << format_field(FieldValue{best.collapse_residual}) << '\n';
    }
  };
  if (opts.common.output_path.empty()) {
    write(std::cout);
  } else {
    std::ofstream out(opts.common.output_path);
    if (!out) throw UsageError("cannot open output file '" + opts.common.output_path + "'");
    write(out);
  }
  std::cerr << "summary: z=" << best.z << " +- " << best.z_err
            << " residual=" << best.collapse_residual << "\n";
  return 0;
}

int run_timing(const TimingOptions& opts) {
  if (opts.mode != "full-x" && opts.mode != "tto-root")
    throw UsageError("--mode must be full-x or tto-root");
  if (opts.model != "ising" && opts.model != "xxz") throw UsageError("unknown model");

  SpectrumCache cache;
  std::vector<ResultRecord> records;
  std::vector<double> log_basis, log_time;

  auto run_point = [&](const ModelSpec& model, int max_bond, double basis,
                       std::vector<std::pair<std::string, FieldValue>> params) {
    EofOptions eof_opts;
    eof_opts.seed = derive_seed(opts.common.seed, records.size());
    eof_opts.restarts = 0;
    eof_opts.ftol = 0.0;  // run the full budget so wall time tracks per-eval cost
    eof_opts.max_evals = opts.evals;

    // Untimed warm-up pass, then the measured run.
    {
      EofOptions warm = eof_opts;
      warm.max_evals = std::max<long>(32, opts.evals / 8);
      thermal_eof_point(model, opts.temperature, opts.kraus_dim, opts.kraus_dim, max_bond,
                        warm, cache);
    }
    const auto t0 = std::chrono::steady_clock::now();
    ThermalEofPoint point = thermal_eof_point(model, opts.temperature, opts.kraus_dim,
                                              opts.kraus_dim, max_bond, eof_opts, cache);
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ResultRecord rec;
    rec.command = "timing";
    rec.parameters = std::move(params);
    rec.eof_bits = point.eof_bits;
    rec.k0 = point.kraus_dim;
    rec.k = point.detail.search_dim;
    rec.m = point.detail.bond_dim;
    rec.evaluations = point.detail.evaluations;
    rec.wall_time_seconds = dt;
    rec.converged = point.detail.converged;
    rec.seed = opts.common.seed;
    records.push_back(std::move(rec));
    log_basis.push_back(std::log(basis));
    log_time.push_back(std::log(std::max(dt, 1e-9)));
  };

  if (opts.mode == "full-x") {
    std::vector<double> ns = parse_grid_or_usage(opts.n_grid, "--N");
    for (double nv : ns) {
      const int n = static_cast<int>(nv);
      if (n < 2 || n % 2 != 0) throw UsageError("--N entries must be even and >= 2");
      const ModelSpec model = opts.model == "ising" ? ising_chain(n, opts.field)
                                                    : xxz_chain(n, opts.field);
      run_point(model, 0, std::pow(2.0, n),
                {{"mode", FieldValue{opts.mode}},
                 {"model", FieldValue{model.name()}},
                 {"N", FieldValue{static_cast<long>(n)}},
                 {"T", FieldValue{opts.temperature}}});
    }
  } else {
    const int n = opts.sites_root;
    if (n < 2 || n % 2 != 0) throw UsageError("--root-N must be even and >= 2");
    const ModelSpec model = opts.model == "ising" ? ising_chain(n, opts.field)
                                                  : xxz_chain(n, opts.field);
    std::vector<double> ms = parse_grid_or_usage(opts.m_list, "--M-list");
    for (double mv : ms) {
      const int m = static_cast<int>(mv);
      if (m < 1 || mv != std::floor(mv)) throw UsageError("--M-list entries must be integers");
      if (m > (1 << (n / 2)))
        throw UsageError("--M-list entries cannot exceed d^{N/2} = " +
                         std::to_string(1 << (n / 2)));
      run_point(model, m, static_cast<double>(m),
                {{"mode", FieldValue{opts.mode}},
                 {"model", FieldValue{model.name()}},
                 {"N", FieldValue{static_cast<long>(n)}},
                 {"T", FieldValue{opts.temperature}}});
    }
  }

  // Least-squares slope of log t against log(dim) resp. log(M).
  const std::size_t n_pts = log_basis.size();
  double sx = 0, sy = 0, sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n_pts; ++i) {
    sx += log_basis[i];
    sy += log_time[i];
    sxy += log_basis[i] * log_time[i];
    sxx += log_basis[i] * log_basis[i];
  }
  const double denom = n_pts * sxx - sx * sx;
  const double exponent = denom != 0.0 ? (n_pts * sxy - sx * sy) / denom : 0.0;

  emit(opts.common, records);
  std::cerr << "summary: mode=" << opts.mode << " fitted_exponent=" << exponent << "\n";
  return 0;
}

}  // namespace ttoent::cli
