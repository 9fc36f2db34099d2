#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttoent::cli {

/// Flag-level problems: missing/contradictory/malformed values. Exit 64.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string output_path;  // empty = stdout
  std::string format = "csv";
  int workers = 0;  // 0 = resolve from THREADS env, else 1
  std::uint64_t seed = 0;
  int restarts = 3;
  long max_evals = 0;  // 0 = optimizer default
};

struct ThermalOptions {
  CommonOptions common;
  std::string model = "ising";
  int sites = 8;
  double field = 1.0;      // --h
  double anisotropy = 0.5; // --xi
  bool field_set = false;
  bool anisotropy_set = false;
  std::string t_grid;
  int kraus_dim = 4;
  int search_dim = 0;  // 0 = K0
  int max_bond = 0;    // 0 = full X
};

struct BenchOptions {
  CommonOptions common;
  std::string family;
  std::string lambda_grid = "0.0:1.0:0.1";
  std::string f_grid;
  int sites = 2;
  int kraus_dim = 4;
  int dim = 4;
  int local_dim = 2;  // --d for werner/isotropic
  int instances = 100;
  int k_extra = 0;
};

struct ScanK0Options {
  CommonOptions common;
  std::string model = "ising";
  int sites = 10;
  double field = 1.0;
  double anisotropy = 0.5;
  double temperature = 0.1;
  int k0_max = 6;
};

struct ScanMOptions {
  CommonOptions common;
  std::string model = "ising";
  int sites = 8;
  double field = 1.0;
  double anisotropy = 0.5;
  double temperature = 0.1;
  int kraus_dim = 2;
  std::string m_list;
};

struct ScalingOptions {
  CommonOptions common;
  std::string input_path;
  double c = 0.5;
  double z_min = 0.5;
  double z_max = 1.5;
  double z_step = 0.005;
  bool fit_c = false;
  double c_min = 0.0;
  double c_max = 1.5;
  double c_step = 0.05;
};

struct TimingOptions {
  CommonOptions common;
  std::string mode = "full-x";
  std::string model = "ising";
  double field = 1.0;
  double temperature = 0.1;
  int kraus_dim = 2;
  std::string n_grid = "6:12:2";
  std::string m_list = "8,16,32,64";
  int sites_root = 12;  // chain size for tto-root mode
  long evals = 600;
};

int run_thermal_eof(const ThermalOptions& opts);
int run_bench(const BenchOptions& opts);
int run_scan_k0(const ScanK0Options& opts);
int run_scan_m(const ScanMOptions& opts);
int run_scaling(const ScalingOptions& opts);
int run_timing(const TimingOptions& opts);

}  // namespace ttoent::cli
