#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "ttoent/errors.hpp"
#include "ttoent/version.hpp"

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitCapacity = 2;

void add_common(CLI::App* cmd, ttoent::cli::CommonOptions& common, bool seed_required = true) {
  cmd->add_option("--output,-o", common.output_path, "output file (default: stdout)");
  cmd->add_option("--format", common.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--workers", common.workers,
                  "parallel workers (default: 1, or the THREADS environment variable)");
  auto* seed = cmd->add_option("--seed", common.seed, "RNG seed");
  if (seed_required) seed->required();
  cmd->add_option("--restarts", common.restarts, "optimizer restarts")->capture_default_str();
  cmd->add_option("--max-evals", common.max_evals,
                  "objective evaluation budget per restart (0 = 200 K^2)");
  cmd->set_config("--config", "", "flat key=value config file; flags take precedence");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree-tensor-operator estimation of the entanglement of formation"};
  app.set_version_flag("--version", ttoent::kArtifactVersion);
  app.require_subcommand(1);

  ttoent::cli::ThermalOptions thermal;
  auto* cmd_thermal = app.add_subcommand(
      "thermal-eof", "EoF of truncated thermal states over a temperature grid");
  cmd_thermal->add_option("--model", thermal.model, "ising or xxz")->capture_default_str();
  cmd_thermal->add_option("--N", thermal.sites, "chain length (even)")->required();
  cmd_thermal->add_option("--h", thermal.field, "transverse field (Ising)")
      ->each([&](const std::string&) { thermal.field_set = true; });
  cmd_thermal->add_option("--xi", thermal.anisotropy, "anisotropy (XXZ)")
      ->each([&](const std::string&) { thermal.anisotropy_set = true; });
  cmd_thermal->add_option("--T", thermal.t_grid, "temperatures: value, list or lo:hi:step")
      ->required();
  cmd_thermal->add_option("--K0", thermal.kraus_dim, "retained eigenstates")
      ->capture_default_str();
  cmd_thermal->add_option("--K", thermal.search_dim, "decomposition size (default: K0)");
  cmd_thermal->add_option("--M", thermal.max_bond,
                          "bond dimension for the compressed root (0 = optimize the full X)");
  add_common(cmd_thermal, thermal.common);
  cmd_thermal->callback([&]() { ttoent::cli::run_thermal_eof(thermal); });

  ttoent::cli::BenchOptions bench;
  auto* cmd_bench =
      app.add_subcommand("bench", "benchmark families with exact references where they exist");
  cmd_bench->add_option("--family", bench.family,
                        "bell | ghz | random-pure | hs-random | separable | werner | isotropic")
      ->required();
  cmd_bench->add_option("--lambda", bench.lambda_grid, "mixture weights (bell/ghz)")
      ->capture_default_str();
  cmd_bench->add_option("--f", bench.f_grid, "flip expectation / fidelity grid (werner/isotropic)");
  cmd_bench->add_option("--N", bench.sites, "qubit count (ghz/random-pure/separable)")
      ->capture_default_str();
  cmd_bench->add_option("--K0", bench.kraus_dim, "ensemble size (random-pure)")
      ->capture_default_str();
  cmd_bench->add_option("--dim", bench.dim, "Hilbert dimension (hs-random)")
      ->capture_default_str();
  cmd_bench->add_option("--d", bench.local_dim, "local dimension (werner/isotropic)")
      ->capture_default_str();
  cmd_bench->add_option("--instances", bench.instances, "number of random instances")
      ->capture_default_str();
  cmd_bench->add_option("--K-extra", bench.k_extra,
                        "enlarge the decomposition search to K = K0 + K-extra");
  add_common(cmd_bench, bench.common);
  cmd_bench->callback([&]() { ttoent::cli::run_bench(bench); });

  ttoent::cli::ScanK0Options scan_k0;
  auto* cmd_scan_k0 = app.add_subcommand("scan-k0", "EoF convergence in the Kraus dimension");
  cmd_scan_k0->add_option("--model", scan_k0.model)->capture_default_str();
  cmd_scan_k0->add_option("--N", scan_k0.sites)->required();
  cmd_scan_k0->add_option("--h", scan_k0.field)->capture_default_str();
  cmd_scan_k0->add_option("--xi", scan_k0.anisotropy)->capture_default_str();
  cmd_scan_k0->add_option("--T", scan_k0.temperature)->required();
  cmd_scan_k0->add_option("--K0-max", scan_k0.k0_max)->capture_default_str();
  add_common(cmd_scan_k0, scan_k0.common);
  cmd_scan_k0->callback([&]() { ttoent::cli::run_scan_k0(scan_k0); });

  ttoent::cli::ScanMOptions scan_m;
  auto* cmd_scan_m = app.add_subcommand("scan-m", "EoF convergence in the bond dimension");
  cmd_scan_m->add_option("--model", scan_m.model)->capture_default_str();
  cmd_scan_m->add_option("--N", scan_m.sites)->required();
  cmd_scan_m->add_option("--h", scan_m.field)->capture_default_str();
  cmd_scan_m->add_option("--xi", scan_m.anisotropy)->capture_default_str();
  cmd_scan_m->add_option("--T", scan_m.temperature)->required();
  cmd_scan_m->add_option("--K0", scan_m.kraus_dim)->capture_default_str();
  cmd_scan_m->add_option("--M-list", scan_m.m_list,
                         "bond dimensions; must end at the exact d^{N/2}")
      ->required();
  add_common(cmd_scan_m, scan_m.common);
  cmd_scan_m->callback([&]() { ttoent::cli::run_scan_m(scan_m); });

  ttoent::cli::ScalingOptions scaling;
  auto* cmd_scaling =
      app.add_subcommand("scaling", "finite-size collapse fit of thermal-eof output");
  cmd_scaling->add_option("--input", scaling.input_path, "CSV from thermal-eof")->required();
  cmd_scaling->add_option("--c", scaling.c, "held-fixed exponent c")->capture_default_str();
  cmd_scaling->add_option("--z-min", scaling.z_min)->capture_default_str();
  cmd_scaling->add_option("--z-max", scaling.z_max)->capture_default_str();
  cmd_scaling->add_option("--z-step", scaling.z_step)->capture_default_str();
  cmd_scaling->add_flag("--fit-c", scaling.fit_c, "jointly scan c as well");
  cmd_scaling->add_option("--c-min", scaling.c_min)->capture_default_str();
  cmd_scaling->add_option("--c-max", scaling.c_max)->capture_default_str();
  cmd_scaling->add_option("--c-step", scaling.c_step)->capture_default_str();
  add_common(cmd_scaling, scaling.common, /*seed_required=*/false);
  cmd_scaling->callback([&]() { ttoent::cli::run_scaling(scaling); });

  ttoent::cli::TimingOptions timing;
  auto* cmd_timing =
      app.add_subcommand("timing", "optimization-loop wall times and fitted cost exponents");
  cmd_timing->add_option("--mode", timing.mode, "full-x or tto-root")->capture_default_str();
  cmd_timing->add_option("--model", timing.model)->capture_default_str();
  cmd_timing->add_option("--h", timing.field, "model parameter (h or xi)")
      ->capture_default_str();
  cmd_timing->add_option("--T", timing.temperature)->capture_default_str();
  cmd_timing->add_option("--K0", timing.kraus_dim)->capture_default_str();
  cmd_timing->add_option("--N", timing.n_grid, "chain lengths (full-x mode)")
      ->capture_default_str();
  cmd_timing->add_option("--M-list", timing.m_list, "bond dimensions (tto-root mode)")
      ->capture_default_str();
  cmd_timing->add_option("--root-N", timing.sites_root, "chain length for tto-root mode")
      ->capture_default_str();
  cmd_timing->add_option("--evals", timing.evals, "fixed evaluation count per point")
      ->capture_default_str();
  add_common(cmd_timing, timing.common);
  cmd_timing->callback([&]() { ttoent::cli::run_timing(timing); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const ttoent::cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ttoent::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const ttoent::FitError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return kExitData;
  } catch (const ttoent::InvalidInputError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ttoent::UnsupportedError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
