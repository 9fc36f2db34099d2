#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ttoent {

struct ScalingPoint {
  int sites = 0;
  double temperature = 0.0;
  double eof_bits = 0.0;
};

struct ScalingDataset {
  std::vector<ScalingPoint> points;
  std::string model_tag;
};

struct ScalingFit {
  double c = 0.0;
  double z = 0.0;
  double z_err = 0.0;
  double collapse_residual = 0.0;
  std::vector<std::pair<double, double>> g_table;  // (x = T N^z, fitted y)
};

/// (x, y) = (T * N^z, E_F - (c/3) log2 N). Base-2 logarithm throughout,
/// consistent with bit-valued entropies.
std::pair<double, double> rescale(const ScalingPoint& point, double c, double z);

/// Collapse quality at a given z: mean squared deviation of the pooled
/// rescaled points from their best non-increasing fit (pool-adjacent-
/// violators). Throws FitError when the rescaled curves have no common
/// x-range, InvalidInputError for fewer than two distinct sizes.
double collapse_residual_at(const ScalingDataset& data, double c, double z);

/// Scans z over [z_lo, z_hi] with the given step, holding c fixed, and
/// returns the minimizing z. z_err is the half-width of the window where the
/// residual stays below twice its minimum.
ScalingFit collapse_fit(const ScalingDataset& data, double c, double z_lo, double z_hi,
                        double z_step = 0.005);

struct PlateauRow {
  int sites = 0;
  double ratio = 0.0;       // E_F(T = 0.1 Delta) / E_F(T -> 0)
  bool flagged = false;     // ratio < 0.9
  bool monotone_high_t = true;  // E_F non-increasing for T >= 0.2 Delta (soft check)
};

/// Requires a near-zero-temperature baseline (T <= 0.05 Delta) and a point
/// near T = 0.1 Delta for every size present in the data.
std::vector<PlateauRow> plateau_check(const ScalingDataset& data,
                                      const std::map<int, double>& gap_per_size);

}  // namespace ttoent
