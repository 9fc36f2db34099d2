#include "ttoent/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ttoent/errors.hpp"

namespace ttoent {

std::pair<double, double> rescale(const ScalingPoint& point, double c, double z) {
  if (point.sites < 2) throw InvalidInputError("rescale: N must be >= 2");
  const double x = point.temperature * std::pow(static_cast<double>(point.sites), z);
  const double y = point.eof_bits - (c / 3.0) * std::log2(static_cast<double>(point.sites));
  return {x, y};
}

namespace {

void require_fittable(const ScalingDataset& data) {
  std::set<int> sizes;
  for (const auto& p : data.points) {
    if (p.temperature <= 0.0) throw InvalidInputError("scaling data needs T > 0");
    sizes.insert(p.sites);
  }
  if (sizes.size() < 2)
    throw InvalidInputError("collapse fit needs at least two distinct system sizes");
}

struct RescaledPoint {
  double x = 0.0, y = 0.0;
  int sites = 0;
};

// Deviation of every point from the piecewise-linear master curve built
// from the points of the *other* sizes. Points outside the other curves'
// x-range are skipped; at a good collapse the interpolation error vanishes,
// at a bad z the curves shift horizontally against each other and the
// deviations grow.
struct PooledCurve {
  std::vector<RescaledPoint> points;  // sorted by x: the empirical master curve
  double residual = 0.0;
};

PooledCurve pooled_fit(const ScalingDataset& data, double c, double z) {
  std::vector<RescaledPoint> pts;
  pts.reserve(data.points.size());
  for (const auto& p : data.points) {
    auto [x, y] = rescale(p, c, z);
    pts.push_back({x, y, p.sites});
  }
  std::sort(pts.begin(), pts.end(), [](const RescaledPoint& a, const RescaledPoint& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.y != b.y) return a.y < b.y;
    return a.sites < b.sites;
  });

  double ss = 0.0;
  std::size_t used = 0;
  std::vector<RescaledPoint> others;
  for (const auto& point : pts) {
    others.clear();
    for (const auto& q : pts)
      if (q.sites != point.sites) others.push_back(q);
    if (others.size() < 2) continue;
    if (point.x < others.front().x || point.x > others.back().x) continue;
    // linear interpolation of the other curves' pooled points at point.x
    std::size_t hi = 0;
    while (hi < others.size() && others[hi].x < point.x) ++hi;
    double predicted = 0.0;
    if (hi == 0)
      predicted = others.front().y;
    else if (hi == others.size() || others[hi].x == point.x)
      predicted = others[hi == others.size() ? hi - 1 : hi].y;
    else {
      const auto& a = others[hi - 1];
      const auto& b = others[hi];
      const double t = (point.x - a.x) / (b.x - a.x);
      predicted = a.y + t * (b.y - a.y);
    }
    const double d = point.y - predicted;
    ss += d * d;
    ++used;
  }
  if (used == 0)
    throw FitError("rescaled curves have no overlapping x-range");

  PooledCurve out;
  out.points = std::move(pts);
  out.residual = ss / static_cast<double>(used);
  return out;
}

}  // namespace

double collapse_residual_at(const ScalingDataset& data, double c, double z) {
  require_fittable(data);
  return pooled_fit(data, c, z).residual;
}

ScalingFit collapse_fit(const ScalingDataset& data, double c, double z_lo, double z_hi,
                        double z_step) {
  require_fittable(data);
  if (!(z_hi > z_lo) || z_step <= 0.0)
    throw InvalidInputError("collapse_fit: need z_hi > z_lo and z_step > 0");

  std::vector<double> zs, residuals;
  for (double z = z_lo; z <= z_hi + 1e-12; z += z_step) {
    zs.push_back(z);
    try {
      residuals.push_back(pooled_fit(data, c, z).residual);
    } catch (const FitError&) {
      residuals.push_back(std::numeric_limits<double>::infinity());
    }
  }
  const auto it_min = std::min_element(residuals.begin(), residuals.end());
  if (!std::isfinite(*it_min))
    throw FitError("rescaled curves have no overlapping x-range anywhere in the z window");
  const std::size_t imin = static_cast<std::size_t>(it_min - residuals.begin());

  // Uncertainty from the residual-doubling window around the minimum.
  const double doubling = 2.0 * residuals[imin] + 1e-300;
  std::size_t lo = imin, hi = imin;
  while (lo > 0 && residuals[lo - 1] <= doubling) --lo;
  while (hi + 1 < residuals.size() && residuals[hi + 1] <= doubling) ++hi;
  const double z_err =
      std::max(zs[imin] - zs[lo], zs[hi] - zs[imin]);

  PooledCurve curve = pooled_fit(data, c, zs[imin]);
  ScalingFit fit;
  fit.c = c;
  fit.z = zs[imin];
  fit.z_err = std::max(z_err, z_step);
  fit.collapse_residual = curve.residual;
  fit.g_table.reserve(curve.points.size());
  for (const auto& p : curve.points) fit.g_table.emplace_back(p.x, p.y);
  return fit;
}

std::vector<PlateauRow> plateau_check(const ScalingDataset& data,
                                      const std::map<int, double>& gap_per_size) {
  std::map<int, std::vector<ScalingPoint>> by_size;
  for (const auto& p : data.points) by_size[p.sites].push_back(p);

  std::vector<PlateauRow> rows;
  for (auto& [sites, pts] : by_size) {
    auto gap_it = gap_per_size.find(sites);
    if (gap_it == gap_per_size.end())
      throw InvalidInputError("plateau_check: missing gap for N = " + std::to_string(sites));
    const double gap = gap_it->second;
    std::sort(pts.begin(), pts.end(),
              [](const ScalingPoint& a, const ScalingPoint& b) {
                return a.temperature < b.temperature;
              });

    if (pts.front().temperature > 0.05 * gap)
      throw InvalidInputError("plateau_check: no near-zero-temperature baseline for N = " +
                              std::to_string(sites));
    const double baseline = pts.front().eof_bits;

    const double target = 0.1 * gap;
    const ScalingPoint* nearest = nullptr;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
      const double d = std::abs(p.temperature - target);
      if (d < best_dist) {
        best_dist = d;
        nearest = &p;
      }
    }
    if (nearest == nullptr || best_dist > 0.5 * target)
      throw InvalidInputError("plateau_check: no data point near T = 0.1 Delta for N = " +
                              std::to_string(sites));

    PlateauRow row;
    row.sites = sites;
    row.ratio = baseline > 0.0 ? nearest->eof_bits / baseline : 0.0;
    row.flagged = row.ratio < 0.9;
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
      if (p.temperature < 0.2 * gap) continue;
      if (p.eof_bits > previous + 1e-9) row.monotone_high_t = false;
      previous = p.eof_bits;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ttoent
