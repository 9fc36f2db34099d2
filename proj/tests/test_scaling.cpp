#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ttoent/errors.hpp"
#include "ttoent/rng.hpp"
#include "ttoent/scaling.hpp"

using namespace ttoent;

namespace {

// Synthetic data following E_F = (c/3) log2 N + g(T N^z) exactly.
ScalingDataset synthetic(double c, double z, double (*g)(double),
                         const std::vector<int>& sizes, const std::vector<double>& ts) {
  ScalingDataset data;
  for (int n : sizes)
    for (double t : ts) {
      ScalingPoint p;
      p.sites = n;
      p.temperature = t;
      p.eof_bits = (c / 3.0) * std::log2(static_cast<double>(n)) +
                   g(t * std::pow(static_cast<double>(n), z));
      data.points.push_back(p);
    }
  return data;
}

double g_linear(double x) { return -0.05 * x; }
double g_exp(double x) { return 0.8 * std::exp(-0.4 * x); }

}  // namespace

TEST_CASE("rescale: c = 0 leaves the value untouched") {
  ScalingPoint p{8, 0.3, 0.75};
  auto [x, y] = rescale(p, 0.0, 1.0);
  CHECK(y == doctest::Approx(0.75));
  CHECK(x == doctest::Approx(0.3 * 8.0));
}

TEST_CASE("rescale: doubling N at c = 1/2 shifts y by one sixth") {
  ScalingPoint p1{8, 0.3, 0.75};
  ScalingPoint p2{16, 0.3, 0.75};
  auto [x1, y1] = rescale(p1, 0.5, 1.0);
  auto [x2, y2] = rescale(p2, 0.5, 1.0);
  CHECK(y1 - y2 == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("rescale: synthetic curves collapse onto one line") {
  ScalingDataset data = synthetic(0.5, 1.0, g_linear, {8, 12, 16}, {0.1, 0.2, 0.3});
  for (const auto& p : data.points) {
    auto [x, y] = rescale(p, 0.5, 1.0);
    CHECK(std::abs(y - g_linear(x)) <= 1e-12);
  }
}

TEST_CASE("collapse_fit: recovers the exponent from exact synthetic data") {
  ScalingDataset data =
      synthetic(0.5, 1.0, g_linear, {8, 10, 12}, {0.05, 0.1, 0.2, 0.3, 0.4, 0.5});
  ScalingFit fit = collapse_fit(data, 0.5, 0.7, 1.3, 0.005);
  CHECK(std::abs(fit.z - 1.0) <= 0.01);
  CHECK(collapse_residual_at(data, 0.5, 1.0) <= 1e-10);

  ScalingDataset curved =
      synthetic(1.0, 1.0, g_exp, {8, 10, 12}, {0.05, 0.1, 0.2, 0.3, 0.4, 0.5});
  ScalingFit fit2 = collapse_fit(curved, 1.0, 0.7, 1.3, 0.005);
  CHECK(std::abs(fit2.z - 1.0) <= 0.01);
}

TEST_CASE("collapse_fit: a single size cannot be fitted") {
  ScalingDataset data = synthetic(0.5, 1.0, g_linear, {8}, {0.1, 0.2, 0.3});
  CHECK_THROWS_AS(collapse_fit(data, 0.5, 0.8, 1.2), InvalidInputError);
}

TEST_CASE("collapse_fit: argmin is invariant under a consistent change of log base") {
  // bits -> nats rescales every y by ln 2 when c is rescaled alongside; the
  // argmin of the residual must not move.
  ScalingDataset bits =
      synthetic(0.5, 1.0, g_exp, {8, 10, 12}, {0.05, 0.1, 0.2, 0.3, 0.4, 0.5});
  ScalingDataset nats = bits;
  for (auto& p : nats.points) p.eof_bits *= std::log(2.0);
  ScalingFit f_bits = collapse_fit(bits, 0.5, 0.7, 1.3, 0.01);
  ScalingFit f_nats = collapse_fit(nats, 0.5 * std::log(2.0), 0.7, 1.3, 0.01);
  CHECK(std::abs(f_bits.z - f_nats.z) <= f_bits.z_err + 1e-12);
}

TEST_CASE("collapse_fit: residual invariant under point order") {
  ScalingDataset data =
      synthetic(0.5, 0.9, g_exp, {8, 10, 12}, {0.05, 0.15, 0.25, 0.35});
  // add mild deterministic noise so the fit is not exactly zero
  Rng rng(2718);
  for (auto& p : data.points) p.eof_bits += 0.01 * (rng.uniform() - 0.5);
  const double r1 = collapse_residual_at(data, 0.5, 0.9);
  ScalingDataset shuffled = data;
  std::mt19937 gen(42);
  std::shuffle(shuffled.points.begin(), shuffled.points.end(), gen);
  const double r2 = collapse_residual_at(shuffled, 0.5, 0.9);
  CHECK(r1 == doctest::Approx(r2).epsilon(1e-14));
}

TEST_CASE("collapse_fit: disjoint rescaled supports raise a fit error") {
  // Two sizes measured over temperature windows so far apart that no z in
  // the scan can overlap them.
  ScalingDataset data;
  for (double t : {1e-4, 2e-4}) data.points.push_back({8, t, 0.5});
  for (double t : {10.0, 20.0}) data.points.push_back({12, t, 0.4});
  CHECK_THROWS_AS(collapse_residual_at(data, 0.5, 1.0), FitError);
  CHECK_THROWS_AS(collapse_fit(data, 0.5, 0.9, 1.1, 0.05), FitError);
}

TEST_CASE("plateau_check: flat curves pass, missing baseline throws") {
  std::map<int, double> gaps{{8, 0.6}, {12, 0.4}};
  ScalingDataset data;
  for (const auto& [n, gap] : gaps)
    for (double frac : {0.01, 0.1, 0.3, 0.5}) {
      ScalingPoint p;
      p.sites = n;
      p.temperature = frac * gap;
      p.eof_bits = frac <= 0.2 ? 1.0 : 1.0 - (frac - 0.2);
      data.points.push_back(p);
    }
  auto rows = plateau_check(data, gaps);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.ratio == doctest::Approx(1.0));
    CHECK_FALSE(row.flagged);
    CHECK(row.monotone_high_t);
  }

  ScalingDataset no_baseline;
  no_baseline.points.push_back({8, 0.3 * 0.6, 0.9});
  no_baseline.points.push_back({8, 0.1 * 0.6, 0.9});
  CHECK_THROWS_AS(plateau_check(no_baseline, gaps), InvalidInputError);
}

TEST_CASE("plateau_check: decaying curves are flagged below 0.9") {
  std::map<int, double> gaps{{8, 0.6}};
  ScalingDataset data;
  for (double frac : {0.01, 0.1, 0.3}) {
    ScalingPoint p;
    p.sites = 8;
    p.temperature = frac * 0.6;
    p.eof_bits = 1.0 - 3.0 * frac;  // drops quickly with T
    data.points.push_back(p);
  }
  auto rows = plateau_check(data, gaps);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].ratio == doctest::Approx(0.7 / 0.97).epsilon(1e-9));
  CHECK(rows[0].flagged);
}
