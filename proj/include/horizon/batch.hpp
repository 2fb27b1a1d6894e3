#pragma once

// Multi-image least-squares estimates of f and the principal point, and the
// summary statistics used to report them.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "horizon/calibrate.hpp"

namespace horizon {

struct BatchInput {
  std::vector<CalibrationEstimate> estimates;
  double mu_x_mm = 1.0;
  double mu_y_mm = 1.0;
};

/// Mean of the 2N stacked values {mu_x d_x_i, mu_y d_y_i}.
double batch_focal(const BatchInput& input);
double batch_focal(std::span<const CalibrationEstimate> estimates, double mu_x_mm,
                   double mu_y_mm);

/// Component-wise mean of the J_i vectors.
Eigen::Vector2d batch_principal(const BatchInput& input);
Eigen::Vector2d batch_principal(std::span<const CalibrationEstimate> estimates);

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double sigma = 0.0;  // sample standard deviation (n - 1); 0 for one sample
  double mad = 0.0;    // median |x - median|, unscaled
  double mean_error = 0.0;
  double median_error = 0.0;
};

SummaryStats summarize(std::span<const double> samples, double reference = 0.0);

double median(std::vector<double> values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct SweepResult {
  int q = 0;
  SummaryStats f_mm;
  SummaryStats u0_px;
  SummaryStats v0_px;
};

/// For one subset size q: `draws` random q-subsets of the pool (indices
/// distinct within a subset), batch estimates per subset, and their spread.
/// Each draw uses its own substream derived from (seed, q, draw index); a
/// subset equal to the previous draw's subset is redrawn when C(n, q) > 1.
/// Evaluation may run on `threads` workers (0 = HORIZON_CALIB_THREADS or
/// hardware); the output does not depend on the thread count.
SweepResult combination_sweep(std::span<const CalibrationEstimate> pool, int q, int draws,
                              std::uint64_t seed, double mu_x_mm, double mu_y_mm,
                              unsigned threads = 0);

std::vector<SweepResult> combination_sweep(std::span<const CalibrationEstimate> pool,
                                           std::span<const int> qs, int draws,
                                           std::uint64_t seed, double mu_x_mm,
                                           double mu_y_mm, unsigned threads = 0);

/// The sampled q-subsets alone (sorted index lists), for inspection and tests.
std::vector<std::vector<int>> sweep_subsets(int n, int q, int draws, std::uint64_t seed);

}  // namespace horizon
