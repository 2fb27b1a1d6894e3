#include "horizon/batch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "horizon/error.hpp"
#include "horizon/synth.hpp"
#include "parallel.hpp"

namespace horizon {

double batch_focal(std::span<const CalibrationEstimate> estimates, double mu_x_mm,
                   double mu_y_mm) {
  if (estimates.empty()) throw Error(ErrorKind::EmptyBatch, "batch focal length: no estimates");
  if (!(mu_x_mm > 0.0) || !(mu_y_mm > 0.0))
    throw Error(ErrorKind::InvalidSensor, "pixel pitch must be positive");
  double sum = 0.0;
  for (const auto& e : estimates) sum += mu_x_mm * e.d_x + mu_y_mm * e.d_y;
  return sum / (2.0 * static_cast<double>(estimates.size()));
}

double batch_focal(const BatchInput& input) {
  return batch_focal(input.estimates, input.mu_x_mm, input.mu_y_mm);
}

Eigen::Vector2d batch_principal(std::span<const CalibrationEstimate> estimates) {
  if (estimates.empty()) throw Error(ErrorKind::EmptyBatch, "batch principal point: no estimates");
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  for (const auto& e : estimates) sum += e.J;
  return sum / static_cast<double>(estimates.size());
}

Eigen::Vector2d batch_principal(const BatchInput& input) {
  return batch_principal(input.estimates);
}

double median(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorKind::EmptyBatch, "median of an empty sample");
  const auto n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

SummaryStats summarize(std::span<const double> samples, double reference) {
  if (samples.empty()) throw Error(ErrorKind::EmptyBatch, "summary of an empty sample");
  SummaryStats s;
  s.count = samples.size();
  const double n = static_cast<double>(s.count);

  // Sorted copy keeps the sums independent of input order.
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  if (sorted.front() == sorted.back()) {
    s.mean = sorted.front();  // exact for constant samples
  } else if (s.count > 1) {
    double ss = 0.0;
    for (double x : sorted) ss += (x - s.mean) * (x - s.mean);
    s.sigma = std::sqrt(ss / (n - 1.0));
  }
  s.median = median(sorted);
  std::vector<double> dev;
  dev.reserve(sorted.size());
  for (double x : sorted) dev.push_back(std::abs(x - s.median));
  s.mad = median(std::move(dev));
  s.mean_error = s.mean - reference;
  s.median_error = s.median - reference;
  return s;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "linear fit needs two or more paired samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::InvalidArgument, "linear fit: x has no spread");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

namespace {

double log_binomial(int n, int q) {
  return std::lgamma(n + 1.0) - std::lgamma(q + 1.0) - std::lgamma(n - q + 1.0);
}

std::vector<int> draw_subset(std::mt19937_64& rng, int n, int q) {
  // Partial Fisher-Yates.
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < q; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(q));
  std::sort(idx.begin(), idx.end());
  return idx;
}

void check_sweep(int n, int q, int draws) {
  if (n < 1) throw Error(ErrorKind::EmptyBatch, "combination sweep: empty pool");
  if (q < 1 || q > n || draws < 1) {
    std::ostringstream msg;
    msg << "combination sweep needs 1 <= q <= n and draws >= 1 (q = " << q << ", n = " << n
        << ", draws = " << draws << ")";
    throw Error(ErrorKind::InvalidSweep, msg.str());
  }
}

}  // namespace

std::vector<std::vector<int>> sweep_subsets(int n, int q, int draws, std::uint64_t seed) {
  check_sweep(n, q, draws);
  const bool can_repeat_check = log_binomial(n, q) > 1e-9;  // C(n, q) > 1
  std::vector<std::vector<int>> subsets;
  subsets.reserve(static_cast<std::size_t>(draws));
  for (int d = 0; d < draws; ++d) {
    std::mt19937_64 rng(substream_seed(seed, static_cast<std::uint64_t>(q),
                                       static_cast<std::uint64_t>(d)));
    auto subset = draw_subset(rng, n, q);
    while (can_repeat_check && !subsets.empty() && subset == subsets.back())
      subset = draw_subset(rng, n, q);
    subsets.push_back(std::move(subset));
  }
  return subsets;
}

SweepResult combination_sweep(std::span<const CalibrationEstimate> pool, int q, int draws,
                              std::uint64_t seed, double mu_x_mm, double mu_y_mm,
                              unsigned threads) {
  const int n = static_cast<int>(pool.size());
  const auto subsets = sweep_subsets(n, q, draws, seed);

  std::vector<double> f(subsets.size()), u0(subsets.size()), v0(subsets.size());
  detail::parallel_for(subsets.size(), threads, [&](std::size_t i) {
    std::vector<CalibrationEstimate> chosen;
    chosen.reserve(subsets[i].size());
    for (int k : subsets[i]) chosen.push_back(pool[static_cast<std::size_t>(k)]);
    f[i] = batch_focal(chosen, mu_x_mm, mu_y_mm);
    const Eigen::Vector2d pp = batch_principal(chosen);
    u0[i] = pp.x();
    v0[i] = pp.y();
  });

  SweepResult r;
  r.q = q;
  r.f_mm = summarize(f);
  r.u0_px = summarize(u0);
  r.v0_px = summarize(v0);
  return r;
}

std::vector<SweepResult> combination_sweep(std::span<const CalibrationEstimate> pool,
                                           std::span<const int> qs, int draws,
                                           std::uint64_t seed, double mu_x_mm, double mu_y_mm,
                                           unsigned threads) {
  std::vector<SweepResult> out;
  out.reserve(qs.size());
  for (int q : qs) out.push_back(combination_sweep(pool, q, draws, seed, mu_x_mm, mu_y_mm, threads));
  return out;
}

}  // namespace horizon
