// Mixing and estimator diagnostics: integrated autocorrelation time with
// the fixed 100-lag truncation, log-likelihood correlation scans over the
// CN step length, and posterior summaries of a chain trace.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cpmmh/aux_block.hpp"
#include "cpmmh/math.hpp"
#include "cpmmh/random.hpp"
#include "cpmmh/sampler.hpp"

namespace cpmmh {

// Empirical autocorrelations at lags 1..max_lag. The normalisation uses
// the lag-0 variance with denominator n for every lag, which keeps the
// autocovariance sequence positive semidefinite.
inline std::vector<double> autocorrelations(std::span<const double> series,
                                            std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n <= max_lag) {
    throw std::invalid_argument("autocorrelations: series shorter than max_lag");
  }
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (!(c0 > 0.0)) {
    throw std::invalid_argument("autocorrelations: series has zero variance");
  }
  std::vector<double> rho(max_lag);
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double c = 0.0;
    for (std::size_t k = 0; k + lag < n; ++k) {
      c += (series[k] - mean) * (series[k + lag] - mean);
    }
    rho[lag - 1] = c / static_cast<double>(n) / c0;
  }
  return rho;
}

// IACT = 1 + 2 sum_{tau=1}^{max_lag} rho_tau. Not floored at 1; a negative
// autocorrelation sum is reported as computed.
inline double iact(std::span<const double> series, std::size_t max_lag = 100) {
  const auto rho = autocorrelations(series, max_lag);
  double s = 0.0;
  for (double r : rho) s += r;
  return 1.0 + 2.0 * s;
}

struct IACTReport {
  std::vector<double> per_parameter;
  std::vector<std::vector<double>> autocorr;  // lags 1..max_lag per parameter
  double acceptance_rate = 0.0;
  bool negative_warning = false;  // some IACT came out below 1
};

inline double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  if (n != b.size() || n < 2) {
    throw std::invalid_argument("pearson_correlation: need two series of equal length >= 2");
  }
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  return sab / std::sqrt(saa * sbb);
}

struct CorrelationScanRow {
  double sigma_u = 0.0;
  double correlation = 0.0;
};

// For each sigma_u, draws u from the prior, proposes u' by a CN step and
// records the correlation between the two log-likelihood values over
// n_pairs independent pairs. sigma_u = 0 is the identity step here, so its
// correlation is exactly 1.
inline std::vector<CorrelationScanRow> loglik_correlation_scan(
    const std::function<double(const AuxBlock&)>& loglik, std::size_t rows,
    std::size_t cols, std::span<const double> sigma_u_grid, std::size_t n_pairs,
    RandomStream& rng) {
  if (n_pairs < 2) throw std::invalid_argument("loglik_correlation_scan: n_pairs >= 2");
  std::vector<CorrelationScanRow> out;
  out.reserve(sigma_u_grid.size());
  std::vector<double> first(n_pairs), second(n_pairs);
  for (double sigma_u : sigma_u_grid) {
    if (!(sigma_u >= 0.0 && sigma_u <= 1.0)) {
      throw std::invalid_argument("loglik_correlation_scan: sigma_u must lie in [0,1]");
    }
    for (std::size_t i = 0; i < n_pairs; ++i) {
      const AuxBlock u = sample_prior(rows, cols, rng);
      first[i] = loglik(u);
      if (sigma_u == 0.0) {
        second[i] = first[i];
      } else {
        second[i] = loglik(propose_cn(u, sigma_u, rng));
      }
    }
    out.push_back({sigma_u, sigma_u == 0.0 ? 1.0 : pearson_correlation(first, second)});
  }
  return out;
}

// Sample standard deviation of the log-likelihood over independent
// auxiliary draws.
inline double loglik_stddev(const std::function<double(const AuxBlock&)>& loglik,
                            std::size_t rows, std::size_t cols, std::size_t n_draws,
                            RandomStream& rng) {
  if (n_draws < 2) throw std::invalid_argument("loglik_stddev: n_draws >= 2");
  std::vector<double> values(n_draws);
  for (std::size_t i = 0; i < n_draws; ++i) {
    values[i] = loglik(sample_prior(rows, cols, rng));
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n_draws);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n_draws - 1));
}

struct PosteriorSummary {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<double> q05, q50, q95;
  std::vector<double> iact_per_parameter;
  double acceptance_rate = 0.0;
  bool iact_negative_warning = false;
};

inline double sample_quantile(std::vector<double> sorted, double q) {
  // linear interpolation between order statistics
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// Statistics over the post-burn-in samples of every parameter. IACT uses
// the truncated estimator above; a constant series reports IACT as NaN
// rather than failing the whole summary.
inline PosteriorSummary posterior_summary(const ChainTrace& trace, std::size_t burn_in,
                                          std::size_t max_lag = 100) {
  if (burn_in >= trace.size()) {
    throw std::invalid_argument("posterior_summary: burn_in must be below trace length");
  }
  PosteriorSummary s;
  const std::size_t p = trace.n_params();
  const std::size_t n = trace.size() - burn_in;
  for (std::size_t j = 0; j < p; ++j) {
    auto series = trace.parameter_series(j, burn_in);
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : series) ss += (v - mean) * (v - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    s.mean.push_back(mean);
    s.stddev.push_back(sd);
    std::sort(series.begin(), series.end());
    s.q05.push_back(sample_quantile(series, 0.05));
    s.q50.push_back(sample_quantile(series, 0.50));
    s.q95.push_back(sample_quantile(series, 0.95));
    double tau = std::numeric_limits<double>::quiet_NaN();
    if (sd > 0.0 && n > max_lag) {
      tau = iact(trace.parameter_series(j, burn_in), max_lag);
      if (tau < 1.0) s.iact_negative_warning = true;
    }
    s.iact_per_parameter.push_back(tau);
  }
  s.acceptance_rate = trace.acceptance_rate(burn_in);
  return s;
}

// Least-squares line a*x + b through (x_i, y_i); returns {a, b}.
inline std::pair<double, double> linear_fit(std::span<const double> x,
                                            std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("linear_fit: need n >= 2");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace cpmmh
