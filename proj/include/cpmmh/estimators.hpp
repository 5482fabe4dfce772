// Likelihood estimators driven entirely by an auxiliary block: an
// importance sampler for the IID model and a bootstrap particle filter with
// systematic resampling and state-sorted particles for state space models.
// Both are pure functions of (theta, u); rerunning with the same inputs
// reproduces the estimate bit for bit.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cpmmh/aux_block.hpp"
#include "cpmmh/math.hpp"
#include "cpmmh/models.hpp"

namespace cpmmh {

struct LogLikelihoodEstimate {
  double log_likelihood = 0.0;
  std::vector<double> per_time_log_terms;  // log of each bracketed sum minus log N
  bool degenerate = false;                 // all weights collapsed at some t
};

// Whether the importance sampler's proposal scale multiplies u by sigma_v^2
// (the printed update x = mu + sigma_v^2 u) or by sigma_v (prior draws).
enum class ISScale { variance_as_printed, stddev };

// Importance sampling with fixed random numbers. u has shape T x N; row t
// supplies the N proposal draws for time t and the weights are the
// observation densities, combined per time step in log space.
inline LogLikelihoodEstimate importance_sampling_loglik(
    const GaussianIIDModel& model, std::span<const double> y, const AuxBlock& u,
    ISScale scale = ISScale::variance_as_printed) {
  model.validate();
  if (u.rows() != y.size()) {
    throw std::invalid_argument("importance_sampling_loglik: u must have T rows");
  }
  const std::size_t n = u.cols();
  const double s =
      scale == ISScale::variance_as_printed ? model.sigma_v * model.sigma_v : model.sigma_v;
  const double obs_var = model.sigma_e * model.sigma_e;
  const double log_n = std::log(static_cast<double>(n));

  LogLikelihoodEstimate est;
  est.per_time_log_terms.resize(y.size());
  std::vector<double> logw(n);
  for (std::size_t t = 0; t < y.size(); ++t) {
    const auto row = u.row(t);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = model.mu + s * row[i];
      logw[i] = log_normal_pdf(y[t], x, obs_var);
    }
    const double term = log_sum_exp(logw) - log_n;
    est.per_time_log_terms[t] = term;
    if (!std::isfinite(term)) {
      est.degenerate = true;
      est.log_likelihood = -kInf;
      return est;
    }
    est.log_likelihood += term;
  }
  return est;
}

// Systematic resampling: ancestor i is the index whose cumulative-weight
// interval contains the stratified point (uniform + i) / N. Offspring
// counts never deviate from N * W_j by more than one.
inline std::vector<std::size_t> systematic_resample(std::span<const double> weights,
                                                    double uniform) {
  const std::size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("systematic_resample: empty weights");
  if (!(uniform > 0.0 && uniform < 1.0)) {
    throw std::invalid_argument("systematic_resample: uniform must lie in (0,1)");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("systematic_resample: weights must be non-negative");
    }
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-10) {
    throw std::invalid_argument("systematic_resample: weights must sum to 1");
  }
  std::vector<std::size_t> ancestors(n);
  double cum = weights[0];
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double point = (uniform + static_cast<double>(i)) / static_cast<double>(n);
    while (cum < point && j + 1 < n) {
      ++j;
      cum += weights[j];
    }
    ancestors[i] = j;
  }
  return ancestors;
}

// Bootstrap particle filter with fixed random numbers.
//
// u has shape (T+1) x (N+1). Row 0, columns 1..N initialise the particles;
// row t (t = 1..T) supplies the resampling variate in column 0 (mapped to a
// uniform via the normal CDF) and the N propagation variates in columns
// 1..N. Entry (0,0) is unused. Per step: resample ancestors systematically
// from the previous normalised weights, propagate through the model
// transition (conditioning on the previous observation, where the leverage
// enters), sort particles ascending by current state, then weight with the
// observation density. Sorting keeps the estimate continuous in theta and u.
//
// The Model concept: initial_state(xi), propagate(x_prev, y_prev_ptr, xi)
// and log_obs_density(y, x).
template <class Model>
LogLikelihoodEstimate bootstrap_pf_loglik(const Model& model, std::span<const double> y,
                                          const AuxBlock& u) {
  const std::size_t T = y.size();
  if (u.rows() != T + 1 || u.cols() < 2) {
    throw std::invalid_argument("bootstrap_pf_loglik: u must have shape (T+1) x (N+1)");
  }
  const std::size_t n = u.cols() - 1;
  const double log_n = std::log(static_cast<double>(n));

  LogLikelihoodEstimate est;
  est.per_time_log_terms.resize(T);

  std::vector<double> states(n), propagated(n), logw(n), weights(n, 1.0 / n);
  for (std::size_t i = 0; i < n; ++i) {
    states[i] = model.initial_state(u(0, i + 1));
  }

  const double* y_prev = nullptr;
  for (std::size_t t = 1; t <= T; ++t) {
    const double ubar = gaussian_to_uniform(u(t, 0));
    const auto ancestors = systematic_resample(weights, ubar);

    bool finite_states = true;
    for (std::size_t i = 0; i < n; ++i) {
      propagated[i] = model.propagate(states[ancestors[i]], y_prev, u(t, i + 1));
      finite_states = finite_states && std::isfinite(propagated[i]);
    }
    if (!finite_states) {
      est.degenerate = true;
      break;
    }
    std::sort(propagated.begin(), propagated.end());

    for (std::size_t i = 0; i < n; ++i) {
      logw[i] = model.log_obs_density(y[t - 1], propagated[i]);
    }
    const double lse = log_sum_exp(logw);
    if (!std::isfinite(lse)) {
      est.degenerate = true;
      break;
    }
    const double term = lse - log_n;
    est.per_time_log_terms[t - 1] = term;
    est.log_likelihood += term;

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      weights[i] = std::exp(logw[i] - lse);
      total += weights[i];
    }
    for (double& w : weights) w /= total;

    states.swap(propagated);
    y_prev = &y[t - 1];
  }
  if (est.degenerate) {
    std::fill(est.per_time_log_terms.begin(), est.per_time_log_terms.end(), -kInf);
    est.log_likelihood = -kInf;
  }
  return est;
}

// ---------------------------------------------------------------------------
// Potential function Phi_theta(u) = -(log p_hat(y; u) + log p(theta)).
// Out-of-support parameters and degenerate estimates map to +inf, which the
// sampler rejects.

enum class EstimatorKind { importance_sampling, bootstrap_pf };

class PotentialEvaluator {
 public:
  using PhiFn = std::function<double(std::span<const double>, const AuxBlock&)>;

  PotentialEvaluator(EstimatorKind kind, std::size_t aux_rows, std::size_t aux_cols,
                     std::size_t n_params, PhiFn phi)
      : kind_(kind),
        aux_rows_(aux_rows),
        aux_cols_(aux_cols),
        n_params_(n_params),
        phi_(std::move(phi)) {}

  EstimatorKind kind() const { return kind_; }
  std::size_t aux_rows() const { return aux_rows_; }
  std::size_t aux_cols() const { return aux_cols_; }
  std::size_t n_params() const { return n_params_; }

  double operator()(std::span<const double> theta, const AuxBlock& u) const {
    if (theta.size() != n_params_ || u.rows() != aux_rows_ || u.cols() != aux_cols_) {
      throw std::invalid_argument("PotentialEvaluator: shape mismatch");
    }
    return phi_(theta, u);
  }

  // IID model with theta = (mu); sigma_v, sigma_e fixed at their base values.
  static PotentialEvaluator iid_mean_only(GaussianIIDModel base, PriorSpec prior,
                                          std::vector<double> y, std::size_t n_samples,
                                          ISScale scale = ISScale::variance_as_printed) {
    if (prior.size() != 1) {
      throw std::invalid_argument("iid_mean_only: prior must have one component");
    }
    const std::size_t T = y.size();
    auto phi = [base, prior = std::move(prior), y = std::move(y), scale](
                   std::span<const double> theta, const AuxBlock& u) -> double {
      if (!prior.in_support(theta)) return kInf;
      GaussianIIDModel m = base;
      m.mu = theta[0];
      const auto est = importance_sampling_loglik(m, y, u, scale);
      if (est.degenerate) return kInf;
      return -(est.log_likelihood + prior.log_density(theta));
    };
    return PotentialEvaluator(EstimatorKind::importance_sampling, T, n_samples, 1,
                              std::move(phi));
  }

  // SV model with theta = (mu, phi, sigma_v, rho).
  static PotentialEvaluator sv_full(SVLeverageModel base, PriorSpec prior,
                                    std::vector<double> y, std::size_t n_particles) {
    if (prior.size() != 4) {
      throw std::invalid_argument("sv_full: prior must have four components");
    }
    const std::size_t T = y.size();
    auto phi = [base, prior = std::move(prior), y = std::move(y)](
                   std::span<const double> theta, const AuxBlock& u) -> double {
      if (!prior.in_support(theta)) return kInf;
      SVLeverageModel m = base;
      m.mu = theta[0];
      m.phi = theta[1];
      m.sigma_v = theta[2];
      m.rho = theta[3];
      if (!m.params_valid()) return kInf;
      const auto est = bootstrap_pf_loglik(m, y, u);
      if (est.degenerate) return kInf;
      return -(est.log_likelihood + prior.log_density(theta));
    };
    return PotentialEvaluator(EstimatorKind::bootstrap_pf, T + 1, n_particles + 1, 4,
                              std::move(phi));
  }

 private:
  EstimatorKind kind_;
  std::size_t aux_rows_;
  std::size_t aux_cols_;
  std::size_t n_params_;
  PhiFn phi_;
};

inline double potential(const PotentialEvaluator& evaluator,
                        std::span<const double> theta, const AuxBlock& u) {
  return evaluator(theta, u);
}

}  // namespace cpmmh
