// The two concrete models: IID Gaussian observations with a latent mean
// draw per time step, and a stochastic volatility model with leverage.
// Priors are truncated-normal / normal / gamma components evaluated
// jointly over a parameter vector.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "cpmmh/math.hpp"
#include "cpmmh/random.hpp"

namespace cpmmh {

// ---------------------------------------------------------------------------
// Gaussian IID model: x_t ~ N(mu, sigma_v^2), y_t | x_t ~ N(x_t, sigma_e^2).

struct GaussianIIDModel {
  double mu = 0.0;
  double sigma_v = 1.0;
  double sigma_e = 1.0;

  void validate() const {
    if (!(sigma_v > 0.0) || !(sigma_e > 0.0)) {
      throw std::invalid_argument("GaussianIIDModel: sigma_v, sigma_e must be > 0");
    }
  }
};

inline std::vector<double> simulate_iid(const GaussianIIDModel& m, std::size_t T,
                                        RandomStream& rng) {
  m.validate();
  std::vector<double> y(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double x = m.mu + m.sigma_v * rng.normal();
    y[t] = x + m.sigma_e * rng.normal();
  }
  return y;
}

// Marginal likelihood of the IID model: y_t ~ N(mu, sigma_v^2 + sigma_e^2).
inline double exact_iid_loglik(const GaussianIIDModel& m, std::span<const double> y) {
  const double var = m.sigma_v * m.sigma_v + m.sigma_e * m.sigma_e;
  double ll = 0.0;
  for (double yt : y) ll += log_normal_pdf(yt, m.mu, var);
  return ll;
}

// ---------------------------------------------------------------------------
// Stochastic volatility with leverage.
//
// Joint one-step law given x_t:
//   [x_{t+1}, y_t] ~ N([mu + phi (x_t - mu), 0], [[sv^2, c(x_t)], [c(x_t), e^{x_t}]])
// where the cross term c(x_t) is rho * sv * e^{x_t / 2} when rho is read as
// the innovation correlation (the default; keeps the covariance positive
// definite for all |rho| < 1), or the constant rho when read literally as a
// covariance entry. The initial-state variance divides by (1 - phi^2)^2 as
// printed in the model statement, or by (1 - phi^2) (the stationary AR(1)
// variance) when selected.

enum class SVInitVariance { squared_denominator, stationary };
enum class SVLeverageForm { correlation, covariance };

struct SVLeverageModel {
  double mu = 0.0;
  double phi = 0.0;
  double sigma_v = 1.0;
  double rho = 0.0;
  SVInitVariance init_variance = SVInitVariance::squared_denominator;
  SVLeverageForm leverage = SVLeverageForm::correlation;

  bool params_valid() const {
    if (!(std::fabs(phi) < 1.0) || !(sigma_v > 0.0)) return false;
    if (leverage == SVLeverageForm::correlation) return std::fabs(rho) < 1.0;
    return true;  // covariance form is checked pointwise at evaluation
  }

  double initial_variance() const {
    const double d = 1.0 - phi * phi;
    const double denom = init_variance == SVInitVariance::squared_denominator ? d * d : d;
    return sigma_v * sigma_v / denom;
  }

  double initial_state(double xi) const {
    return mu + std::sqrt(initial_variance()) * xi;
  }

  double transition_mean(double x) const { return mu + phi * (x - mu); }

  // One transition driven by a single N(0,1) variate. With y_prev the
  // propagation conditions on the previous observation, which is where the
  // leverage enters: x_t | x_{t-1}, y_{t-1}. Without it (the first step)
  // the marginal transition N(mu + phi (x - mu), sv^2) is used. Returns NaN
  // when the conditional variance is not positive (non-PD joint).
  double propagate(double x_prev, const double* y_prev, double xi) const {
    double mean = transition_mean(x_prev);
    double var = sigma_v * sigma_v;
    if (y_prev != nullptr) {
      if (leverage == SVLeverageForm::correlation) {
        mean += rho * sigma_v * *y_prev * std::exp(-0.5 * x_prev);
        var *= (1.0 - rho) * (1.0 + rho);
      } else {
        const double inv_obs_var = std::exp(-x_prev);
        mean += rho * inv_obs_var * *y_prev;
        var -= rho * rho * inv_obs_var;
      }
      if (!(var > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    }
    return mean + std::sqrt(var) * xi;
  }

  // log N(y; 0, e^x), evaluated directly in log space.
  double log_obs_density(double y, double x) const {
    return -0.5 * (kLog2Pi + x + y * y * std::exp(-x));
  }
};

struct SVPath {
  std::vector<double> states;        // x_0 .. x_T
  std::vector<double> observations;  // y_1 .. y_T
};

// Draws a path from the joint law above. The first transition uses the
// marginal (no observation precedes it); afterwards each y_t is drawn from
// its conditional given x_t and the next state innovation picks up the
// correlated component of the observation noise.
inline SVPath simulate_sv(const SVLeverageModel& m, std::size_t T, RandomStream& rng) {
  if (!m.params_valid()) {
    throw std::invalid_argument("simulate_sv: invalid model parameters");
  }
  SVPath path;
  path.states.resize(T + 1);
  path.observations.resize(T);
  path.states[0] = m.initial_state(rng.normal());
  if (T == 0) return path;
  path.states[1] = m.propagate(path.states[0], nullptr, rng.normal());
  for (std::size_t t = 1; t <= T; ++t) {
    const double x = path.states[t];
    const double y = std::exp(0.5 * x) * rng.normal();
    path.observations[t - 1] = y;
    if (t < T) {
      const double next = m.propagate(x, &y, rng.normal());
      if (!std::isfinite(next)) {
        throw std::runtime_error("simulate_sv: non-positive-definite joint covariance");
      }
      path.states[t + 1] = next;
    }
  }
  return path;
}

// ---------------------------------------------------------------------------
// Priors.

struct NormalPrior {
  double mean, sd;
  double log_density(double x) const {
    return log_normal_pdf(x, mean, sd * sd);
  }
  bool in_support(double) const { return true; }
};

struct TruncatedNormalPrior {
  double mean, sd, lower, upper;
  bool in_support(double x) const { return x > lower && x < upper; }
  double log_density(double x) const {
    if (!in_support(x)) return -kInf;
    const double mass =
        normal_cdf((upper - mean) / sd) - normal_cdf((lower - mean) / sd);
    return log_normal_pdf(x, mean, sd * sd) - std::log(mass);
  }
};

// Shape a, rate b, so the mean is a / b.
struct GammaPrior {
  double shape, rate;
  bool in_support(double x) const { return x > 0.0; }
  double log_density(double x) const {
    if (!in_support(x)) return -kInf;
    return shape * std::log(rate) - std::lgamma(shape) +
           (shape - 1.0) * std::log(x) - rate * x;
  }
};

using ParamPrior = std::variant<NormalPrior, TruncatedNormalPrior, GammaPrior>;

struct PriorSpec {
  std::vector<ParamPrior> components;

  std::size_t size() const { return components.size(); }

  bool in_support(std::span<const double> theta) const {
    if (theta.size() != components.size()) {
      throw std::invalid_argument("PriorSpec: dimension mismatch");
    }
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const bool ok = std::visit(
          [&](const auto& p) { return p.in_support(theta[i]); }, components[i]);
      if (!ok) return false;
    }
    return true;
  }

  double log_density(std::span<const double> theta) const {
    if (theta.size() != components.size()) {
      throw std::invalid_argument("PriorSpec: dimension mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      total += std::visit(
          [&](const auto& p) { return p.log_density(theta[i]); }, components[i]);
    }
    return total;
  }
};

inline double log_prior(const PriorSpec& spec, std::span<const double> theta) {
  return spec.log_density(theta);
}

}  // namespace cpmmh
