// The pseudo-marginal Metropolis-Hastings loop with a joint proposal:
// Gaussian random walk on theta and CN (or CN/global mixture) on the
// auxiliary block. Acceptance uses exp(Phi_old - Phi_new); the auxiliary
// proposal factor cancels against the Gaussian prior by CN reversibility,
// and the mixture inherits the cancellation because both branches leave
// N(0, I) invariant.
//
// Per-iteration stream order (one shared stream per chain): theta-proposal
// Gaussians, the u move-kind coin, the fresh u Gaussians, then the
// acceptance uniform. The order is fixed regardless of outcomes, so a chain
// replays exactly from its seed.
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "cpmmh/aux_block.hpp"
#include "cpmmh/estimators.hpp"
#include "cpmmh/math.hpp"
#include "cpmmh/random.hpp"

namespace cpmmh {

struct ChainState {
  std::vector<double> theta;
  AuxBlock u = AuxBlock(1, 1);
  double phi_value = kInf;
  double log_prior = -kInf;
  std::size_t iteration = 0;
};

struct ThetaProposalConfig {
  Eigen::MatrixXd covariance;  // symmetric positive definite; mean shift is the identity

  Eigen::MatrixXd cholesky_lower() const {
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("ThetaProposalConfig: covariance is not positive definite");
    }
    return llt.matrixL();
  }

  static ThetaProposalConfig isotropic(std::size_t dim, double stddev) {
    ThetaProposalConfig cfg;
    cfg.covariance = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim),
                                               static_cast<Eigen::Index>(dim)) *
                     (stddev * stddev);
    return cfg;
  }
};

// Column-compressed per-iteration history of a run. The auxiliary block is
// not stored (it has (T+1)(N+1) entries); only the decision record is.
class ChainTrace {
 public:
  ChainTrace(std::size_t n_params, std::size_t iterations)
      : n_params_(n_params), theta_(n_params * iterations), phi_(iterations),
        acceptance_prob_(iterations), accepted_(iterations), move_(iterations) {}

  std::size_t size() const { return phi_.size(); }
  std::size_t n_params() const { return n_params_; }

  std::span<const double> theta(std::size_t k) const {
    return {theta_.data() + k * n_params_, n_params_};
  }
  double phi(std::size_t k) const { return phi_[k]; }
  bool accepted(std::size_t k) const { return accepted_[k] != 0; }
  MoveKind move(std::size_t k) const {
    return move_[k] == 0 ? MoveKind::local : MoveKind::global;
  }
  double acceptance_prob(std::size_t k) const { return acceptance_prob_[k]; }

  void record(std::size_t k, std::span<const double> theta, double phi,
              bool accepted, MoveKind move, double acceptance_prob) {
    std::copy(theta.begin(), theta.end(), theta_.begin() + static_cast<std::ptrdiff_t>(k * n_params_));
    phi_[k] = phi;
    accepted_[k] = accepted ? 1 : 0;
    move_[k] = move == MoveKind::global ? 1 : 0;
    acceptance_prob_[k] = acceptance_prob;
  }

  // Scalar series of one parameter from iteration `from` (inclusive).
  std::vector<double> parameter_series(std::size_t param, std::size_t from = 0) const {
    std::vector<double> out;
    out.reserve(size() - from);
    for (std::size_t k = from; k < size(); ++k) out.push_back(theta(k)[param]);
    return out;
  }

  double acceptance_rate(std::size_t from = 0) const {
    if (from >= size()) throw std::invalid_argument("acceptance_rate: empty range");
    double acc = 0.0;
    for (std::size_t k = from; k < size(); ++k) acc += accepted_[k];
    return acc / static_cast<double>(size() - from);
  }

 private:
  std::size_t n_params_;
  std::vector<double> theta_;
  std::vector<double> phi_;
  std::vector<double> acceptance_prob_;
  std::vector<std::uint8_t> accepted_;
  std::vector<std::uint8_t> move_;
};

// min(1, exp(phi_old - phi_new + log_q_ratio)). The q-ratio argument covers
// asymmetric theta proposals; the random walk used here passes 0.
inline double acceptance_probability(double phi_old, double phi_new,
                                     double log_q_ratio = 0.0) {
  if (!std::isfinite(phi_old)) {
    throw std::invalid_argument("acceptance_probability: phi_old must be finite");
  }
  if (phi_new == kInf) return 0.0;
  const double log_ratio = phi_old - phi_new + log_q_ratio;
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

struct PmmhConfig {
  std::size_t iterations = 0;  // K
  std::size_t burn_in = 0;     // K_b, discarded at analysis time only
  std::vector<double> theta0;
  ThetaProposalConfig theta_proposal;
  AuxProposalConfig aux_proposal;
  std::size_t init_retries = 100;  // fresh u draws allowed for a finite Phi_0
};

inline ChainTrace run_pmmh(const PmmhConfig& config, const PotentialEvaluator& evaluator,
                           RandomStream& rng) {
  if (config.iterations == 0) throw std::invalid_argument("run_pmmh: iterations must be > 0");
  if (config.theta0.size() != evaluator.n_params()) {
    throw std::invalid_argument("run_pmmh: theta0 dimension mismatch");
  }
  config.aux_proposal.validate();
  const std::size_t p = config.theta0.size();
  const Eigen::MatrixXd chol = config.theta_proposal.cholesky_lower();
  if (chol.rows() != static_cast<Eigen::Index>(p)) {
    throw std::invalid_argument("run_pmmh: proposal covariance dimension mismatch");
  }

  ChainState state;
  state.theta = config.theta0;
  state.u = sample_prior(evaluator.aux_rows(), evaluator.aux_cols(), rng);
  state.phi_value = evaluator(state.theta, state.u);
  for (std::size_t attempt = 0; !std::isfinite(state.phi_value); ++attempt) {
    if (attempt >= config.init_retries) {
      throw std::runtime_error("run_pmmh: initial potential stayed infinite after retries");
    }
    state.u = sample_prior(evaluator.aux_rows(), evaluator.aux_cols(), rng);
    state.phi_value = evaluator(state.theta, state.u);
  }

  ChainTrace trace(p, config.iterations);
  Eigen::VectorXd step(static_cast<Eigen::Index>(p));
  std::vector<double> theta_prop(p);
  for (std::size_t k = 0; k < config.iterations; ++k) {
    for (Eigen::Index i = 0; i < step.size(); ++i) step(i) = rng.normal();
    const Eigen::VectorXd delta = chol * step;
    for (std::size_t i = 0; i < p; ++i) {
      theta_prop[i] = state.theta[i] + delta(static_cast<Eigen::Index>(i));
    }

    auto [u_prop, move] = propose_mixture(state.u, config.aux_proposal, rng);
    const double phi_prop = evaluator(theta_prop, u_prop);
    const double aprob = acceptance_probability(state.phi_value, phi_prop);
    const bool accept = rng.uniform01() <= aprob;
    if (accept) {
      state.theta = theta_prop;
      state.u = std::move(u_prop);
      state.phi_value = phi_prop;
    }
    state.iteration = k + 1;
    trace.record(k, state.theta, state.phi_value, accept, move, aprob);
  }
  return trace;
}

// Independent replicate chains with seeds derived from one master seed.
// Chains run on up to `workers` threads; results are keyed by replicate
// index, so the output is identical for any worker count.
inline std::vector<ChainTrace> run_replicates(const PmmhConfig& config,
                                              const PotentialEvaluator& evaluator,
                                              std::uint64_t master_seed,
                                              std::size_t n_replicates,
                                              std::size_t workers = 1) {
  if (n_replicates == 0) throw std::invalid_argument("run_replicates: need n >= 1");
  std::vector<ChainTrace> traces;
  traces.reserve(n_replicates);
  for (std::size_t r = 0; r < n_replicates; ++r) {
    traces.emplace_back(config.theta0.size(), config.iterations);
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t r = next.fetch_add(1);
      if (r >= n_replicates) break;
      try {
        RandomStream rng(derive_seed(master_seed, r));
        traces[r] = run_pmmh(config, evaluator, rng);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t n_threads = std::min(std::max<std::size_t>(workers, 1), n_replicates);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return traces;
}

}  // namespace cpmmh
