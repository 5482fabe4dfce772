// Auxiliary Gaussian block and its proposals. The block holds every
// standard-normal variate consumed by one likelihood evaluation; proposals
// either redraw it from the prior (global move) or apply a Crank-Nicolson
// step (local move), which leaves N(0, I) invariant.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cpmmh/math.hpp"
#include "cpmmh/random.hpp"

namespace cpmmh {

enum class MoveKind { local, global };

// Fixed-shape matrix of N(0,1) variates, row-major so that row t (one time
// step) is contiguous for the estimators.
class AuxBlock {
 public:
  AuxBlock(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("AuxBlock: shape must be at least 1x1");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> flat() const { return values_; }
  std::span<double> flat_mut() { return values_; }

  bool same_shape(const AuxBlock& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

// sigma_u is the CN step length, alpha the probability of a global move.
// sigma_u = 0 is allowed only in a mixture where global moves occur;
// a pure CN proposal with sigma_u = 0 never moves and is rejected.
struct AuxProposalConfig {
  double sigma_u = 1.0;
  double alpha = 0.0;

  void validate() const {
    if (!(sigma_u >= 0.0 && sigma_u <= 1.0)) {
      throw std::invalid_argument("AuxProposalConfig: sigma_u must lie in [0,1]");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
      throw std::invalid_argument("AuxProposalConfig: alpha must lie in [0,1]");
    }
    if (sigma_u == 0.0 && alpha == 0.0) {
      throw std::invalid_argument(
          "AuxProposalConfig: sigma_u = 0 with alpha = 0 freezes the auxiliary "
          "chain; use sigma_u > 0 or alpha > 0");
    }
  }
};

inline AuxBlock sample_prior(std::size_t rows, std::size_t cols, RandomStream& rng) {
  AuxBlock block(rows, cols);
  for (double& v : block.flat_mut()) v = rng.normal();
  return block;
}

// u' = sqrt(1 - sigma_u^2) u + sigma_u xi. sigma_u = 1 reduces to an
// independent redraw; sigma_u = 0 is an error (the proposal never moves).
inline AuxBlock propose_cn(const AuxBlock& u, double sigma_u, RandomStream& rng) {
  if (!(sigma_u > 0.0 && sigma_u <= 1.0)) {
    throw std::invalid_argument("propose_cn: sigma_u must lie in (0,1]");
  }
  // (1-s)(1+s) is exactly 0 at s = 1, so the old state drops out entirely.
  const double keep = std::sqrt((1.0 - sigma_u) * (1.0 + sigma_u));
  AuxBlock out(u.rows(), u.cols());
  auto src = u.flat();
  auto dst = out.flat_mut();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = keep * src[i] + sigma_u * rng.normal();
  }
  return out;
}

// Mixture of a global redraw (probability alpha) and a CN step. Stream
// order is fixed: one move-kind coin, then rows*cols fresh Gaussians,
// consumed identically by both branches. A local step with sigma_u = 0
// keeps u unchanged (the Lee-Holmes style proposal reached with alpha > 0).
inline std::pair<AuxBlock, MoveKind> propose_mixture(const AuxBlock& u,
                                                     const AuxProposalConfig& cfg,
                                                     RandomStream& rng) {
  cfg.validate();
  const bool global = rng.uniform01() < cfg.alpha;
  if (global) {
    return {sample_prior(u.rows(), u.cols(), rng), MoveKind::global};
  }
  const double keep = std::sqrt((1.0 - cfg.sigma_u) * (1.0 + cfg.sigma_u));
  AuxBlock out(u.rows(), u.cols());
  auto src = u.flat();
  auto dst = out.flat_mut();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = keep * src[i] + cfg.sigma_u * rng.normal();
  }
  return {std::move(out), MoveKind::local};
}

// Phi(x), clamped away from the exact endpoints so downstream inverse
// transforms never see 0 or 1.
inline double gaussian_to_uniform(double x) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument("gaussian_to_uniform: input must be finite");
  }
  constexpr double eps = 1e-12;
  const double p = normal_cdf(x);
  return std::min(1.0 - eps, std::max(eps, p));
}

}  // namespace cpmmh
