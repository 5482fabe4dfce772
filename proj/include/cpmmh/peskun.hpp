// State-space-discretisation analysis of the one-dimensional CN chain.
// The target is N(z; sigma_phi, 1), the proposal the zero-centred CN kernel
// N(z'; sqrt(1-sigma_z^2) z, sigma_z^2) and acceptance
// min(1, exp(sigma_phi (z' - z))). The interval (z_min, z_max) is split
// into L equal bins; off-diagonal transition mass is the midpoint-rule
// proposal density times acceptance, the diagonal absorbs the remainder
// (including proposal mass leaking off the grid), and the stationary
// weights are the normalised target densities at the bin centres. The
// asymptotic variance of a test function comes from the fundamental-matrix
// quadratic form.
#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "cpmmh/math.hpp"

namespace cpmmh {

struct ZSpaceModel {
  double sigma_phi = 0.0;  // std of the log-target estimate; 0 is the flat-acceptance limit
  double sigma_z = 1.0;    // CN step length in (0, 1]

  void validate() const {
    if (!(sigma_phi >= 0.0)) throw std::invalid_argument("ZSpaceModel: sigma_phi >= 0");
    if (!(sigma_z > 0.0 && sigma_z <= 1.0)) {
      throw std::invalid_argument("ZSpaceModel: sigma_z must lie in (0,1]");
    }
  }
};

struct GridSpec {
  double z_min = -4.0;
  double z_max = 4.0;
  std::size_t bins = 1000;
};

struct DiscretizedChain {
  std::vector<double> grid;      // bin centres
  Eigen::MatrixXd transition;    // rows sum to 1
  Eigen::VectorXd stationary;    // normalised target weights
};

inline double z_acceptance(double z, double z_prime, double sigma_phi) {
  const double d = sigma_phi * (z_prime - z);
  return d >= 0.0 ? 1.0 : std::exp(d);
}

inline DiscretizedChain build_transition(const ZSpaceModel& model, const GridSpec& spec) {
  model.validate();
  if (spec.bins < 2) throw std::invalid_argument("build_transition: need at least 2 bins");
  if (!(spec.z_min < spec.z_max)) {
    throw std::invalid_argument("build_transition: z_min must be below z_max");
  }
  const auto L = static_cast<Eigen::Index>(spec.bins);
  const double delta = (spec.z_max - spec.z_min) / static_cast<double>(spec.bins);
  const double keep = std::sqrt((1.0 - model.sigma_z) * (1.0 + model.sigma_z));

  DiscretizedChain chain;
  chain.grid.resize(spec.bins);
  for (std::size_t l = 0; l < spec.bins; ++l) {
    chain.grid[l] = spec.z_min + (static_cast<double>(l) + 0.5) * delta;
  }
  const Eigen::Map<const Eigen::ArrayXd> z(chain.grid.data(), L);

  // exp(sigma_phi z) evaluated once; acceptance ratios are pairwise
  // quotients, capped at 1.
  const Eigen::ArrayXd tilt = (model.sigma_phi * z).exp();
  const double qscale = delta / (model.sigma_z * kSqrt2Pi);

  chain.transition.resize(L, L);
  Eigen::ArrayXd row(L);
  for (Eigen::Index l = 0; l < L; ++l) {
    row = (-0.5 * ((z - keep * z(l)) / model.sigma_z).square()).exp() * qscale;
    row *= (tilt / tilt(l)).min(1.0);
    row(l) = 0.0;
    const double rest = row.sum();
    if (rest > 1.0 + 1e-12) {
      throw std::invalid_argument(
          "build_transition: negative diagonal remainder; refine the grid");
    }
    row(l) = 1.0 - rest;
    chain.transition.row(l) = row.matrix();
  }

  Eigen::ArrayXd w = (-0.5 * (z - model.sigma_phi).square()).exp();
  chain.stationary = (w / w.sum()).matrix();
  return chain;
}

// P_jump = sum_l pi_l (1 - p_ll): the stationary probability of leaving the
// current bin, the discretised acceptance-rate proxy.
inline double jump_probability(const DiscretizedChain& chain) {
  return 1.0 - chain.stationary.dot(chain.transition.diagonal());
}

// nu_hat = phi^T (2 B Z - B - B A) phi with B = diag(pi), A the rank-one
// matrix of stationary rows and Z = [I - (P - A)]^{-1} the fundamental
// matrix. Solved with partial-pivoting LU rather than an explicit inverse.
// If rcond_out is given it receives the reciprocal condition estimate.
inline double asymptotic_variance(const DiscretizedChain& chain,
                                  std::span<const double> phi_values,
                                  double* rcond_out = nullptr) {
  const Eigen::Index L = chain.transition.rows();
  if (static_cast<Eigen::Index>(phi_values.size()) != L) {
    throw std::invalid_argument("asymptotic_variance: phi dimension mismatch");
  }
  const Eigen::Map<const Eigen::VectorXd> phi(phi_values.data(), L);
  const Eigen::VectorXd& pi = chain.stationary;

  Eigen::MatrixXd m = -chain.transition;
  m.diagonal().array() += 1.0;
  m.rowwise() += pi.transpose();

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double rcond = lu.rcond();
  if (rcond_out != nullptr) *rcond_out = rcond;
  if (!(rcond > 1e-14)) {
    throw std::runtime_error("asymptotic_variance: system is numerically singular, rcond = " +
                             std::to_string(rcond));
  }
  const Eigen::VectorXd zphi = lu.solve(phi);

  const double mean = pi.dot(phi);
  const double second = pi.dot(phi.cwiseProduct(phi));
  return 2.0 * pi.dot(phi.cwiseProduct(zphi)) - second - mean * mean;
}

struct PeskunScanRow {
  double sigma_phi = 0.0;
  double sigma_z = 0.0;
  double p_jump = 0.0;
  double nu = 0.0;
};

struct PeskunOptimum {
  double sigma_phi = 0.0;
  double opt_sigma_z = 0.0;
  double opt_p_jump = 0.0;
  double opt_nu = 0.0;
};

struct PeskunScanResult {
  std::vector<PeskunScanRow> table;      // long format, sigma_phi major
  std::vector<PeskunOptimum> optima;     // nu-minimising sigma_z per sigma_phi
};

// Full scan with phi(z) = z. The grid for each sigma_phi spans
// (z_min, sigma_phi + z_max_offset). Ties in nu break toward larger sigma_z.
inline PeskunScanResult scan_optimal_sigma_z(std::span<const double> sigma_phi_grid,
                                             std::span<const double> sigma_z_grid,
                                             double z_min = -4.0, double z_max_offset = 4.0,
                                             std::size_t bins = 1000) {
  if (sigma_phi_grid.empty() || sigma_z_grid.empty()) {
    throw std::invalid_argument("scan_optimal_sigma_z: empty grid");
  }
  PeskunScanResult result;
  result.table.reserve(sigma_phi_grid.size() * sigma_z_grid.size());
  for (double sigma_phi : sigma_phi_grid) {
    const GridSpec spec{z_min, sigma_phi + z_max_offset, bins};
    PeskunOptimum best{sigma_phi, 0.0, 0.0, kInf};
    for (double sigma_z : sigma_z_grid) {
      const auto chain = build_transition({sigma_phi, sigma_z}, spec);
      const double pj = jump_probability(chain);
      const double nu = asymptotic_variance(chain, chain.grid);
      result.table.push_back({sigma_phi, sigma_z, pj, nu});
      if (nu <= best.opt_nu) {
        best = {sigma_phi, sigma_z, pj, nu};
      }
    }
    result.optima.push_back(best);
  }
  return result;
}

}  // namespace cpmmh
