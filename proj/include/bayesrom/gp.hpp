// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_GP_HPP
#define BAYESROM_GP_HPP

#include <optional>

#include <Eigen/Dense>

#include "bayesrom/kernels.hpp"

namespace bayesrom::gp {

using kernels::KernelHyperparams;

/// Controls the multi-start marginal-likelihood search.
///
/// The search runs in log space over (sigma^2, ell, chi). Bounds are set
/// relative to the data: `scale` is the mean of y^2 (the prior mean is zero),
///   log sigma^2 in log(scale) + [-12, 12]
///   log ell     in [log(min spacing), log(10 * span)]
///   log chi     in log(scale) + [-16, 4]
/// The first start is a data-driven heuristic; the rest are Halton points in
/// the box, so the result is deterministic.
struct FitConfig {
  int n_starts = 8;
  int max_evaluations_per_start = 400;
  /// Pins chi to this value and searches only (sigma^2, ell).
  std::optional<double> fixed_noise_variance;
  /// Pins chi to this multiple of mean(y^2); used for noise-free data.
  std::optional<double> relative_noise_variance;
};

/// Smoothed states, derivative estimates and weight factor on t_est.
struct GPEstimate {
  Eigen::VectorXd t_est;
  Eigen::VectorXd y_tilde;
  Eigen::VectorXd z_tilde;
  Eigen::MatrixXd w_sqrt;  // (W^zz)^{1/2}, symmetric
  KernelHyperparams hp;
  double tau = 0.0;  // regularization actually applied after escalation
};

/// m' uniformly spaced times spanning [min(t_obs), max(t_obs)].
Eigen::VectorXd estimation_grid(const Eigen::VectorXd& t_obs, Eigen::Index m_est);

/// 1/2 y^T K^-1 y + 1/2 log|K| + m/2 log(2 pi), K = k(t,t) + chi I.
/// Throws SingularSystem if the Cholesky factorization of K fails.
double neg_log_marginal_likelihood(const KernelHyperparams& hp,
                                   const Eigen::VectorXd& t_obs,
                                   const Eigen::VectorXd& y);

KernelHyperparams fit_hyperparameters(const Eigen::VectorXd& t_obs,
                                      const Eigen::VectorXd& y,
                                      const FitConfig& config = {});

/// GP regression with derivative estimation at fixed hyperparameters.
///
/// The regularized matrix K^zz - (C + C^T)/2 + tau I is eigendecomposed; if
/// any eigenvalue is not positive tau is multiplied by 10 (up to 1e-2) before
/// giving up with NonPositiveEigenvalue.
GPEstimate gp_fit_fixed(const Eigen::VectorXd& t_obs, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& t_est, const KernelHyperparams& hp,
                        double tau);

/// Fits hyperparameters first, then calls gp_fit_fixed.
GPEstimate gp_fit(const Eigen::VectorXd& t_obs, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& t_est, double tau,
                  const FitConfig& config = {});

inline constexpr double kMaxTau = 1e-2;

}  // namespace bayesrom::gp

#endif  // BAYESROM_GP_HPP
