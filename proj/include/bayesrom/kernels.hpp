// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_KERNELS_HPP
#define BAYESROM_KERNELS_HPP

#include <Eigen/Dense>

namespace bayesrom::kernels {

/// Squared-exponential kernel hyperparameters for one reduced mode.
struct KernelHyperparams {
  double signal_variance = 1.0;  // sigma^2 > 0
  double lengthscale = 1.0;      // ell > 0
  double noise_variance = 0.0;   // chi >= 0

  bool valid() const noexcept;
};

/// The three covariance blocks of the joint (state, derivative) process.
struct KernelBlocks {
  Eigen::MatrixXd yy;  // k(t_obs, t_obs) + chi I          (m x m)
  Eigen::MatrixXd zy;  // d/dt1 k(t_est, t_obs)            (m' x m)
  Eigen::MatrixXd zz;  // d2/dt1dt2 k(t_est, t_est)        (m' x m')
};

// sigma^2 exp(-(t1-t2)^2 / (2 ell^2))
double kernel_eval(double t1, double t2, const KernelHyperparams& hp) noexcept;

// Partial derivative with respect to the first argument.
double kernel_d1(double t1, double t2, const KernelHyperparams& hp) noexcept;

// Mixed second partial derivative.
double kernel_d1d2(double t1, double t2, const KernelHyperparams& hp) noexcept;

/// Gram matrix k(a, b) without the noise term.
Eigen::MatrixXd gram(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                     const KernelHyperparams& hp);

/// Throws InvalidArgument on empty time vectors or invalid hyperparameters.
KernelBlocks assemble_blocks(const Eigen::VectorXd& t_obs,
                             const Eigen::VectorXd& t_est,
                             const KernelHyperparams& hp);

}  // namespace bayesrom::kernels

#endif  // BAYESROM_KERNELS_HPP
