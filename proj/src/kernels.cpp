// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/kernels.hpp"

#include <cmath>

#include "bayesrom/error.hpp"

namespace bayesrom::kernels {

bool KernelHyperparams::valid() const noexcept {
  return std::isfinite(signal_variance) && std::isfinite(lengthscale) &&
         std::isfinite(noise_variance) && signal_variance > 0.0 &&
         lengthscale > 0.0 && noise_variance >= 0.0;
}

double kernel_eval(double t1, double t2, const KernelHyperparams& hp) noexcept {
  const double r = (t1 - t2) / hp.lengthscale;
  return hp.signal_variance * std::exp(-0.5 * r * r);
}

double kernel_d1(double t1, double t2, const KernelHyperparams& hp) noexcept {
  const double l2 = hp.lengthscale * hp.lengthscale;
  const double dt = t1 - t2;
  return -hp.signal_variance * dt / l2 * std::exp(-0.5 * dt * dt / l2);
}

double kernel_d1d2(double t1, double t2, const KernelHyperparams& hp) noexcept {
  const double l2 = hp.lengthscale * hp.lengthscale;
  const double dt2 = (t1 - t2) * (t1 - t2);
  return hp.signal_variance * (1.0 / l2 - dt2 / (l2 * l2)) *
         std::exp(-0.5 * dt2 / l2);
}

Eigen::MatrixXd gram(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                     const KernelHyperparams& hp) {
  Eigen::MatrixXd k(a.size(), b.size());
  for (Eigen::Index j = 0; j < b.size(); ++j)
    for (Eigen::Index i = 0; i < a.size(); ++i) k(i, j) = kernel_eval(a[i], b[j], hp);
  return k;
}

KernelBlocks assemble_blocks(const Eigen::VectorXd& t_obs,
                             const Eigen::VectorXd& t_est,
                             const KernelHyperparams& hp) {
  require(t_obs.size() > 0 && t_est.size() > 0, ErrorCode::InvalidArgument,
          "assemble_blocks: empty time vector");
  require(hp.valid(), ErrorCode::InvalidArgument,
          "assemble_blocks: invalid kernel hyperparameters");
  const Eigen::Index m = t_obs.size();
  const Eigen::Index me = t_est.size();

  KernelBlocks blocks;
  blocks.yy = gram(t_obs, t_obs, hp);
  blocks.yy.diagonal().array() += hp.noise_variance;

  blocks.zy.resize(me, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < me; ++i)
      blocks.zy(i, j) = kernel_d1(t_est[i], t_obs[j], hp);

  blocks.zz.resize(me, me);
  for (Eigen::Index j = 0; j < me; ++j) {
    for (Eigen::Index i = j; i < me; ++i) {
      const double v = kernel_d1d2(t_est[i], t_est[j], hp);
      blocks.zz(i, j) = v;
      blocks.zz(j, i) = v;
    }
  }
  return blocks;
}

}  // namespace bayesrom::kernels
