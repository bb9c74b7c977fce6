// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <doctest.h>

#include "bayesrom/error.hpp"
#include "bayesrom/kernels.hpp"

using namespace bayesrom::kernels;
using doctest::Approx;

namespace {

KernelHyperparams make(double s2, double ell, double chi = 0.0) {
  KernelHyperparams hp;
  hp.signal_variance = s2;
  hp.lengthscale = ell;
  hp.noise_variance = chi;
  return hp;
}

}  // namespace

TEST_CASE("kernel values") {
  CHECK(kernel_eval(0.5, 0.5, make(2.0, 0.1)) == 2.0);
  CHECK(kernel_eval(0.0, 1.0, make(1.0, 1.0)) == Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(kernel_d1(0.3, 0.3, make(1.0, 1.0)) == 0.0);
  CHECK(kernel_d1(1.0, 0.0, make(1.0, 1.0)) == Approx(-std::exp(-0.5)).epsilon(1e-12));
  CHECK(kernel_d1d2(0.7, 0.7, make(4.0, 2.0)) == Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(kernel_d1d2(0.0, 1.0, make(1.0, 1.0))) < 1e-15);
}

TEST_CASE("kernel symmetries on random arguments") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    const auto hp = make(std::exp(u(rng)), std::exp(0.3 * u(rng)));
    const double a = u(rng), b = u(rng);
    CHECK(kernel_eval(a, b, hp) == kernel_eval(b, a, hp));
    CHECK(kernel_d1(a, b, hp) == Approx(-kernel_d1(b, a, hp)).epsilon(1e-14));
    CHECK(kernel_d1d2(a, b, hp) == Approx(kernel_d1d2(b, a, hp)).epsilon(1e-14));
  }
}

TEST_CASE("derivatives agree with finite differences") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const auto hp = make(std::exp(4.0 * u(rng) - 2.0), std::exp(3.0 * u(rng) - 2.0));
    const double a = 4.0 * u(rng) - 2.0, b = 4.0 * u(rng) - 2.0;
    const double h = 1e-6 * hp.lengthscale;
    const double fd1 = (kernel_eval(a + h, b, hp) - kernel_eval(a - h, b, hp)) / (2 * h);
    CHECK(std::abs(kernel_d1(a, b, hp) - fd1) <= 1e-6 * hp.signal_variance / hp.lengthscale);
    const double g = 1e-4 * hp.lengthscale;
    const double fd2 = (kernel_eval(a + g, b + g, hp) - kernel_eval(a + g, b - g, hp) -
                        kernel_eval(a - g, b + g, hp) + kernel_eval(a - g, b - g, hp)) /
                       (4 * g * g);
    CHECK(std::abs(kernel_d1d2(a, b, hp) - fd2) <= 1e-4 * hp.signal_variance / (hp.lengthscale * hp.lengthscale));
  }
}

TEST_CASE("covariance blocks") {
  Eigen::VectorXd t0(1);
  t0 << 0.0;
  const KernelBlocks b = assemble_blocks(t0, t0, make(1.0, 1.0, 0.5));
  CHECK(b.yy(0, 0) == 1.5);
  CHECK(b.zy(0, 0) == 0.0);
  CHECK(b.zz(0, 0) == 1.0);

  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(7, 0.0, 1.3);
  const Eigen::VectorXd te = Eigen::VectorXd::LinSpaced(5, 0.1, 1.0);
  const auto hp = make(2.0, 0.4, 0.0);
  const KernelBlocks pure = assemble_blocks(t, te, hp);
  CHECK((pure.yy - gram(t, t, hp)).cwiseAbs().maxCoeff() == 0.0);
  const KernelBlocks noisy = assemble_blocks(t, te, make(2.0, 0.4, 0.3));
  CHECK((noisy.yy.diagonal().array() - 2.3).abs().maxCoeff() < 1e-15);
  CHECK(noisy.yy.llt().info() == Eigen::Success);

  // Reordering the observation times permutes rows and columns.
  Eigen::VectorXi idx(7);
  idx << 3, 0, 6, 1, 5, 2, 4;
  Eigen::VectorXd tp(7);
  for (int i = 0; i < 7; ++i) tp[i] = t[idx[i]];
  const KernelBlocks perm = assemble_blocks(tp, te, make(2.0, 0.4, 0.3));
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) CHECK(perm.yy(i, j) == noisy.yy(idx[i], idx[j]));
    for (int j = 0; j < 5; ++j) CHECK(perm.zy(j, i) == noisy.zy(j, idx[i]));
  }
}

TEST_CASE("invalid hyperparameters are rejected") {
  Eigen::VectorXd t(2);
  t << 0.0, 1.0;
  CHECK_THROWS_AS(assemble_blocks(t, t, make(-1.0, 1.0)), bayesrom::Error);
  CHECK_THROWS_AS(assemble_blocks(Eigen::VectorXd(), t, make(1.0, 1.0)), bayesrom::Error);
}
