// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <doctest.h>

#include "bayesrom/error.hpp"
#include "bayesrom/gp.hpp"
#include "bayesrom/optimize.hpp"

using namespace bayesrom;
using Eigen::VectorXd;

namespace {

kernels::KernelHyperparams make(double s2, double ell, double chi) {
  kernels::KernelHyperparams hp;
  hp.signal_variance = s2;
  hp.lengthscale = ell;
  hp.noise_variance = chi;
  return hp;
}

}  // namespace

TEST_CASE("marginal likelihood by hand") {
  VectorXd t(1), y(1);
  t << 0.0;
  y << 0.0;
  const double c = 0.5 * std::log(2.0 * std::numbers::pi);
  CHECK(gp::neg_log_marginal_likelihood(make(1.0, 1.0, 0.0), t, y) == doctest::Approx(c).epsilon(1e-12));
  y << 1.0;
  CHECK(gp::neg_log_marginal_likelihood(make(0.6, 1.0, 0.4), t, y) == doctest::Approx(0.5 + c).epsilon(1e-12));

  // Zero data leaves the log determinant and the constant.
  const VectorXd ts = VectorXd::LinSpaced(6, 0.0, 1.0);
  const auto hp = make(1.3, 0.3, 0.1);
  Eigen::MatrixXd k = kernels::gram(ts, ts, hp);
  k.diagonal().array() += hp.noise_variance;
  const double logdet = 2.0 * k.llt().matrixLLT().diagonal().array().log().sum();
  CHECK(gp::neg_log_marginal_likelihood(hp, ts, VectorXd::Zero(6)) ==
        doctest::Approx(0.5 * logdet + 6 * c).epsilon(1e-12));
}

TEST_CASE("estimation grid spans the observations") {
  VectorXd t(4);
  t << 0.5, 0.1, 2.0, 1.0;
  const VectorXd g = gp::estimation_grid(t, 5);
  CHECK(g[0] == 0.1);
  CHECK(g[4] == 2.0);
  CHECK_THROWS_AS(gp::estimation_grid(t, 1), Error);
}

TEST_CASE("noise-free sine is reproduced") {
  const VectorXd t = VectorXd::LinSpaced(50, 0.0, 1.0);
  const VectorXd y = (2.0 * std::numbers::pi * t.array()).sin().matrix();
  const auto hp = gp::fit_hyperparameters(t, y);
  CHECK(hp.noise_variance <= 1e-4 * hp.signal_variance);
  const gp::GPEstimate e = gp::gp_fit_fixed(t, y, t, hp, 1e-8);
  CHECK((e.y_tilde - y).norm() <= 1e-2 * y.norm());
}

TEST_CASE("interpolation with pinned zero noise") {
  const VectorXd t = VectorXd::LinSpaced(12, 0.0, 1.0);
  const VectorXd y = (3.0 * t.array()).cos().matrix() + t;
  const gp::GPEstimate e = gp::gp_fit_fixed(t, y, t, make(1.0, 0.3, 0.0), 1e-8);
  CHECK((e.y_tilde - y).norm() <= 1e-8 * y.norm());
}

TEST_CASE("constant and linear signals") {
  const VectorXd t = VectorXd::LinSpaced(30, 0.0, 1.0);
  const VectorXd te = gp::estimation_grid(t, 120);
  const VectorXd c = VectorXd::Constant(30, 3.5);
  const gp::GPEstimate ec = gp::gp_fit(t, c, te, 1e-8);
  CHECK((ec.y_tilde.array() - 3.5).abs().maxCoeff() <= 1e-3 * 3.5);
  CHECK(ec.z_tilde.cwiseAbs().maxCoeff() <= 1e-3 * 3.5);

  const VectorXd line = (2.0 * t.array() + 1.0).matrix();
  const gp::GPEstimate el = gp::gp_fit(t, line, te, 1e-8);
  for (Eigen::Index k = 0; k < te.size(); ++k)
    if (te[k] > 0.1 && te[k] < 0.9) CHECK(std::abs(el.z_tilde[k] - 2.0) <= 0.05);
}

TEST_CASE("fit is the best of its starts") {
  const VectorXd t = VectorXd::LinSpaced(25, 0.0, 2.0);
  VectorXd y = (t.array() * 2.0).sin().matrix();
  for (Eigen::Index k = 0; k < y.size(); ++k) y[k] += 0.02 * std::sin(37.0 * k);
  gp::FitConfig cfg;
  const auto best = gp::fit_hyperparameters(t, y, cfg);
  const double f_best = gp::neg_log_marginal_likelihood(best, t, y);
  cfg.n_starts = 1;
  const auto single = gp::fit_hyperparameters(t, y, cfg);
  CHECK(f_best <= gp::neg_log_marginal_likelihood(single, t, y) + 1e-12);

  const auto again = gp::fit_hyperparameters(t, y);
  CHECK(again.signal_variance == best.signal_variance);
  CHECK(again.lengthscale == best.lengthscale);
  CHECK(again.noise_variance == best.noise_variance);
}

TEST_CASE("derivative estimates are consistent with the smoothed states") {
  const VectorXd t = VectorXd::LinSpaced(40, 0.0, 3.0);
  const VectorXd y = (t.array()).exp().matrix() * 0.1 + (2.0 * t.array()).sin().matrix();
  const VectorXd te = VectorXd::LinSpaced(400, 0.0, 3.0);
  const gp::GPEstimate e = gp::gp_fit(t, y, te, 1e-8);
  const double h = te[1] - te[0];
  double err = 0.0;
  for (Eigen::Index k = 1; k + 1 < te.size(); ++k)
    err = std::max(err, std::abs((e.y_tilde[k + 1] - e.y_tilde[k - 1]) / (2 * h) - e.z_tilde[k]));
  CHECK(err <= 1e-3 * e.z_tilde.cwiseAbs().maxCoeff());
}

TEST_CASE("weight square root inverts the regularized covariance") {
  const VectorXd t = VectorXd::LinSpaced(15, 0.0, 1.0);
  const VectorXd y = (4.0 * t.array()).sin().matrix();
  const VectorXd te = VectorXd::LinSpaced(20, 0.0, 1.0);
  const auto hp = make(1.0, 0.25, 1e-3);
  const gp::GPEstimate e = gp::gp_fit_fixed(t, y, te, hp, 1e-8);
  CHECK((e.w_sqrt - e.w_sqrt.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * e.w_sqrt.cwiseAbs().maxCoeff());

  const kernels::KernelBlocks b = kernels::assemble_blocks(t, te, hp);
  const Eigen::MatrixXd c = b.zy * b.yy.llt().solve(b.zy.transpose());
  Eigen::MatrixXd reg = b.zz - 0.5 * (c + c.transpose());
  reg.diagonal().array() += e.tau;
  const Eigen::MatrixXd w = e.w_sqrt * e.w_sqrt;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(20, 20);
  CHECK((w * reg - eye).norm() <= 1e-6 * std::sqrt(20.0));
}

TEST_CASE("halton points fill the unit cube deterministically") {
  const VectorXd p = optimize::halton_point(0, 3);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(1.0 / 3.0));
  CHECK(p[2] == doctest::Approx(0.2));
}

TEST_CASE("nelder-mead finds a box-constrained minimum") {
  optimize::Box box;
  box.lower = VectorXd::Constant(2, -2.0);
  box.upper = VectorXd::Constant(2, 2.0);
  auto rosen = [](const VectorXd& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  optimize::NelderMeadOptions opt;
  opt.max_evaluations = 4000;
  const auto r = optimize::nelder_mead(rosen, VectorXd::Constant(2, -1.0), box, opt);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-3));

  // Minimum outside the box lands on the boundary.
  auto shifted = [](const VectorXd& x) { return (x.array() - 5.0).square().sum(); };
  const auto s = optimize::nelder_mead(shifted, VectorXd::Zero(2), box, opt);
  CHECK(s.x[0] == doctest::Approx(2.0).epsilon(1e-6));
}
