// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "bayesrom/error.hpp"
#include "bayesrom/integrate.hpp"

using namespace bayesrom;
using namespace bayesrom::dynamics;
using Eigen::VectorXd;

namespace {

const RhsFn decay = [](double, const VectorXd& q) -> VectorXd { return -q; };

const RhsFn oscillator = [](double, const VectorXd& q) -> VectorXd {
  VectorXd d(2);
  d << q[1], -q[0];
  return d;
};

double rk45_fixed_error(double h) {
  Rk45Options o;
  o.fixed_step = h;
  const Trajectory tr = integrate_rk45(decay, VectorXd::Ones(1), 0.0, 1.0, VectorXd::Constant(1, 1.0), o);
  return std::abs(tr.states(0, 0) - std::exp(-1.0));
}

double implicit_error(double h) {
  ImplicitOptions o;
  o.step = h;
  o.newton_tol = 1e-14;
  const Trajectory tr = integrate_implicit(decay, VectorXd::Ones(1), 0.0, 1.0, VectorXd::Constant(1, 1.0), o);
  return std::abs(tr.states(0, 0) - std::exp(-1.0));
}

}  // namespace

TEST_CASE("exponential decay") {
  Rk45Options o;
  o.rtol = 1e-10;
  o.atol = 1e-12;
  const Trajectory tr = integrate_rk45(decay, VectorXd::Ones(1), 0.0, 1.0, VectorXd::LinSpaced(11, 0.0, 1.0), o);
  REQUIRE(tr.states.cols() == 11);
  CHECK(tr.states(0, 0) == 1.0);
  for (Eigen::Index j = 0; j < 11; ++j)
    CHECK(std::abs(tr.states(0, j) - std::exp(-tr.times[j])) <= 1e-9);
}

TEST_CASE("zero right-hand side keeps the state") {
  const RhsFn zero = [](double, const VectorXd& q) -> VectorXd { return VectorXd::Zero(q.size()); };
  const VectorXd q0 = VectorXd::LinSpaced(3, -1.0, 2.0);
  const VectorXd ts = VectorXd::LinSpaced(5, 0.0, 2.0);
  const Trajectory a = integrate_rk45(zero, q0, 0.0, 2.0, ts);
  const Trajectory b = integrate_implicit(zero, q0, 0.0, 2.0, ts);
  for (Eigen::Index j = 0; j < 5; ++j) {
    CHECK(a.states.col(j) == q0);
    CHECK(b.states.col(j) == q0);
  }
}

TEST_CASE("oscillator energy") {
  Rk45Options o;
  o.rtol = 1e-10;
  o.atol = 1e-12;
  VectorXd q0(2);
  q0 << 1.0, 0.0;
  const Trajectory tr = integrate_rk45(oscillator, q0, 0.0, 20.0, VectorXd::LinSpaced(201, 0.0, 20.0), o);
  for (Eigen::Index j = 0; j < tr.states.cols(); ++j) {
    CHECK(std::abs(tr.states.col(j).squaredNorm() - 1.0) <= 1e-7);
    CHECK(std::abs(tr.states(0, j) - std::cos(tr.times[j])) <= 1e-7);
  }
}

TEST_CASE("dense output between steps") {
  Rk45Options o;
  o.rtol = 1e-8;
  o.atol = 1e-10;
  // Few steps but many output points: interpolation carries the accuracy.
  const VectorXd ts = VectorXd::LinSpaced(1001, 0.0, 5.0);
  IntegrationStats stats;
  const Trajectory tr = integrate_rk45(decay, VectorXd::Ones(1), 0.0, 5.0, ts, o, &stats);
  CHECK(stats.steps < 200);
  for (Eigen::Index j = 0; j < ts.size(); ++j) CHECK(std::abs(tr.states(0, j) - std::exp(-ts[j])) <= 1e-7);
}

TEST_CASE("fifth-order convergence") {
  const double e1 = rk45_fixed_error(0.1);
  const double e2 = rk45_fixed_error(0.05);
  CHECK(std::log2(e1 / e2) >= 4.5);
}

TEST_CASE("trapezoidal convergence is second order") {
  const double e1 = implicit_error(1e-2);
  const double e2 = implicit_error(5e-3);
  const double e3 = implicit_error(2.5e-3);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::log2(e2 / e3) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("stiff decay") {
  const RhsFn stiff = [](double t, const VectorXd& q) -> VectorXd {
    return VectorXd::Constant(1, -1000.0 * (q[0] - std::cos(t)));
  };
  const VectorXd ts = VectorXd::LinSpaced(11, 0.0, 1.0);
  ImplicitOptions io;
  io.step = 1e-2;
  IntegrationStats implicit_stats;
  const Trajectory a = integrate_implicit(stiff, VectorXd::Zero(1), 0.0, 1.0, ts, io, &implicit_stats);
  IntegrationStats explicit_stats;
  const Trajectory b = integrate_rk45(stiff, VectorXd::Zero(1), 0.0, 1.0, ts, {}, &explicit_stats);
  CHECK(implicit_stats.steps < explicit_stats.steps);
  CHECK(std::abs(a.states(0, 10) - b.states(0, 10)) <= 1e-3);
  CHECK(std::abs(a.states(0, 10) - std::cos(1.0)) <= 1e-3);
}

TEST_CASE("bound stops the integration") {
  const RhsFn grow = [](double, const VectorXd& q) -> VectorXd { return q; };
  Rk45Options o;
  o.max_abs_bound = 10.0;
  IntegrationStats stats;
  const Trajectory tr = integrate_rk45(grow, VectorXd::Ones(1), 0.0, 5.0, VectorXd::LinSpaced(6, 0.0, 5.0), o, &stats);
  CHECK(stats.bound_exceeded);
  CHECK(stats.t_reached < 5.0);
  CHECK(tr.states(0, 1) == doctest::Approx(std::exp(1.0)).epsilon(1e-4));
  CHECK(std::isnan(tr.states(0, 5)));
}

TEST_CASE("blow-up underflows the step size") {
  const RhsFn blowup = [](double, const VectorXd& q) -> VectorXd { return q.array().square(); };
  try {
    integrate_rk45(blowup, VectorXd::Ones(1), 0.0, 2.0, VectorXd::LinSpaced(3, 0.0, 2.0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepSizeUnderflow);
  }
}
