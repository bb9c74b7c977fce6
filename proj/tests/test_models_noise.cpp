// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <set>

#include <doctest.h>

#include "bayesrom/error.hpp"
#include "bayesrom/integrate.hpp"
#include "bayesrom/models.hpp"
#include "bayesrom/noise.hpp"

using namespace bayesrom;
using namespace bayesrom::dynamics;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd euler_state(const VectorXd& rho, const VectorXd& v, const VectorXd& p) {
  const Eigen::Index n = rho.size();
  VectorXd q(3 * n);
  q.segment(0, n) = rho;
  q.segment(n, n) = rho.cwiseProduct(v);
  q.segment(2 * n, n) = p / (kEulerGamma - 1.0) + 0.5 * rho.cwiseProduct(v).cwiseProduct(v);
  return q;
}

}  // namespace

TEST_CASE("Euler: constant state is steady") {
  const VectorXd q = euler_state(VectorXd::Constant(8, 2.0), VectorXd::Constant(8, 3.0),
                                 VectorXd::Constant(8, 1e5));
  CHECK(euler_fom_rhs(q).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("Euler: density flux on four points") {
  VectorXd rho(4);
  rho << 1.0, 2.0, 4.0, 3.0;
  const double v = 2.0;
  const VectorXd q = euler_state(rho, VectorXd::Constant(4, v), VectorXd::Constant(4, 1.0));
  const double dx = kEulerLength / 4.0;
  VectorXd expected(4);
  for (int j = 0; j < 4; ++j) expected[j] = -v * (rho[j] - rho[(j + 3) % 4]) / dx;
  CHECK((euler_fom_rhs(q).head(4) - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("Euler: nonpositive density") {
  VectorXd q = euler_state(VectorXd::Ones(4), VectorXd::Zero(4), VectorXd::Ones(4));
  q[2] = 0.0;
  CHECK_THROWS_AS(euler_fom_rhs(q), Error);
  CHECK_THROWS_AS(lift_euler(MatrixXd(q)), Error);
}

TEST_CASE("Euler: mass is conserved along integration") {
  const int n = 50;
  const VectorXd q0 = euler_initial_condition(n);
  Rk45Options o;
  o.rtol = 1e-8;
  o.atol = 1e-6;
  const Trajectory tr = integrate_rk45([](double, const VectorXd& q) { return euler_fom_rhs(q); }, q0, 0.0,
                                       0.005, VectorXd::LinSpaced(3, 0.0, 0.005), o);
  const double m0 = tr.states.col(0).head(n).sum();
  CHECK(std::abs(tr.states.col(2).head(n).sum() - m0) <= 1e-6 * m0);
}

TEST_CASE("Euler: lifting") {
  MatrixXd q(3, 1);
  q << 2.0, 4.0, 1e5;
  const MatrixXd l = lift_euler(q);
  CHECK(l(0, 0) == doctest::Approx(2.0));
  CHECK(l(1, 0) == doctest::Approx(39998.4).epsilon(1e-12));
  CHECK(l(2, 0) == doctest::Approx(0.5));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  MatrixXd phys(30, 4);
  for (Eigen::Index j = 0; j < 4; ++j) {
    VectorXd rho(10), v(10), p(10);
    for (int i = 0; i < 10; ++i) {
      rho[i] = 20.0 * u(rng);
      v[i] = 100.0 * (u(rng) - 1.5);
      p[i] = 1e5 * u(rng);
    }
    phys.col(j) = euler_state(rho, v, p);
  }
  const MatrixXd back = unlift_euler(lift_euler(phys));
  CHECK(((back - phys).array() / phys.array().abs().max(1.0)).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("Euler: initial condition") {
  const int n = 90;  // nodes at 0, 2/3 and 4/3
  const VectorXd q0 = euler_initial_condition(n);
  const MatrixXd l = lift_euler(MatrixXd(q0));
  const VectorXd rho = q0.head(n);
  const VectorXd v = l.col(0).head(n);
  CHECK(rho[0] == doctest::Approx(22.0));
  CHECK(rho[30] == doctest::Approx(20.0));
  CHECK(rho[60] == doctest::Approx(24.0));
  CHECK(v[0] == doctest::Approx(95.0));
  CHECK(v[30] == doctest::Approx(105.0));
  CHECK(v[60] == doctest::Approx(100.0));
  CHECK((l.col(0).segment(n, n).array() - 1e5).abs().maxCoeff() <= 1e-6);

  VectorXd knots(3), vals(3);
  knots << 0.0, 2.0 / 3.0, 4.0 / 3.0;
  vals << 22.0, 20.0, 24.0;
  const PeriodicSpline s(knots, vals, 2.0);
  CHECK(s(0.0) == doctest::Approx(s(2.0)));
  CHECK(s.derivative(0.0) == doctest::Approx(s.derivative(2.0 - 1e-14)));
  CHECK(s(0.3) == doctest::Approx(s(2.3)));
}

TEST_CASE("Euler: block scaling") {
  MatrixXd d(4, 2);
  d << 1, -2, 3, 0, 10, 20, -40, 5;
  const BlockScaling s = BlockScaling::max_abs(d, 2);
  CHECK(s.scales[0] == 3.0);
  CHECK(s.scales[1] == 40.0);
  CHECK(s.invert(s.apply(d)) == d);
  CHECK(BlockScaling::identity(2).apply(d) == d);
}

TEST_CASE("Heat: linear profile only feels the reaction") {
  const int n = 5;
  const VectorXd x = heat_grid(n);
  const VectorXd s = x.segment(1, n - 2);
  const VectorXd f = heat_fom_rhs(s, 0.3, n, kHeatMu, 0.0, 0.0);
  for (Eigen::Index i = 0; i < s.size(); ++i) CHECK(f[i] == doctest::Approx(-std::pow(s[i], 3)).epsilon(1e-12));
}

TEST_CASE("Heat: source and initial condition") {
  CHECK(heat_source(0.25, 0.25, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(heat_source(0.25, 0.25, 0.0, 0.0) == 0.0);
  CHECK(heat_input(0.25, 1.0, 2.0)[0] == doctest::Approx(1.0));
  CHECK(heat_initial(0.0) == 0.0);
  CHECK(heat_initial(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  const VectorXd full = heat_with_boundary(VectorXd::Constant(3, 0.5));
  REQUIRE(full.size() == 5);
  CHECK(full[0] == 0.0);
  CHECK(full[4] == 1.0);
}

TEST_CASE("Heat: relaxation toward the steady state") {
  const int n = 41;
  const VectorXd x = heat_grid(n);
  const auto rhs = [n](double t, const VectorXd& s) { return heat_fom_rhs(s, t, n, kHeatMu, 0.0, 0.0); };
  ImplicitOptions o;
  o.step = 1e-2;
  const Trajectory tr = integrate_implicit(rhs, x.segment(1, n - 2), 0.0, 4.0, VectorXd::LinSpaced(5, 0.0, 4.0), o);
  double last = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < 5; ++j) {
    const double residual = rhs(0.0, tr.states.col(j)).norm();
    CHECK(residual < last);
    last = residual;
  }
}

TEST_CASE("Heat: lifting") {
  MatrixXd s(3, 1);
  s << 1, 2, 3;
  MatrixXd expected(6, 1);
  expected << 1, 2, 3, 1, 4, 9;
  CHECK(lift_heat(s) == expected);
  CHECK(lift_heat(MatrixXd::Zero(2, 2)).isZero());
}

TEST_CASE("SEIRD") {
  VectorXd q(5), o(4);
  q << kSeirdInitial[0], kSeirdInitial[1], kSeirdInitial[2], kSeirdInitial[3], kSeirdInitial[4];
  o << kSeirdTruth[0], kSeirdTruth[1], kSeirdTruth[2], kSeirdTruth[3];
  CHECK(seird_rhs(q, o)[0] == doctest::Approx(-2.485e-4).epsilon(1e-12));
  CHECK(seird_rhs(q, o) == seird_structure(q) * o);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    VectorXd r(5);
    for (int i = 0; i < 5; ++i) r[i] = u(rng);
    CHECK(seird_structure(r).colwise().sum().cwiseAbs().maxCoeff() <= 1e-15);
  }
  VectorXd free(5);
  free << 0.7, 0.0, 0.0, 0.2, 0.1;
  CHECK(seird_rhs(free, o).isZero());

  Rk45Options opt;
  const Trajectory tr = integrate_rk45([&o](double, const VectorXd& s) { return seird_rhs(s, o); }, q, 0.0,
                                       120.0, VectorXd::LinSpaced(121, 0.0, 120.0), opt);
  for (Eigen::Index j = 0; j < tr.states.cols(); ++j) CHECK(std::abs(tr.states.col(j).sum() - 1.0) <= 1e-8);
}

TEST_CASE("noise: identity at zero level and protections") {
  const MatrixXd clean = MatrixXd::Random(6, 5).cwiseAbs();
  NoiseSpec spec;
  spec.seed = 4;
  CHECK(add_noise(clean, spec) == clean);

  spec.level = 0.1;
  spec.protect_initial = true;
  spec.protect_boundaries = true;
  for (NoiseKind kind : {NoiseKind::RangeScaledGaussian, NoiseKind::MagnitudeScaledGaussian,
                         NoiseKind::TruncatedNormalMagnitude}) {
    spec.kind = kind;
    const MatrixXd noisy = add_noise(clean, spec, 2);
    CHECK(noisy.col(0) == clean.col(0));
    for (int r : {0, 2, 3, 5}) CHECK(noisy.row(r) == clean.row(r));
    CHECK(noisy.row(1).tail(4) != clean.row(1).tail(4));
    CHECK(add_noise(clean, spec, 2) == noisy);
  }
}

TEST_CASE("noise: range-scaled standard deviation") {
  const int n = 100000;
  MatrixXd clean(2, n);
  for (int j = 0; j < n; ++j) {
    clean(0, j) = (j % 2 == 0) ? 1.0 : 3.0;
    clean(1, j) = 2.0;
  }
  NoiseSpec spec;
  spec.level = 0.05;
  spec.seed = 8;
  const MatrixXd e = add_noise(clean, spec) - clean;
  const double mean = e.mean();
  const double sd = std::sqrt((e.array() - mean).square().sum() / (e.size() - 1));
  CHECK(std::abs(sd - 0.05 * 2.0) <= 0.02 * 0.05 * 2.0);
}

TEST_CASE("noise: magnitude-scaled and truncated kinds") {
  const int n = 100000;
  const MatrixXd clean = MatrixXd::Constant(1, n, 0.5);
  NoiseSpec spec;
  spec.level = 0.1;
  spec.seed = 9;
  spec.kind = NoiseKind::MagnitudeScaledGaussian;
  const MatrixXd e = add_noise(clean, spec) - clean;
  CHECK(std::sqrt(e.squaredNorm() / n) == doctest::Approx(0.05).epsilon(0.02));

  spec.kind = NoiseKind::TruncatedNormalMagnitude;
  spec.level = 3.0;
  const MatrixXd t = add_noise(clean, spec);
  CHECK(t.minCoeff() >= 0.0);
  CHECK(t.maxCoeff() <= 1.0);

  CHECK(noise_kind_from_name(noise_kind_name(NoiseKind::TruncatedNormalMagnitude)) ==
        NoiseKind::TruncatedNormalMagnitude);
  CHECK_THROWS_AS(noise_kind_from_name("pink"), Error);
  spec.level = -1.0;
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("observation times") {
  CHECK(sample_observation_times(2, 3.0, TimeScheme::Uniform, 1) == VectorXd::LinSpaced(2, 0.0, 3.0));
  const VectorXd days = sample_observation_times(121, 120.0, TimeScheme::IntegerDays, 1);
  CHECK(days == VectorXd::LinSpaced(121, 0.0, 120.0));

  const VectorXd u = sample_observation_times(50, 0.1, TimeScheme::Uniform, 2);
  CHECK(u[0] == 0.0);
  CHECK(u[49] == 0.1);
  for (Eigen::Index j = 1; j < u.size(); ++j) CHECK(u[j] > u[j - 1]);
  CHECK(sample_observation_times(50, 0.1, TimeScheme::Uniform, 2) == u);

  const VectorXd s = sample_observation_times(10, 60.0, TimeScheme::IntegerDays, 3);
  CHECK(s[0] == 0.0);
  CHECK(s[9] == 60.0);
  std::set<double> distinct(s.data(), s.data() + s.size());
  CHECK(distinct.size() == 10);
  for (Eigen::Index j = 0; j < s.size(); ++j) CHECK(s[j] == std::round(s[j]));

  CHECK_THROWS_AS(sample_observation_times(10, 5.0, TimeScheme::IntegerDays, 3), Error);
  CHECK_THROWS_AS(sample_observation_times(1, 5.0, TimeScheme::Uniform, 3), Error);
}
