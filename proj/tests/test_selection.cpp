// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "bayesrom/error.hpp"
#include "bayesrom/selection.hpp"

using namespace bayesrom;
using namespace bayesrom::selection;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Damped rotation dq/dt = A q sampled exactly, with tight weights so the
// posterior is nearly a point mass at A.
MatrixXd rotation() {
  MatrixXd a(2, 2);
  a << -0.1, 1.0, -1.0, -0.1;
  return a;
}

TrajectoryTarget exact_target(const MatrixXd& a, const VectorXd& q0, int m) {
  TrajectoryTarget t;
  t.t_est = VectorXd::LinSpaced(m, 0.0, 3.0);
  t.states.resize(2, m);
  const Eigen::EigenSolver<MatrixXd> es(a);
  for (int j = 0; j < m; ++j) {
    const Eigen::MatrixXcd e = es.eigenvalues().unaryExpr([&](std::complex<double> l) { return std::exp(l * t.t_est[j]); }).asDiagonal();
    t.states.col(j) = (es.eigenvectors() * e * es.eigenvectors().inverse()).real() * q0;
  }
  return t;
}

SelectionProblem linear_problem(int n_traj, double weight = 1e4) {
  const MatrixXd a = rotation();
  SelectionProblem p;
  p.model.structure = structure::ModelStructure({structure::Term::Linear}, 2);
  std::vector<std::vector<inference::RegressionBundle>> rows(2);
  for (int l = 0; l < n_traj; ++l) {
    const TrajectoryTarget t = exact_target(a, VectorXd::Unit(2, 0) * (1.0 + l), 40);
    const MatrixXd d = structure::build_data_matrix(t.states, MatrixXd(), p.model.structure);
    const MatrixXd z = a * t.states;
    for (int i = 0; i < 2; ++i) {
      inference::RegressionBundle b;
      b.data_matrix = d;
      b.z_tilde = z.row(i).transpose();
      b.w_sqrt_blocks = {weight * MatrixXd::Identity(40, 40)};
      rows[static_cast<std::size_t>(i)].push_back(b);
    }
    p.targets.push_back(t);
  }
  for (auto& r : rows) p.rows.push_back(inference::prepare(inference::stack_trajectories(r)));
  return p;
}

SelectionConfig base_config() {
  SelectionConfig c;
  c.t_final = 3.0;
  c.seed = 11;
  c.n_samples = 8;
  return c;
}

}  // namespace

TEST_CASE("log grid") {
  const auto g = log_grid(1e-2, 1e2, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(1e-2));
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK(g.back() == doctest::Approx(1e2));
}

TEST_CASE("weak prior reproduces an exact linear model") {
  const SelectionProblem p = linear_problem(1);
  const SelectionConfig c = base_config();
  const double small = opinf_error(p, inference::PriorVariance::scalar(1e-8, 2), c);
  CHECK(small < 1e-3);
  // Shrinking the operator to zero leaves a constant solution.
  const double large = opinf_error(p, inference::PriorVariance::scalar(1e6, 2), c);
  CHECK(large > 100.0 * small);
}

TEST_CASE("selected value is at least as good as every grid point") {
  const SelectionProblem p = linear_problem(1);
  SelectionConfig c = base_config();
  c.gamma_grid = log_grid(1e-6, 1e4, 11);
  const SelectionResult r = select_prior_variance(p, c);
  REQUIRE(r.grid_errors.size() == c.gamma_grid.size());
  for (double e : r.grid_errors) CHECK(r.error <= e);
  CHECK(r.values.size() == 1);
  CHECK(r.gammas.size() == 2);
  CHECK(r.evaluations >= static_cast<int>(c.gamma_grid.size()));

  const SelectionResult again = select_prior_variance(p, c);
  CHECK(again.values == r.values);
  CHECK(again.error == r.error);
  CHECK(again.grid_errors == r.grid_errors);
}

TEST_CASE("common random numbers make the error deterministic") {
  const SelectionProblem p = linear_problem(1, 1.0);
  SelectionConfig c = base_config();
  const auto g = inference::PriorVariance::scalar(0.1, 2);
  CHECK(opinf_error(p, g, c) == opinf_error(p, g, c));
  const double a = opinf_error(p, g, c);
  c.seed = 12;
  CHECK(opinf_error(p, g, c) != a);
}

TEST_CASE("trajectory errors are summed then averaged") {
  SelectionProblem one = linear_problem(1, 1.0);
  SelectionProblem two = one;
  two.targets.push_back(two.targets.front());
  const SelectionConfig c = base_config();
  const std::vector<inference::PriorVariance> g(2, inference::PriorVariance::scalar(0.5, 2));
  const ErrorEvaluation e1 = evaluate_error(one, g, c);
  const ErrorEvaluation e2 = evaluate_error(two, g, c);
  CHECK(e2.sum == doctest::Approx(2.0 * e1.sum).epsilon(1e-12));
  CHECK(e2.value == doctest::Approx(e1.value).epsilon(1e-12));
  CHECK(opinf_error_multi(two, g.front(), c) == doctest::Approx(e1.value).epsilon(1e-12));
}

TEST_CASE("growth past the bound is infinite error") {
  SelectionProblem p = linear_problem(1);
  SelectionConfig c = base_config();
  // Reversing time on the data turns the damping into growth.
  for (auto& row : p.rows) row.c0 = -row.c0;
  c.t_final = 60.0;
  c.phi = 1.5;
  const ErrorEvaluation e = evaluate_error(p, {2, inference::PriorVariance::scalar(1e-8, 2)}, c);
  CHECK(e.unstable);
  CHECK(std::isinf(e.value));

  // A looser bound can only admit more samples.
  c.phi = 1e6;
  CHECK_FALSE(evaluate_error(p, {2, inference::PriorVariance::scalar(1e-8, 2)}, c).unstable);
}

TEST_CASE("all unstable grid points is an error") {
  SelectionProblem p = linear_problem(1);
  for (auto& row : p.rows) row.c0 = -row.c0;
  SelectionConfig c = base_config();
  c.t_final = 60.0;
  c.phi = 1.5;
  c.gamma_grid = {1e-8, 1e-7};
  try {
    select_prior_variance(p, c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllUnstable);
  }
}

TEST_CASE("blockwise search") {
  SelectionProblem p = linear_problem(1);
  p.model.structure = structure::ModelStructure({structure::Term::Linear}, 2);
  SelectionConfig c = base_config();
  c.gamma_grid = log_grid(1e-6, 1e4, 6);
  c.blockwise = true;
  const SelectionResult r = select_prior_variance(p, c);
  REQUIRE(r.values.size() == 2);
  CHECK(r.gammas.front().gamma.size() == 2);
  for (double e : r.grid_errors) CHECK(r.error <= e);
}

TEST_CASE("configuration validation") {
  SelectionConfig c = base_config();
  c.phi = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = base_config();
  c.n_samples = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}
