// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_INTEGRATE_HPP
#define BAYESROM_INTEGRATE_HPP

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bayesrom::dynamics {

using RhsFn = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& q)>;

struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd states;  // n_state x n_times
  std::vector<std::string> labels;
};

struct Rk45Options {
  double rtol = 1e-6;
  double atol = 1e-9;
  double first_step = 0.0;  // 0 selects automatically
  double max_step = std::numeric_limits<double>::infinity();
  double fixed_step = 0.0;  // > 0 disables error control
  /// Stop as soon as an accepted state has an entry with |q| above this.
  double max_abs_bound = std::numeric_limits<double>::infinity();
  long max_steps = 1000000;
};

struct ImplicitOptions {
  double step = 1e-3;
  double newton_tol = 1e-10;      // relative to 1 + |q|
  int max_newton_iterations = 12;
  double fd_relative_step = 1e-7;
  double max_abs_bound = std::numeric_limits<double>::infinity();
};

struct IntegrationStats {
  long steps = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
  long jacobian_updates = 0;
  bool bound_exceeded = false;
  double t_reached = 0.0;
};

/// Dormand-Prince 5(4) with FSAL and 4th-order dense output at `output_times`.
/// When the bound trips, columns past the stopping time are NaN and
/// stats->bound_exceeded is set. Throws StepSizeUnderflow.
Trajectory integrate_rk45(const RhsFn& rhs, const Eigen::VectorXd& q0, double t0, double t1,
                          const Eigen::VectorXd& output_times, const Rk45Options& options = {},
                          IntegrationStats* stats = nullptr);

/// Fixed-step trapezoidal rule; each step solves its implicit equation by
/// damped Newton with a finite-difference Jacobian that is reused until
/// convergence slows. Output between steps uses cubic Hermite interpolation.
/// Throws NewtonDivergence.
Trajectory integrate_implicit(const RhsFn& rhs, const Eigen::VectorXd& q0, double t0, double t1,
                              const Eigen::VectorXd& output_times,
                              const ImplicitOptions& options = {},
                              IntegrationStats* stats = nullptr);

}  // namespace bayesrom::dynamics

#endif  // BAYESROM_INTEGRATE_HPP
