// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_OPTIMIZE_HPP
#define BAYESROM_OPTIMIZE_HPP

#include <functional>

#include <Eigen/Dense>

namespace bayesrom::optimize {

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
};

struct NelderMeadOptions {
  int max_evaluations = 600;
  double f_tolerance = 1e-9;   // spread of simplex values
  double x_tolerance = 1e-7;   // simplex diameter, in box-relative units
  double initial_step = 0.1;   // fraction of each box width
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead simplex descent restricted to a box by projection.
/// Non-finite objective values are treated as +inf.
MinimizeResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x0, const Box& box,
                           const NelderMeadOptions& options = {});

/// Point `index` (0-based) of the Halton sequence in [0,1)^dim.
Eigen::VectorXd halton_point(int index, int dim);

}  // namespace bayesrom::optimize

#endif  // BAYESROM_OPTIMIZE_HPP
