// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_SELECTION_HPP
#define BAYESROM_SELECTION_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "bayesrom/inference.hpp"
#include "bayesrom/integrate.hpp"
#include "bayesrom/structure.hpp"

namespace bayesrom::selection {

using InputFn = std::function<Eigen::VectorXd(double t)>;

enum class ErrorNorm { Frobenius, MaxAbs };

/// Log-spaced values, `count` points from `lo` to `hi` inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

struct SelectionConfig {
  double phi = 5.0;
  int n_samples = 20;
  double t_final = 0.0;
  std::vector<double> gamma_grid = log_grid(1e-6, 1e4, 25);
  double scalar_opt_tolerance = 1e-3;  // in log10(gamma)
  int max_refine_iterations = 40;
  ErrorNorm error_norm = ErrorNorm::Frobenius;
  std::uint64_t seed = 0;
  /// Two prior values instead of one: the first for constant, linear and
  /// input columns, the second for quadratic and bilinear columns.
  bool blockwise = false;
  dynamics::Rk45Options integrator;

  void validate() const;
};

/// GP state estimates of one trajectory on its estimation grid.
struct TrajectoryTarget {
  Eigen::MatrixXd states;  // r x m'
  Eigen::VectorXd t_est;
  InputFn input;           // empty when the model has no inputs
};

/// The regression for each posterior row plus the trajectories to reproduce.
struct SelectionProblem {
  structure::ReducedModel model;
  std::vector<inference::PreparedRegression> rows;
  std::vector<TrajectoryTarget> targets;

  void validate() const;
};

struct ErrorEvaluation {
  double value = std::numeric_limits<double>::infinity();  // mean over trajectories
  double sum = std::numeric_limits<double>::infinity();    // before dividing by the count
  bool unstable = false;
};

/// Samples n_samples operator matrices (common seeds across calls), integrates
/// every trajectory from its first GP state to t_final and returns +inf if any
/// solution leaves phi * max|states| or fails to integrate. Otherwise the
/// error between the GP states and the sample-mean solution on t_est,
/// averaged over trajectories.
ErrorEvaluation evaluate_error(const SelectionProblem& problem,
                               const std::vector<inference::PriorVariance>& gammas,
                               const SelectionConfig& config);

/// Single trajectory, polynomial ROM.
double opinf_error(const SelectionProblem& problem, const inference::PriorVariance& gamma,
                   const SelectionConfig& config);
/// Several trajectories sharing one operator posterior.
double opinf_error_multi(const SelectionProblem& problem, const inference::PriorVariance& gamma,
                         const SelectionConfig& config);
/// Structured ODE with one shared parameter row.
double opinf_error_odes(const SelectionProblem& problem, const inference::PriorVariance& gamma,
                        const SelectionConfig& config);

/// gamma applied to every row, expanded to `blocks` when two values are given.
std::vector<inference::PriorVariance> expand_gamma(const SelectionProblem& problem,
                                                   const Eigen::VectorXd& values);

struct SelectionResult {
  Eigen::VectorXd values;  // one scalar, or two for the blockwise search
  std::vector<inference::PriorVariance> gammas;
  double error = std::numeric_limits<double>::infinity();
  std::vector<double> grid;
  std::vector<double> grid_errors;
  int evaluations = 0;
};

/// Grid search over scalar gamma, Brent refinement of log10(gamma) between
/// the neighbours of the best grid point, and optionally a two-value
/// Nelder-Mead polish. Throws AllUnstable if no grid point is finite.
SelectionResult select_prior_variance(const SelectionProblem& problem,
                                      const SelectionConfig& config);

}  // namespace bayesrom::selection

#endif  // BAYESROM_SELECTION_HPP
