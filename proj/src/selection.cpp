// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/selection.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <boost/math/tools/minima.hpp>

#include "bayesrom/error.hpp"
#include "bayesrom/optimize.hpp"
#include "bayesrom/random.hpp"

namespace bayesrom::selection {

using inference::PriorVariance;

std::vector<double> log_grid(double lo, double hi, int count) {
  require(lo > 0.0 && hi >= lo && count >= 1, ErrorCode::InvalidArgument,
          "log_grid: need 0 < lo <= hi and count >= 1");
  std::vector<double> g(static_cast<std::size_t>(count));
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int k = 0; k < count; ++k) g[static_cast<std::size_t>(k)] = std::pow(10.0, a + (b - a) * k / (count - 1));
  return g;
}

void SelectionConfig::validate() const {
  require(phi > 0.0, ErrorCode::Config, "selection: phi must be > 0");
  require(n_samples >= 1, ErrorCode::Config, "selection: n_samples must be >= 1");
  require(!gamma_grid.empty(), ErrorCode::Config, "selection: empty gamma grid");
  for (double g : gamma_grid)
    require(g > 0.0 && std::isfinite(g), ErrorCode::Config, "selection: grid values must be positive");
  require(std::is_sorted(gamma_grid.begin(), gamma_grid.end()), ErrorCode::Config,
          "selection: gamma grid must be increasing");
  require(scalar_opt_tolerance > 0.0, ErrorCode::Config, "selection: tolerance must be > 0");
}

void SelectionProblem::validate() const {
  require(static_cast<Eigen::Index>(rows.size()) == model.rows(), ErrorCode::DimensionMismatch,
          "selection: one prepared regression per posterior row required");
  for (const auto& r : rows)
    require(r.width == model.width(), ErrorCode::DimensionMismatch,
            "selection: regression width differs from the model");
  require(!targets.empty(), ErrorCode::InvalidArgument, "selection: no trajectories");
  for (const auto& t : targets) {
    require(t.states.rows() == model.state_dim() && t.states.cols() == t.t_est.size(),
            ErrorCode::DimensionMismatch, "selection: target shape differs from the model");
    require(t.t_est.size() >= 2, ErrorCode::InvalidArgument, "selection: target needs >= 2 times");
    if (model.needs_inputs())
      require(static_cast<bool>(t.input), ErrorCode::MissingInputs,
              "selection: model needs an input function");
  }
}

std::vector<PriorVariance> expand_gamma(const SelectionProblem& problem,
                                        const Eigen::VectorXd& values) {
  const Eigen::Index d = problem.model.width();
  PriorVariance g;
  if (values.size() == 1) {
    g = PriorVariance::scalar(values[0], d);
  } else {
    require(values.size() == 2 && !problem.model.is_ode(), ErrorCode::InvalidArgument,
            "expand_gamma: two values need a polynomial model");
    using structure::Term;
    const auto& s = problem.model.structure;
    g.gamma = Eigen::VectorXd::Constant(d, values[0]);
    for (Term t : {Term::Quadratic, Term::Bilinear})
      if (s.has(t)) g.gamma.segment(s.offset(t), s.term_width(t)).setConstant(values[1]);
  }
  return std::vector<PriorVariance>(problem.rows.size(), g);
}

namespace {

double norm_of(const Eigen::MatrixXd& m, ErrorNorm norm) {
  return norm == ErrorNorm::Frobenius ? m.norm() : m.cwiseAbs().maxCoeff();
}

}  // namespace

ErrorEvaluation evaluate_error(const SelectionProblem& problem,
                               const std::vector<PriorVariance>& gammas,
                               const SelectionConfig& config) {
  problem.validate();
  config.validate();
  ErrorEvaluation unstable;
  unstable.unstable = true;

  std::vector<inference::OperatorPosterior> posts;
  std::vector<Eigen::MatrixXd> factors;
  try {
    posts = inference::op_post_all(problem.rows, gammas);
    for (const auto& p : posts) factors.push_back(inference::covariance_factor(p));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularSystem) return unstable;
    throw;
  }

  const std::size_t n_traj = problem.targets.size();
  std::vector<Eigen::MatrixXd> mean(n_traj);
  for (std::size_t l = 0; l < n_traj; ++l)
    mean[l] = Eigen::MatrixXd::Zero(problem.targets[l].states.rows(), problem.targets[l].states.cols());

  const Eigen::VectorXd no_input;
  for (int k = 0; k < config.n_samples; ++k) {
    const Eigen::MatrixXd op = inference::sample_operator_matrix(
        posts, factors, derive_seed(config.seed, static_cast<std::uint64_t>(k)));
    for (std::size_t l = 0; l < n_traj; ++l) {
      const TrajectoryTarget& target = problem.targets[l];
      const double t0 = target.t_est[0];
      const double t1 = std::max(config.t_final, target.t_est[target.t_est.size() - 1]);
      dynamics::Rk45Options opts = config.integrator;
      opts.max_abs_bound = config.phi * target.states.cwiseAbs().maxCoeff();
      const auto& model = problem.model;
      dynamics::RhsFn rhs = [&](double t, const Eigen::VectorXd& q) {
        return model.rhs(op, q, target.input ? target.input(t) : no_input);
      };
      dynamics::IntegrationStats stats;
      try {
        const dynamics::Trajectory traj =
            dynamics::integrate_rk45(rhs, target.states.col(0), t0, t1, target.t_est, opts, &stats);
        if (stats.bound_exceeded || !traj.states.allFinite()) return unstable;
        mean[l] += traj.states;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::StepSizeUnderflow || e.code() == ErrorCode::NonphysicalState)
          return unstable;
        throw;
      }
    }
  }

  ErrorEvaluation out;
  out.sum = 0.0;
  for (std::size_t l = 0; l < n_traj; ++l) {
    mean[l] /= static_cast<double>(config.n_samples);
    out.sum += norm_of(problem.targets[l].states - mean[l], config.error_norm);
  }
  out.value = out.sum / static_cast<double>(n_traj);
  return out;
}

double opinf_error(const SelectionProblem& problem, const PriorVariance& gamma,
                   const SelectionConfig& config) {
  require(problem.targets.size() == 1 && !problem.model.is_ode(), ErrorCode::InvalidArgument,
          "opinf_error: expects one trajectory and a polynomial model");
  return evaluate_error(problem, std::vector<PriorVariance>(problem.rows.size(), gamma), config).value;
}

double opinf_error_multi(const SelectionProblem& problem, const PriorVariance& gamma,
                         const SelectionConfig& config) {
  require(!problem.model.is_ode(), ErrorCode::InvalidArgument,
          "opinf_error_multi: expects a polynomial model");
  return evaluate_error(problem, std::vector<PriorVariance>(problem.rows.size(), gamma), config).value;
}

double opinf_error_odes(const SelectionProblem& problem, const PriorVariance& gamma,
                        const SelectionConfig& config) {
  require(problem.model.is_ode(), ErrorCode::InvalidArgument, "opinf_error_odes: expects an ODE model");
  return evaluate_error(problem, std::vector<PriorVariance>(problem.rows.size(), gamma), config).value;
}

SelectionResult select_prior_variance(const SelectionProblem& problem,
                                      const SelectionConfig& config) {
  problem.validate();
  config.validate();
  SelectionResult result;
  result.grid = config.gamma_grid;

  auto evaluate = [&](const Eigen::VectorXd& values) {
    ++result.evaluations;
    return evaluate_error(problem, expand_gamma(problem, values), config).value;
  };

  // Stage 1: scalar grid.
  std::size_t best = 0;
  for (std::size_t k = 0; k < config.gamma_grid.size(); ++k) {
    const double e = evaluate(Eigen::VectorXd::Constant(1, config.gamma_grid[k]));
    result.grid_errors.push_back(e);
    if (e < result.grid_errors[best]) best = k;
  }
  if (!std::isfinite(result.grid_errors[best]))
    fail(ErrorCode::AllUnstable, "select_prior_variance: every grid candidate is unstable");
  result.values = Eigen::VectorXd::Constant(1, config.gamma_grid[best]);
  result.error = result.grid_errors[best];

  // Stage 2: Brent on log10(gamma) between the neighbouring grid points.
  if (config.gamma_grid.size() >= 2) {
    const std::size_t lo_i = best == 0 ? 0 : best - 1;
    const std::size_t hi_i = std::min(best + 1, config.gamma_grid.size() - 1);
    const double lo = std::log10(config.gamma_grid[lo_i]);
    const double hi = std::log10(config.gamma_grid[hi_i]);
    if (hi > lo) {
      auto objective = [&](double log_gamma) {
        const double e = evaluate(Eigen::VectorXd::Constant(1, std::pow(10.0, log_gamma)));
        return std::isfinite(e) ? e : std::numeric_limits<double>::max();
      };
      const int bits = std::clamp(
          static_cast<int>(std::ceil(-std::log2(config.scalar_opt_tolerance / (hi - lo)))) + 1, 4,
          std::numeric_limits<double>::digits / 2);
      std::uintmax_t iters = static_cast<std::uintmax_t>(config.max_refine_iterations);
      const std::pair<double, double> found =
          boost::math::tools::brent_find_minima(objective, lo, hi, bits, iters);
      if (found.second < result.error) {
        result.error = found.second;
        result.values[0] = std::pow(10.0, found.first);
      }
    }
  }

  // Optional stage 3: two-value polish starting from the scalar optimum.
  if (config.blockwise && !problem.model.is_ode()) {
    const double g0 = std::log10(result.values[0]);
    optimize::Box box;
    const double glo = std::log10(config.gamma_grid.front()) - 2.0;
    const double ghi = std::log10(config.gamma_grid.back()) + 2.0;
    box.lower = Eigen::Vector2d(glo, glo);
    box.upper = Eigen::Vector2d(ghi, ghi);
    optimize::NelderMeadOptions nm;
    nm.max_evaluations = 60;
    nm.f_tolerance = 1e-6 * std::max(1e-300, result.error);
    nm.x_tolerance = config.scalar_opt_tolerance / (ghi - glo);
    nm.initial_step = 0.5 / (ghi - glo);
    auto objective = [&](const Eigen::VectorXd& x) {
      return evaluate(Eigen::Vector2d(std::pow(10.0, x[0]), std::pow(10.0, x[1])));
    };
    const optimize::MinimizeResult res = optimize::nelder_mead(objective, Eigen::Vector2d(g0, g0), box, nm);
    result.values = Eigen::Vector2d::Constant(result.values[0]);
    if (res.value < result.error) {
      result.error = res.value;
      result.values = Eigen::Vector2d(std::pow(10.0, res.x[0]), std::pow(10.0, res.x[1]));
    }
  }

  result.gammas = expand_gamma(problem, result.values);
  return result;
}

}  // namespace bayesrom::selection
