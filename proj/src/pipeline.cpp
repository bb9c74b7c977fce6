// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "bayesrom/error.hpp"
#include "bayesrom/random.hpp"

namespace bayesrom::pipeline {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* version() noexcept { return "1.0.0"; }

std::uint64_t SeedPlan::times(std::uint64_t base, std::size_t trajectory, std::size_t variable) {
  return derive_seed(derive_seed(base, 1), trajectory * 64 + variable);
}
std::uint64_t SeedPlan::noise(std::uint64_t base, std::size_t trajectory) {
  return derive_seed(derive_seed(base, 2), trajectory);
}
std::uint64_t SeedPlan::selection(std::uint64_t base) { return derive_seed(base, 3); }
std::uint64_t SeedPlan::prediction(std::uint64_t base, std::size_t case_index) {
  return derive_seed(derive_seed(base, 4), case_index);
}

// Lorenz-63 with the classical parameters.
MatrixXd synthetic_operator() {
  MatrixXd op = MatrixXd::Zero(3, 10);  // [1, x, y, z, xx, xy, xz, yy, yz, zz]
  op(0, 1) = -10.0;
  op(0, 2) = 10.0;
  op(1, 1) = 28.0;
  op(1, 2) = -1.0;
  op(1, 6) = -1.0;
  op(2, 3) = -8.0 / 3.0;
  op(2, 5) = 1.0;
  return op;
}

VectorXd synthetic_initial() { return Eigen::Vector3d(-8.0, 7.0, 27.0); }

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::string> numbered(const std::string& stem, Index n) {
  std::vector<std::string> out;
  for (Index i = 0; i < n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

std::vector<std::string> state_labels(const ExperimentConfig& config) {
  switch (config.benchmark) {
    case Benchmark::Euler: {
      std::vector<std::string> l;
      for (const char* stem : {"rho_", "rhov_", "rhoe_"}) {
        auto b = numbered(stem, config.n_x);
        l.insert(l.end(), b.begin(), b.end());
      }
      return l;
    }
    case Benchmark::DiffusionReaction: return numbered("q_", config.n_x);
    case Benchmark::Seird: return {"S", "E", "I", "R", "D"};
    case Benchmark::Synthetic: return {"x", "y", "z"};
  }
  return {};
}

std::string pair_name(const Eigen::VectorXd& p) {
  std::ostringstream s;
  s << "a" << p[0] << "_b" << p[1];
  return s.str();
}

dynamics::Trajectory integrate_fom(const ExperimentConfig& config, const Case& c,
                                   const VectorXd& times) {
  require(times.size() >= 1, ErrorCode::InvalidArgument, "simulate: no output times");
  const double t_end = times.maxCoeff();
  dynamics::Rk45Options rk;
  rk.rtol = config.fom_rtol;
  rk.atol = config.fom_atol;
  dynamics::Trajectory out;
  switch (config.benchmark) {
    case Benchmark::Euler: {
      const VectorXd q0 = dynamics::euler_initial_condition(config.n_x);
      dynamics::RhsFn rhs = [](double, const VectorXd& q) { return dynamics::euler_fom_rhs(q); };
      out = dynamics::integrate_rk45(rhs, q0, 0.0, t_end, times, rk);
      break;
    }
    case Benchmark::DiffusionReaction: {
      const int n_x = config.n_x;
      const VectorXd x = dynamics::heat_grid(n_x);
      VectorXd s0(n_x - 2);
      for (int j = 1; j + 1 < n_x; ++j) s0[j - 1] = dynamics::heat_initial(x[j]);
      const double a = c.params[0];
      const double b = c.params[1];
      dynamics::RhsFn rhs = [=](double t, const VectorXd& s) {
        return dynamics::heat_fom_rhs(s, t, n_x, dynamics::kHeatMu, a, b);
      };
      dynamics::ImplicitOptions io;
      io.step = config.fom_step;
      const dynamics::Trajectory interior =
          dynamics::integrate_implicit(rhs, s0, 0.0, t_end, times, io);
      out.times = interior.times;
      out.states.resize(n_x, interior.states.cols());
      for (Index k = 0; k < interior.states.cols(); ++k)
        out.states.col(k) = dynamics::heat_with_boundary(interior.states.col(k));
      break;
    }
    case Benchmark::Seird: {
      VectorXd q0(5), o(4);
      for (int i = 0; i < 5; ++i) q0[i] = dynamics::kSeirdInitial[static_cast<std::size_t>(i)];
      for (int i = 0; i < 4; ++i) o[i] = dynamics::kSeirdTruth[static_cast<std::size_t>(i)];
      dynamics::RhsFn rhs = [o](double, const VectorXd& q) { return dynamics::seird_rhs(q, o); };
      out = dynamics::integrate_rk45(rhs, q0, 0.0, t_end, times, rk);
      break;
    }
    case Benchmark::Synthetic: {
      const MatrixXd op = synthetic_operator();
      const structure::ModelStructure spec = config.model_structure();
      const VectorXd none;
      dynamics::RhsFn rhs = [&](double, const VectorXd& q) {
        return structure::rom_rhs(op, q, none, spec);
      };
      out = dynamics::integrate_rk45(rhs, synthetic_initial(), 0.0, t_end, times, rk);
      break;
    }
  }
  out.labels = state_labels(config);
  return out;
}

}  // namespace

structure::ReducedModel reduced_model(const ExperimentConfig& config) {
  structure::ReducedModel model;
  if (config.benchmark == Benchmark::Seird) {
    model.ode_structure = [](const VectorXd& q, const VectorXd&) {
      return dynamics::seird_structure(q);
    };
    model.ode_state_dim = 5;
    model.ode_param_dim = 4;
  } else {
    model.structure = config.model_structure();
  }
  return model;
}

std::vector<Case> training_cases(const ExperimentConfig& config) {
  std::vector<Case> cases;
  if (config.benchmark == Benchmark::DiffusionReaction) {
    for (const auto& p : config.train_inputs) cases.push_back({"train_" + pair_name(p), p, true});
  } else {
    cases.push_back({"train", VectorXd(), true});
  }
  return cases;
}

std::vector<Case> all_cases(const ExperimentConfig& config) {
  std::vector<Case> cases = training_cases(config);
  if (config.benchmark == Benchmark::DiffusionReaction)
    for (const auto& p : config.test_inputs) cases.push_back({"test_" + pair_name(p), p, false});
  return cases;
}

selection::InputFn input_function(const ExperimentConfig& config, const Case& c) {
  if (config.benchmark != Benchmark::DiffusionReaction) return {};
  const double a = c.params[0];
  const double b = c.params[1];
  return [a, b](double t) -> VectorXd { return dynamics::heat_input(t, a, b); };
}

dynamics::Trajectory reference_solution(const ExperimentConfig& config, const Case& c,
                                        const VectorXd& times) {
  config.validate();
  return integrate_fom(config, c, times);
}

Dataset simulate(const ExperimentConfig& config) {
  config.validate();
  Dataset data;
  data.cases = training_cases(config);
  for (std::size_t l = 0; l < data.cases.size(); ++l) {
    if (config.benchmark == Benchmark::Seird) {
      // Every state has its own set of observation days.
      std::vector<VectorXd> per_state;
      std::vector<double> all;
      for (std::size_t i = 0; i < 5; ++i) {
        per_state.push_back(dynamics::sample_observation_times(
            config.m, config.t_last_obs, config.time_scheme, SeedPlan::times(config.seed, l, i)));
        all.insert(all.end(), per_state.back().data(), per_state.back().data() + per_state.back().size());
      }
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      const VectorXd times = Eigen::Map<const VectorXd>(all.data(), static_cast<Index>(all.size()));
      dynamics::Trajectory traj = integrate_fom(config, data.cases[l], times);
      for (Index i = 0; i < 5; ++i) {
        const VectorXd& mine = per_state[static_cast<std::size_t>(i)];
        for (Index k = 0; k < times.size(); ++k)
          if (!(mine.array() == times[k]).any()) traj.states(i, k) = std::nan("");
      }
      data.trajectories.push_back(std::move(traj));
    } else {
      const VectorXd times = dynamics::sample_observation_times(
          config.m, config.t_last_obs, config.time_scheme, SeedPlan::times(config.seed, l));
      data.trajectories.push_back(integrate_fom(config, data.cases[l], times));
    }
  }
  return data;
}

Dataset add_noise(const ExperimentConfig& config, const Dataset& clean) {
  Dataset out = clean;
  const int blocks = config.benchmark == Benchmark::Euler ? 3 : 1;
  for (std::size_t l = 0; l < out.trajectories.size(); ++l) {
    dynamics::NoiseSpec spec = config.noise;
    spec.seed = SeedPlan::noise(config.seed, l);
    out.trajectories[l].states = dynamics::add_noise(clean.trajectories[l].states, spec, blocks);
  }
  return out;
}

MatrixXd StateTransform::forward(const MatrixXd& observed) const {
  switch (benchmark) {
    case Benchmark::Euler: return scaling.apply(dynamics::lift_euler(observed));
    case Benchmark::DiffusionReaction: return dynamics::lift_heat(observed);
    default: return observed;
  }
}

namespace {

template <typename F>
auto staged(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    rethrow_tagged(e, stage);
  }
}

// Noise variance relative to mean(y^2) when the data carry no noise.
constexpr double kNoiseFreeNugget = 1e-12;

gp::FitConfig gp_config(const ExperimentConfig& config) {
  gp::FitConfig g;
  g.n_starts = config.gp_starts;
  g.max_evaluations_per_start = config.gp_max_evaluations;
  if (config.noise.level == 0.0) g.relative_noise_variance = kNoiseFreeNugget;
  return g;
}

FitResult fit_rom(const ExperimentConfig& config, const Dataset& observed,
                  const std::optional<VectorXd>& gamma_values) {
  FitResult fit;
  fit.model = reduced_model(config);
  fit.cases = observed.cases;
  fit.transform.benchmark = config.benchmark;
  const std::size_t n_traj = observed.trajectories.size();
  const structure::ModelStructure& spec = fit.model.structure;

  std::vector<MatrixXd> snapshots(n_traj);
  staged("transform", [&] {
    for (std::size_t l = 0; l < n_traj; ++l)
      require(observed.trajectories[l].states.allFinite(), ErrorCode::InvalidArgument,
              "trajectory " + std::to_string(l) + " has missing entries");
    if (config.benchmark == Benchmark::Euler) {
      std::vector<MatrixXd> lifted;
      Index cols = 0;
      for (const auto& t : observed.trajectories) {
        lifted.push_back(dynamics::lift_euler(t.states));
        cols += lifted.back().cols();
      }
      MatrixXd all(lifted.front().rows(), cols);
      Index off = 0;
      for (const auto& q : lifted) {
        all.middleCols(off, q.cols()) = q;
        off += q.cols();
      }
      fit.transform.scaling = dynamics::BlockScaling::max_abs(all, 3);
    }
    for (std::size_t l = 0; l < n_traj; ++l)
      snapshots[l] = fit.transform.forward(observed.trajectories[l].states);
    return 0;
  });

  fit.basis = staged("basis", [&] {
    if (config.benchmark == Benchmark::Synthetic) return reduction::identity_basis(snapshots.front().rows());
    return reduction::pod_basis(snapshots, config.r);
  });
  const Index r = fit.basis.r;

  const auto t_gp = std::chrono::steady_clock::now();
  const Index m_est = config.estimation_points();
  const gp::FitConfig gcfg = gp_config(config);
  std::vector<std::vector<inference::RegressionBundle>> per_row(static_cast<std::size_t>(r));
  for (std::size_t l = 0; l < n_traj; ++l) {
    const VectorXd& t_obs = observed.trajectories[l].times;
    const MatrixXd y = reduction::compress(fit.basis, snapshots[l]);
    const VectorXd t_est = gp::estimation_grid(t_obs, m_est);
    std::vector<gp::GPEstimate> modes;
    for (Index i = 0; i < r; ++i) {
      modes.push_back(staged("gp fit (trajectory " + std::to_string(l) + ", mode " + std::to_string(i) + ")",
                             [&] { return gp::gp_fit(t_obs, y.row(i).transpose(), t_est, config.tau, gcfg); }));
    }
    selection::TrajectoryTarget target;
    target.t_est = t_est;
    target.states.resize(r, m_est);
    for (Index i = 0; i < r; ++i) target.states.row(i) = modes[static_cast<std::size_t>(i)].y_tilde.transpose();
    target.input = input_function(config, observed.cases[l]);
    MatrixXd inputs;
    if (spec.needs_inputs()) {
      inputs.resize(spec.p(), m_est);
      for (Index j = 0; j < m_est; ++j) inputs.col(j) = target.input(t_est[j]);
    }
    const MatrixXd d = staged("data matrix", [&] { return structure::build_data_matrix(target.states, inputs, spec); });
    for (Index i = 0; i < r; ++i) {
      inference::RegressionBundle b;
      b.data_matrix = d;
      b.z_tilde = modes[static_cast<std::size_t>(i)].z_tilde;
      b.w_sqrt_blocks = {modes[static_cast<std::size_t>(i)].w_sqrt};
      per_row[static_cast<std::size_t>(i)].push_back(std::move(b));
    }
    fit.gp.push_back(std::move(modes));
    fit.targets.push_back(std::move(target));
  }
  fit.seconds_gp = seconds_since(t_gp);

  selection::SelectionProblem problem;
  problem.model = fit.model;
  problem.targets = fit.targets;
  staged("regression", [&] {
    for (auto& rows : per_row) problem.rows.push_back(inference::prepare(inference::stack_trajectories(rows)));
    return 0;
  });

  const auto t_sel = std::chrono::steady_clock::now();
  if (gamma_values) {
    fit.selection.values = *gamma_values;
    fit.selection.gammas = selection::expand_gamma(problem, *gamma_values);
  } else {
    fit.selection = staged("prior selection", [&] {
      return selection::select_prior_variance(problem, config.selection_config());
    });
  }
  fit.seconds_selection = seconds_since(t_sel);
  fit.posteriors = staged("posterior", [&] { return inference::op_post_all(problem.rows, fit.selection.gammas); });
  return fit;
}

FitResult fit_ode(const ExperimentConfig& config, const Dataset& observed,
                  const std::optional<VectorXd>& gamma_values) {
  require(observed.trajectories.size() == 1, ErrorCode::InvalidArgument,
          "parameter estimation expects a single trajectory");
  FitResult fit;
  fit.model = reduced_model(config);
  fit.cases = observed.cases;
  fit.transform.benchmark = config.benchmark;
  const dynamics::Trajectory& traj = observed.trajectories.front();
  const Index r = traj.states.rows();
  require(r == fit.model.ode_state_dim, ErrorCode::DimensionMismatch,
          "parameter estimation: state count differs from the model");
  fit.basis = reduction::identity_basis(r);

  // Shared estimation grid over the union of observation times.
  const auto t_gp = std::chrono::steady_clock::now();
  const Index m_est = config.estimation_points();
  const VectorXd t_est = gp::estimation_grid(traj.times, m_est);
  const gp::FitConfig gcfg = gp_config(config);
  std::vector<gp::GPEstimate> modes;
  for (Index i = 0; i < r; ++i) {
    std::vector<double> ts, ys;
    for (Index k = 0; k < traj.times.size(); ++k)
      if (std::isfinite(traj.states(i, k))) {
        ts.push_back(traj.times[k]);
        ys.push_back(traj.states(i, k));
      }
    const VectorXd t_obs = Eigen::Map<const VectorXd>(ts.data(), static_cast<Index>(ts.size()));
    const VectorXd y = Eigen::Map<const VectorXd>(ys.data(), static_cast<Index>(ys.size()));
    modes.push_back(staged("gp fit (state " + std::to_string(i) + ")",
                           [&] { return gp::gp_fit(t_obs, y, t_est, config.tau, gcfg); }));
  }
  selection::TrajectoryTarget target;
  target.t_est = t_est;
  target.states.resize(r, m_est);
  for (Index i = 0; i < r; ++i) target.states.row(i) = modes[static_cast<std::size_t>(i)].y_tilde.transpose();

  const Index d = fit.model.ode_param_dim;
  MatrixXd rows(r * m_est, d);
  const VectorXd none;
  for (Index j = 0; j < m_est; ++j) {
    const MatrixXd s = fit.model.ode_structure(target.states.col(j), none);
    for (Index i = 0; i < r; ++i) rows.row(i * m_est + j) = s.row(i);
  }
  std::vector<inference::ModeEstimate> per_mode;
  for (const auto& g : modes) per_mode.push_back({g.z_tilde, g.w_sqrt});
  fit.gp.push_back(std::move(modes));
  fit.targets.push_back(target);
  fit.seconds_gp = seconds_since(t_gp);

  selection::SelectionProblem problem;
  problem.model = fit.model;
  problem.targets = fit.targets;
  problem.rows.push_back(staged("regression", [&] {
    return inference::prepare(inference::stack_modes_for_ode(per_mode, rows));
  }));

  const auto t_sel = std::chrono::steady_clock::now();
  if (gamma_values) {
    fit.selection.values = *gamma_values;
    fit.selection.gammas = selection::expand_gamma(problem, *gamma_values);
  } else {
    fit.selection = staged("prior selection", [&] {
      return selection::select_prior_variance(problem, config.selection_config());
    });
  }
  fit.seconds_selection = seconds_since(t_sel);
  fit.posteriors = staged("posterior", [&] { return inference::op_post_all(problem.rows, fit.selection.gammas); });
  return fit;
}

FitResult fit_impl(const ExperimentConfig& config, const Dataset& observed,
                   const std::optional<VectorXd>& gamma_values) {
  config.validate();
  require(!observed.trajectories.empty() && observed.trajectories.size() == observed.cases.size(),
          ErrorCode::InvalidArgument, "fit: need one case per observed trajectory");
  const Index n = observed.trajectories.front().states.rows();
  for (const auto& t : observed.trajectories)
    require(t.states.rows() == n && t.states.cols() == t.times.size(), ErrorCode::DimensionMismatch,
            "fit: trajectories differ in state dimension or are malformed");
  if (config.benchmark == Benchmark::Seird) return fit_ode(config, observed, gamma_values);
  return fit_rom(config, observed, gamma_values);
}

}  // namespace

FitResult fit(const ExperimentConfig& config, const Dataset& observed) {
  return fit_impl(config, observed, std::nullopt);
}

FitResult fit_with_prior(const ExperimentConfig& config, const Dataset& observed,
                         const VectorXd& gamma_values) {
  return fit_impl(config, observed, gamma_values);
}

double quantile(std::vector<double> values, double prob) {
  require(!values.empty(), ErrorCode::InvalidArgument, "quantile: no values");
  require(prob >= 0.0 && prob <= 1.0, ErrorCode::InvalidArgument, "quantile: prob outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

PredictionSummary predict(const std::vector<inference::OperatorPosterior>& posteriors,
                          const structure::ReducedModel& model, const VectorXd& q0,
                          const selection::InputFn& input, const VectorXd& t_grid, int n_samples,
                          std::uint64_t seed, const dynamics::Rk45Options& integrator,
                          const OutputMap& output, bool retain_samples) {
  require(n_samples >= 2, ErrorCode::InvalidArgument, "predict: need at least 2 samples");
  require(t_grid.size() >= 1, ErrorCode::InvalidArgument, "predict: empty time grid");
  require(q0.size() == model.state_dim(), ErrorCode::DimensionMismatch,
          "predict: initial state size differs from the model");
  require(static_cast<Index>(posteriors.size()) == model.rows(), ErrorCode::DimensionMismatch,
          "predict: posterior row count differs from the model");
  if (model.needs_inputs())
    require(static_cast<bool>(input), ErrorCode::MissingInputs, "predict: model needs an input function");

  std::vector<MatrixXd> factors;
  for (const auto& p : posteriors) factors.push_back(inference::covariance_factor(p));

  // Sample k depends only on derive_seed(seed, k), so the workers may finish
  // in any order without changing the result.
  const VectorXd none;
  std::vector<std::optional<MatrixXd>> results(static_cast<std::size_t>(n_samples));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_samples));
  auto run_sample = [&](int k) {
    const MatrixXd op = inference::sample_operator_matrix(posteriors, factors,
                                                         derive_seed(seed, static_cast<std::uint64_t>(k)));
    dynamics::RhsFn rhs = [&](double t, const VectorXd& q) {
      return model.rhs(op, q, input ? input(t) : none);
    };
    try {
      dynamics::Trajectory traj =
          dynamics::integrate_rk45(rhs, q0, t_grid[0], t_grid[t_grid.size() - 1], t_grid, integrator);
      MatrixXd values = output ? output(traj.states) : traj.states;
      if (values.allFinite()) results[static_cast<std::size_t>(k)] = std::move(values);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StepSizeUnderflow && e.code() != ErrorCode::NonphysicalState)
        errors[static_cast<std::size_t>(k)] = std::current_exception();
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  };
  const int workers = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, n_samples);
  if (workers == 1) {
    for (int k = 0; k < n_samples; ++k) run_sample(k);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int k = next++; k < n_samples; k = next++) run_sample(k);
      });
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  PredictionSummary summary;
  summary.times = t_grid;
  std::vector<MatrixXd> kept;
  for (auto& r : results) {
    if (r)
      kept.push_back(std::move(*r));
    else
      ++summary.n_failed;
  }
  summary.n_samples = static_cast<int>(kept.size());
  if (2 * summary.n_failed > n_samples) {
    std::ostringstream msg;
    msg << "predict: " << summary.n_failed << " of " << n_samples << " samples failed to integrate";
    fail(ErrorCode::PredictionFailed, msg.str());
  }

  const Index nv = kept.front().rows();
  const Index nt = kept.front().cols();
  summary.mean.resize(nv, nt);
  summary.q025.resize(nv, nt);
  summary.q975.resize(nv, nt);
  std::vector<double> column(kept.size());
  for (Index i = 0; i < nv; ++i) {
    for (Index j = 0; j < nt; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < kept.size(); ++k) {
        column[k] = kept[k](i, j);
        sum += column[k];
      }
      // Rounding in the sum can push the mean an ulp outside the samples.
      const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
      summary.mean(i, j) = std::clamp(sum / static_cast<double>(kept.size()), *lo, *hi);
      summary.q025(i, j) = quantile(column, 0.025);
      summary.q975(i, j) = quantile(column, 0.975);
    }
  }
  if (retain_samples) summary.samples = std::move(kept);
  return summary;
}

VectorXd prediction_grid(const ExperimentConfig& config) {
  return VectorXd::LinSpaced(config.prediction_times, 0.0, config.t_final);
}

VectorXd initial_state(const ExperimentConfig& config, const FitResult& fit, const Case& c) {
  for (std::size_t l = 0; l < fit.cases.size(); ++l)
    if (fit.cases[l].name == c.name && c.training) return fit.targets[l].states.col(0);
  require(config.benchmark == Benchmark::DiffusionReaction, ErrorCode::InvalidArgument,
          "initial_state: held-out cases exist only for the diffusion-reaction benchmark");
  const VectorXd x = dynamics::heat_grid(config.n_x);
  MatrixXd q0(config.n_x, 1);
  for (int j = 0; j < config.n_x; ++j) q0(j, 0) = dynamics::heat_initial(x[j]);
  q0(0, 0) = 0.0;
  q0(config.n_x - 1, 0) = 1.0;
  return reduction::compress(fit.basis, fit.transform.forward(q0)).col(0);
}

ProbeMap probe_map(const ExperimentConfig& config, const FitResult& fit) {
  ProbeMap pm;
  std::vector<Index> rows;
  std::vector<Index> ref_rows;
  if (config.benchmark == Benchmark::Euler) {
    const int n = config.n_x;
    const char* names[3] = {"v", "p", "zeta"};
    for (int b = 0; b < 3; ++b)
      for (double x : {0.0, 0.5, 1.0, 1.5}) {
        const Index j = static_cast<Index>(std::lround(x * n / dynamics::kEulerLength)) % n;
        rows.push_back(b * n + j);
        std::ostringstream label;
        label << names[b] << "@x=" << x;
        pm.labels.push_back(label.str());
      }
    const dynamics::BlockScaling scaling = fit.transform.scaling;
    const reduction::ReducedBasis basis = fit.basis;
    pm.map = [basis, scaling, rows](const MatrixXd& reduced) {
      const MatrixXd full = scaling.invert(reduction::reconstruct(basis, reduced));
      MatrixXd out(static_cast<Index>(rows.size()), full.cols());
      for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = full.row(rows[k]);
      return out;
    };
    pm.from_reference = [rows](const dynamics::Trajectory& ref) {
      const MatrixXd lifted = dynamics::lift_euler(ref.states);
      MatrixXd out(static_cast<Index>(rows.size()), lifted.cols());
      for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = lifted.row(rows[k]);
      return out;
    };
  } else if (config.benchmark == Benchmark::DiffusionReaction) {
    for (double x : {0.25, 0.5, 0.75}) {
      rows.push_back(static_cast<Index>(std::lround(x * (config.n_x - 1))));
      std::ostringstream label;
      label << "q@x=" << x;
      pm.labels.push_back(label.str());
    }
    const reduction::ReducedBasis basis = fit.basis;
    pm.map = [basis, rows](const MatrixXd& reduced) {
      const MatrixXd full = reduction::reconstruct(basis, reduced);
      MatrixXd out(static_cast<Index>(rows.size()), full.cols());
      for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = full.row(rows[k]);
      return out;
    };
    pm.from_reference = [rows](const dynamics::Trajectory& ref) {
      MatrixXd out(static_cast<Index>(rows.size()), ref.states.cols());
      for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = ref.states.row(rows[k]);
      return out;
    };
  }
  return pm;
}

PredictionSummary predict_case(const ExperimentConfig& config, const FitResult& fit,
                               std::size_t case_index, const Case& c, const OutputMap& output) {
  dynamics::Rk45Options rk;
  rk.rtol = config.rom_rtol;
  rk.atol = config.rom_atol;
  return predict(fit.posteriors, fit.model, initial_state(config, fit, c), input_function(config, c),
                 prediction_grid(config), config.prediction_samples,
                 SeedPlan::prediction(config.seed, case_index), rk, output, config.retain_samples);
}

std::vector<CasePrediction> predict_all(const ExperimentConfig& config, const FitResult& fit) {
  const ProbeMap probes = probe_map(config, fit);
  const Index r = fit.model.state_dim();
  std::vector<std::string> reduced_labels;
  if (config.benchmark == Benchmark::Seird || config.benchmark == Benchmark::Synthetic)
    reduced_labels = state_labels(config);
  else
    reduced_labels = numbered("qhat_", r);

  OutputMap combined;
  if (probes.map) {
    combined = [&probes, r](const MatrixXd& reduced) {
      const MatrixXd p = probes.map(reduced);
      MatrixXd out(r + p.rows(), reduced.cols());
      out.topRows(r) = reduced;
      out.bottomRows(p.rows()) = p;
      return out;
    };
  }

  auto split = [](const PredictionSummary& s, Index first, Index count) {
    PredictionSummary out;
    out.times = s.times;
    out.mean = s.mean.middleRows(first, count);
    out.q025 = s.q025.middleRows(first, count);
    out.q975 = s.q975.middleRows(first, count);
    for (const auto& m : s.samples) out.samples.push_back(m.middleRows(first, count));
    out.n_samples = s.n_samples;
    out.n_failed = s.n_failed;
    return out;
  };

  std::vector<CasePrediction> out;
  const std::vector<Case> cases = all_cases(config);
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const PredictionSummary s = staged("prediction (" + cases[k].name + ")",
                                       [&] { return predict_case(config, fit, k, cases[k], combined); });
    CasePrediction cp;
    cp.c = cases[k];
    cp.reduced = split(s, 0, r);
    cp.reduced.labels = reduced_labels;
    if (probes.map) {
      cp.probes = split(s, r, static_cast<Index>(probes.labels.size()));
      cp.probes.labels = probes.labels;
    }
    out.push_back(std::move(cp));
  }
  return out;
}

}  // namespace bayesrom::pipeline
