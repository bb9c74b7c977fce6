// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_PIPELINE_HPP
#define BAYESROM_PIPELINE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bayesrom/gp.hpp"
#include "bayesrom/inference.hpp"
#include "bayesrom/integrate.hpp"
#include "bayesrom/models.hpp"
#include "bayesrom/noise.hpp"
#include "bayesrom/reduction.hpp"
#include "bayesrom/selection.hpp"
#include "bayesrom/structure.hpp"

namespace bayesrom::pipeline {

enum class Benchmark { Euler, DiffusionReaction, Seird, Synthetic };

const char* benchmark_name(Benchmark b) noexcept;
Benchmark benchmark_from_name(const std::string& name);

struct ExperimentConfig {
  std::string name = "custom";
  Benchmark benchmark = Benchmark::Synthetic;
  std::vector<structure::Term> terms;
  int r = 3;
  int m = 200;
  int m_est = 0;  // 0 means 4 m
  double t_last_obs = 1.0;
  double t_final = 1.0;
  int n_x = 100;
  std::uint64_t seed = 1;

  dynamics::NoiseSpec noise;  // the seed field is derived from `seed`
  dynamics::TimeScheme time_scheme = dynamics::TimeScheme::Uniform;

  // Gaussian processes
  double tau = 1e-8;
  int gp_starts = 8;
  int gp_max_evaluations = 300;

  // Prior-variance selection
  double phi = 5.0;
  int selection_samples = 20;
  double gamma_min = 1e-6;
  double gamma_max = 1e4;
  int gamma_count = 25;
  double selection_tolerance = 1e-3;
  selection::ErrorNorm error_norm = selection::ErrorNorm::Frobenius;
  bool blockwise = false;

  // Reduced-model integration (selection and prediction)
  double rom_rtol = 1e-6;
  double rom_atol = 1e-9;

  // Full-order simulation
  double fom_rtol = 1e-8;
  double fom_atol = 1e-8;
  double fom_step = 1e-3;  // implicit step for the diffusion-reaction model

  // Diffusion-reaction input pairs (a, b)
  std::vector<Eigen::Vector2d> train_inputs;
  std::vector<Eigen::Vector2d> test_inputs;

  // Prediction
  int prediction_samples = 500;
  int prediction_times = 301;
  bool retain_samples = false;

  int estimation_points() const { return m_est > 0 ? m_est : 4 * m; }
  void validate() const;
  structure::ModelStructure model_structure() const;
  selection::SelectionConfig selection_config() const;

  /// euler-noisy, euler-sparse, heat-multi, seird-noisy, seird-sparse, synthetic.
  static ExperimentConfig builtin(const std::string& name);
  static std::vector<std::string> builtin_names();
  /// Schema 1 JSON; unknown fields are rejected with ErrorCode::Config.
  static ExperimentConfig from_json(const std::string& text);
  std::string to_json() const;
};

/// Seeds for the independent random streams of one experiment.
struct SeedPlan {
  static std::uint64_t times(std::uint64_t base, std::size_t trajectory, std::size_t variable = 0);
  static std::uint64_t noise(std::uint64_t base, std::size_t trajectory);
  static std::uint64_t selection(std::uint64_t base);
  static std::uint64_t prediction(std::uint64_t base, std::size_t case_index);
};

/// One trajectory of the experiment: which inputs drive it and whether it is
/// used for training.
struct Case {
  std::string name;
  Eigen::VectorXd params;  // (a, b) for the diffusion-reaction model, else empty
  bool training = true;
};

/// Observed variables before any lifting. Unobserved entries are NaN.
struct Dataset {
  std::vector<dynamics::Trajectory> trajectories;
  std::vector<Case> cases;
};

std::vector<Case> training_cases(const ExperimentConfig& config);
std::vector<Case> all_cases(const ExperimentConfig& config);

/// Clean full-order trajectories sampled at the observation times.
Dataset simulate(const ExperimentConfig& config);
/// Clean solution of one case on arbitrary times (reference for reporting).
dynamics::Trajectory reference_solution(const ExperimentConfig& config, const Case& c,
                                        const Eigen::VectorXd& times);
/// Applies the configured noise to every trajectory.
Dataset add_noise(const ExperimentConfig& config, const Dataset& clean);

/// Input u(t) of a case; empty function when the model has no inputs.
selection::InputFn input_function(const ExperimentConfig& config, const Case& c);

/// Lifting and scaling from observed variables to the snapshots that are
/// compressed. The scaling is fixed once from the training data.
struct StateTransform {
  Benchmark benchmark = Benchmark::Synthetic;
  dynamics::BlockScaling scaling;

  Eigen::MatrixXd forward(const Eigen::MatrixXd& observed) const;
};

/// Reduced model of a configuration: polynomial ROM or the SEIRD ODE.
structure::ReducedModel reduced_model(const ExperimentConfig& config);

struct FitResult {
  structure::ReducedModel model;
  StateTransform transform;
  reduction::ReducedBasis basis;
  std::vector<Case> cases;                               // training cases, in order
  std::vector<std::vector<gp::GPEstimate>> gp;           // [trajectory][mode]
  std::vector<selection::TrajectoryTarget> targets;      // GP states per trajectory
  selection::SelectionResult selection;
  std::vector<inference::OperatorPosterior> posteriors;
  double seconds_gp = 0.0;
  double seconds_selection = 0.0;
};

/// Learns the operator posterior: POD benchmarks stack every training
/// trajectory, SEIRD estimates the ODE parameters. Errors carry the failing
/// stage in the message.
FitResult fit(const ExperimentConfig& config, const Dataset& observed);

/// Same as fit() but with a given prior instead of running the selection.
FitResult fit_with_prior(const ExperimentConfig& config, const Dataset& observed,
                         const Eigen::VectorXd& gamma_values);

struct PredictionSummary {
  Eigen::VectorXd times;
  Eigen::MatrixXd mean;  // variables x times
  Eigen::MatrixXd q025;
  Eigen::MatrixXd q975;
  std::vector<Eigen::MatrixXd> samples;  // only when retained
  int n_samples = 0;
  int n_failed = 0;
  std::vector<std::string> labels;
};

/// Maps one reduced solution (states x times) to the reported variables.
using OutputMap = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

/// Monte Carlo over the operator posterior: sample k uses derive_seed(seed, k).
/// Failed samples are excluded and counted; more than half failing throws
/// PredictionFailed. Quantiles interpolate linearly between order statistics.
PredictionSummary predict(const std::vector<inference::OperatorPosterior>& posteriors,
                          const structure::ReducedModel& model, const Eigen::VectorXd& q0,
                          const selection::InputFn& input, const Eigen::VectorXd& t_grid,
                          int n_samples, std::uint64_t seed,
                          const dynamics::Rk45Options& integrator = {},
                          const OutputMap& output = {}, bool retain_samples = false);

/// Type-7 quantile of unsorted values.
double quantile(std::vector<double> values, double prob);

/// Prediction grid [0, t_final] with config.prediction_times points.
Eigen::VectorXd prediction_grid(const ExperimentConfig& config);

/// Reduced initial state for a case: the GP estimate at t'_0 for training
/// cases, the compressed true initial condition otherwise.
Eigen::VectorXd initial_state(const ExperimentConfig& config, const FitResult& fit, const Case& c);

/// Physical probe variables reported next to the reduced coordinates.
struct ProbeMap {
  std::vector<std::string> labels;
  OutputMap map;  // reduced -> probes
  std::function<Eigen::MatrixXd(const dynamics::Trajectory&)> from_reference;  // clean -> probes
};
ProbeMap probe_map(const ExperimentConfig& config, const FitResult& fit);

PredictionSummary predict_case(const ExperimentConfig& config, const FitResult& fit,
                               std::size_t case_index, const Case& c, const OutputMap& output = {});

// ------------------------------------------------------------ run files ----

std::string posterior_json(const std::vector<inference::OperatorPosterior>& posteriors);
std::vector<inference::OperatorPosterior> posterior_from_json(const std::string& text);
std::string fit_json(const FitResult& fit);
FitResult fit_from_json(const ExperimentConfig& config, const std::string& model_text,
                        const std::string& posterior_text);

void write_summary_csv(const std::string& path, const PredictionSummary& summary);
PredictionSummary read_summary_csv(const std::string& path);
void write_samples_csv(const std::string& path, const PredictionSummary& summary);

/// Writes `<prefix>_<k>.csv` plus a JSON sidecar for every trajectory.
void write_dataset(const std::string& dir, const std::string& prefix,
                   const ExperimentConfig& config, const Dataset& data);
/// Reads the files written by write_dataset; cases come from the config.
Dataset read_dataset(const std::string& dir, const std::string& prefix,
                     const ExperimentConfig& config);

/// Writes config.json, model.json and posterior.json into `dir`.
void write_fit_outputs(const std::string& dir, const ExperimentConfig& config,
                       const FitResult& fit);

struct CasePrediction {
  Case c;
  PredictionSummary reduced;
  PredictionSummary probes;  // empty when the benchmark has no probe variables
};

/// Every training case followed by the held-out cases.
std::vector<CasePrediction> predict_all(const ExperimentConfig& config, const FitResult& fit);

/// summary.csv (first case), summary_<case>.csv, physical summaries, samples.csv.
void write_predictions(const std::string& dir, const std::vector<CasePrediction>& predictions,
                       bool retain_samples);
/// Reads back the summaries of write_predictions for every case of the config.
std::vector<CasePrediction> read_predictions(const std::string& dir, const ExperimentConfig& config);
/// Plot-ready CSVs comparing predictions with the clean reference solution.
void write_report(const std::string& dir, const ExperimentConfig& config, const FitResult& fit,
                  const std::vector<CasePrediction>& predictions);
void write_manifest(const std::string& dir, const ExperimentConfig& config,
                    const std::vector<std::pair<std::string, double>>& timings);

/// End-to-end: simulate, noise, fit, predict, report, manifest.
void run_experiment(const ExperimentConfig& config, const std::string& dir);

/// Loads config.json, model.json and posterior.json from a run directory.
struct LoadedRun {
  ExperimentConfig config;
  FitResult fit;
};
LoadedRun load_run(const std::string& dir);

/// Quadratic generator of the synthetic benchmark (compressed layout) and its start.
Eigen::MatrixXd synthetic_operator();
Eigen::VectorXd synthetic_initial();

const char* version() noexcept;

}  // namespace bayesrom::pipeline

#endif  // BAYESROM_PIPELINE_HPP
