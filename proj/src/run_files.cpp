// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "bayesrom/error.hpp"
#include "bayesrom/io.hpp"
#include "bayesrom/pipeline.hpp"

namespace bayesrom::pipeline {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kRunSchema = 1;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double to_number(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

json vector_json(const VectorXd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

VectorXd vector_from(const json& j) {
  VectorXd v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = to_number(j[static_cast<std::size_t>(i)]);
  return v;
}

json matrix_json(const MatrixXd& m) {
  json data = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) data.push_back(number(m(i, j)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

MatrixXd matrix_from(const json& j) {
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  const json& data = j.at("data");
  require(static_cast<Index>(data.size()) == rows * cols, ErrorCode::Io, "matrix entry count mismatch");
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < cols; ++k) m(i, k) = to_number(data[static_cast<std::size_t>(i * cols + k)]);
  return m;
}

json case_json(const Case& c) {
  return {{"name", c.name}, {"params", vector_json(c.params)}, {"training", c.training}};
}

Case case_from(const json& j) {
  return {j.at("name").get<std::string>(), vector_from(j.at("params")), j.at("training").get<bool>()};
}

template <typename F>
auto parsing(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorCode::Io, what + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorCode::Io, "cannot create directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

}  // namespace

std::string posterior_json(const std::vector<inference::OperatorPosterior>& posteriors) {
  json rows = json::array();
  for (const auto& p : posteriors)
    rows.push_back({{"mean", vector_json(p.mean)}, {"covariance", matrix_json(p.covariance)}});
  return dump({{"schema", kRunSchema}, {"rows", rows}});
}

std::vector<inference::OperatorPosterior> posterior_from_json(const std::string& text) {
  return parsing("posterior.json", [&] {
    const json j = json::parse(text);
    require(j.at("schema").get<int>() == kRunSchema, ErrorCode::Io, "posterior.json: unsupported schema");
    std::vector<inference::OperatorPosterior> out;
    for (const auto& row : j.at("rows")) {
      inference::OperatorPosterior p{vector_from(row.at("mean")), matrix_from(row.at("covariance"))};
      require(p.covariance.rows() == p.mean.size() && p.covariance.cols() == p.mean.size(),
              ErrorCode::Io, "posterior.json: covariance size differs from the mean");
      out.push_back(std::move(p));
    }
    return out;
  });
}

std::string fit_json(const FitResult& fit) {
  json j;
  j["schema"] = kRunSchema;
  j["benchmark"] = benchmark_name(fit.transform.benchmark);
  j["scaling"] = vector_json(fit.transform.scaling.scales);
  j["basis"] = {{"V", matrix_json(fit.basis.V)},
                {"q_bar", vector_json(fit.basis.q_bar)},
                {"r", fit.basis.r},
                {"singular_values", vector_json(fit.basis.singular_values)}};
  json cases = json::array();
  for (const auto& c : fit.cases) cases.push_back(case_json(c));
  j["cases"] = cases;
  json gp = json::array();
  for (const auto& traj : fit.gp) {
    json modes = json::array();
    for (const auto& g : traj)
      modes.push_back({{"signal_variance", g.hp.signal_variance},
                       {"lengthscale", g.hp.lengthscale},
                       {"noise_variance", g.hp.noise_variance},
                       {"tau", g.tau},
                       {"t_est", vector_json(g.t_est)},
                       {"y_tilde", vector_json(g.y_tilde)},
                       {"z_tilde", vector_json(g.z_tilde)}});
    gp.push_back(modes);
  }
  j["gp"] = gp;
  json targets = json::array();
  for (const auto& t : fit.targets)
    targets.push_back({{"t_est", vector_json(t.t_est)}, {"states", matrix_json(t.states)}});
  j["targets"] = targets;
  json gammas = json::array();
  for (const auto& g : fit.selection.gammas) gammas.push_back(vector_json(g.gamma));
  j["selection"] = {{"values", vector_json(fit.selection.values)},
                    {"gammas", gammas},
                    {"error", number(fit.selection.error)},
                    {"grid", fit.selection.grid},
                    {"grid_errors", vector_json(Eigen::Map<const VectorXd>(
                                        fit.selection.grid_errors.data(),
                                        static_cast<Index>(fit.selection.grid_errors.size())))},
                    {"evaluations", fit.selection.evaluations}};
  j["timings"] = {{"gp", fit.seconds_gp}, {"selection", fit.seconds_selection}};
  return dump(j);
}

FitResult fit_from_json(const ExperimentConfig& config, const std::string& model_text,
                        const std::string& posterior_text) {
  FitResult fit = parsing("model.json", [&] {
    const json j = json::parse(model_text);
    require(j.at("schema").get<int>() == kRunSchema, ErrorCode::Io, "model.json: unsupported schema");
    require(benchmark_from_name(j.at("benchmark").get<std::string>()) == config.benchmark, ErrorCode::Io,
            "model.json: benchmark differs from config.json");
    FitResult f;
    f.model = reduced_model(config);
    f.transform.benchmark = config.benchmark;
    f.transform.scaling.scales = vector_from(j.at("scaling"));
    const json& b = j.at("basis");
    f.basis.V = matrix_from(b.at("V"));
    f.basis.q_bar = vector_from(b.at("q_bar"));
    f.basis.r = b.at("r").get<Index>();
    f.basis.singular_values = vector_from(b.at("singular_values"));
    for (const auto& c : j.at("cases")) f.cases.push_back(case_from(c));
    for (const auto& traj : j.at("gp")) {
      std::vector<gp::GPEstimate> modes;
      for (const auto& g : traj) {
        gp::GPEstimate e;
        e.hp.signal_variance = g.at("signal_variance").get<double>();
        e.hp.lengthscale = g.at("lengthscale").get<double>();
        e.hp.noise_variance = g.at("noise_variance").get<double>();
        e.tau = g.at("tau").get<double>();
        e.t_est = vector_from(g.at("t_est"));
        e.y_tilde = vector_from(g.at("y_tilde"));
        e.z_tilde = vector_from(g.at("z_tilde"));
        modes.push_back(std::move(e));
      }
      f.gp.push_back(std::move(modes));
    }
    std::size_t l = 0;
    for (const auto& t : j.at("targets")) {
      selection::TrajectoryTarget target;
      target.t_est = vector_from(t.at("t_est"));
      target.states = matrix_from(t.at("states"));
      if (l < f.cases.size()) target.input = input_function(config, f.cases[l]);
      f.targets.push_back(std::move(target));
      ++l;
    }
    const json& s = j.at("selection");
    f.selection.values = vector_from(s.at("values"));
    for (const auto& g : s.at("gammas")) f.selection.gammas.push_back({vector_from(g)});
    f.selection.error = to_number(s.at("error"));
    f.selection.grid = s.at("grid").get<std::vector<double>>();
    for (const auto& e : s.at("grid_errors")) f.selection.grid_errors.push_back(to_number(e));
    f.selection.evaluations = s.at("evaluations").get<int>();
    f.seconds_gp = j.at("timings").at("gp").get<double>();
    f.seconds_selection = j.at("timings").at("selection").get<double>();
    return f;
  });
  fit.posteriors = posterior_from_json(posterior_text);
  require(static_cast<Index>(fit.posteriors.size()) == fit.model.rows(), ErrorCode::Io,
          "posterior.json: row count differs from the model");
  require(fit.targets.size() == fit.cases.size(), ErrorCode::Io, "model.json: one target per case expected");
  return fit;
}

void write_summary_csv(const std::string& path, const PredictionSummary& summary) {
  std::vector<std::string> header{"t"};
  const Index nv = summary.mean.rows();
  for (Index i = 0; i < nv; ++i) {
    const std::string l = i < static_cast<Index>(summary.labels.size()) ? summary.labels[static_cast<std::size_t>(i)]
                                                                        : "v" + std::to_string(i);
    header.push_back(l + "_mean");
    header.push_back(l + "_q025");
    header.push_back(l + "_q975");
  }
  MatrixXd rows(summary.times.size(), 1 + 3 * nv);
  rows.col(0) = summary.times;
  for (Index i = 0; i < nv; ++i) {
    rows.col(1 + 3 * i) = summary.mean.row(i).transpose();
    rows.col(2 + 3 * i) = summary.q025.row(i).transpose();
    rows.col(3 + 3 * i) = summary.q975.row(i).transpose();
  }
  io::write_table_csv(path, header, rows);
}

PredictionSummary read_summary_csv(const std::string& path) {
  const dynamics::Trajectory table = io::read_trajectory_csv(path);
  const Index cols = static_cast<Index>(table.labels.size());
  require(cols % 3 == 0, ErrorCode::Io, path + ": expected mean/q025/q975 triples");
  PredictionSummary s;
  s.times = table.times;
  const Index nv = cols / 3;
  s.mean.resize(nv, s.times.size());
  s.q025.resize(nv, s.times.size());
  s.q975.resize(nv, s.times.size());
  for (Index i = 0; i < nv; ++i) {
    const std::string& l = table.labels[static_cast<std::size_t>(3 * i)];
    require(l.size() > 5 && l.compare(l.size() - 5, 5, "_mean") == 0, ErrorCode::Io,
            path + ": unexpected column " + l);
    s.labels.push_back(l.substr(0, l.size() - 5));
    s.mean.row(i) = table.states.row(3 * i);
    s.q025.row(i) = table.states.row(3 * i + 1);
    s.q975.row(i) = table.states.row(3 * i + 2);
  }
  return s;
}

void write_samples_csv(const std::string& path, const PredictionSummary& summary) {
  std::vector<std::string> header{"sample", "t"};
  header.insert(header.end(), summary.labels.begin(), summary.labels.end());
  const Index nt = summary.times.size();
  const Index nv = summary.samples.empty() ? 0 : summary.samples.front().rows();
  MatrixXd rows(static_cast<Index>(summary.samples.size()) * nt, 2 + nv);
  for (std::size_t k = 0; k < summary.samples.size(); ++k)
    for (Index j = 0; j < nt; ++j) {
      const Index row = static_cast<Index>(k) * nt + j;
      rows(row, 0) = static_cast<double>(k);
      rows(row, 1) = summary.times[j];
      rows.row(row).tail(nv) = summary.samples[k].col(j).transpose();
    }
  io::write_table_csv(path, header, rows);
}

void write_dataset(const std::string& dir, const std::string& prefix, const ExperimentConfig& config,
                   const Dataset& data) {
  ensure_dir(dir);
  require(data.trajectories.size() == data.cases.size(), ErrorCode::InvalidArgument,
          "write_dataset: one case per trajectory expected");
  for (std::size_t k = 0; k < data.trajectories.size(); ++k) {
    const std::string stem = prefix + "_" + std::to_string(k);
    io::write_trajectory_csv(join(dir, stem + ".csv"), data.trajectories[k]);
    json side = case_json(data.cases[k]);
    side["experiment"] = config.name;
    side["benchmark"] = benchmark_name(config.benchmark);
    io::write_text(join(dir, stem + ".json"), dump(side));
  }
}

Dataset read_dataset(const std::string& dir, const std::string& prefix, const ExperimentConfig& config) {
  Dataset data;
  data.cases = training_cases(config);
  for (std::size_t k = 0; k < data.cases.size(); ++k) {
    const std::string stem = prefix + "_" + std::to_string(k);
    const std::string csv = join(dir, stem + ".csv");
    require(fs::exists(csv), ErrorCode::Io, "missing data file " + csv);
    const std::string side = join(dir, stem + ".json");
    if (fs::exists(side)) {
      const Case c = parsing(side, [&] { return case_from(json::parse(io::read_text(side))); });
      require(c.name == data.cases[k].name, ErrorCode::Io,
              side + ": case '" + c.name + "' differs from the configuration ('" + data.cases[k].name + "')");
    }
    data.trajectories.push_back(io::read_trajectory_csv(csv));
  }
  return data;
}

void write_fit_outputs(const std::string& dir, const ExperimentConfig& config, const FitResult& fit) {
  ensure_dir(dir);
  io::write_text(join(dir, "config.json"), config.to_json());
  io::write_text(join(dir, "model.json"), fit_json(fit));
  io::write_text(join(dir, "posterior.json"), posterior_json(fit.posteriors));
}

void write_predictions(const std::string& dir, const std::vector<CasePrediction>& predictions,
                       bool retain_samples) {
  ensure_dir(dir);
  json stats = json::array();
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    const CasePrediction& p = predictions[k];
    if (k == 0) write_summary_csv(join(dir, "summary.csv"), p.reduced);
    write_summary_csv(join(dir, "summary_" + p.c.name + ".csv"), p.reduced);
    if (!p.probes.labels.empty())
      write_summary_csv(join(dir, "summary_physical_" + p.c.name + ".csv"), p.probes);
    if (retain_samples) {
      write_samples_csv(join(dir, k == 0 ? "samples.csv" : "samples_" + p.c.name + ".csv"), p.reduced);
    }
    stats.push_back({{"case", p.c.name},
                     {"training", p.c.training},
                     {"samples_used", p.reduced.n_samples},
                     {"samples_failed", p.reduced.n_failed}});
  }
  io::write_text(join(dir, "predictions.json"), dump({{"schema", kRunSchema}, {"cases", stats}}));
}

std::vector<CasePrediction> read_predictions(const std::string& dir, const ExperimentConfig& config) {
  std::vector<CasePrediction> out;
  json stats;
  const std::string stats_path = join(dir, "predictions.json");
  if (fs::exists(stats_path)) stats = parsing(stats_path, [&] { return json::parse(io::read_text(stats_path)); });
  for (const Case& c : all_cases(config)) {
    CasePrediction p;
    p.c = c;
    const std::string path = join(dir, "summary_" + c.name + ".csv");
    require(fs::exists(path), ErrorCode::Io, "missing prediction summary " + path + " (run predict first)");
    p.reduced = read_summary_csv(path);
    const std::string physical = join(dir, "summary_physical_" + c.name + ".csv");
    if (fs::exists(physical)) p.probes = read_summary_csv(physical);
    if (stats.contains("cases"))
      for (const auto& e : stats.at("cases"))
        if (e.value("case", "") == c.name) {
          p.reduced.n_samples = p.probes.n_samples = e.value("samples_used", 0);
          p.reduced.n_failed = p.probes.n_failed = e.value("samples_failed", 0);
        }
    out.push_back(std::move(p));
  }
  return out;
}

void write_report(const std::string& dir, const ExperimentConfig& config, const FitResult& fit,
                  const std::vector<CasePrediction>& predictions) {
  ensure_dir(dir);
  const ProbeMap probes = probe_map(config, fit);
  for (const auto& p : predictions) {
    const dynamics::Trajectory ref = reference_solution(config, p.c, p.reduced.times);
    MatrixXd truth = reduction::compress(fit.basis, fit.transform.forward(ref.states));
    auto table = [](const PredictionSummary& s, const MatrixXd& truth_rows) {
      std::vector<std::string> header{"t"};
      const Index nv = s.mean.rows();
      MatrixXd rows(s.times.size(), 1 + 4 * nv);
      rows.col(0) = s.times;
      for (Index i = 0; i < nv; ++i) {
        const std::string& l = s.labels[static_cast<std::size_t>(i)];
        for (const char* suffix : {"_truth", "_mean", "_q025", "_q975"}) header.push_back(l + suffix);
        rows.col(1 + 4 * i) = truth_rows.row(i).transpose();
        rows.col(2 + 4 * i) = s.mean.row(i).transpose();
        rows.col(3 + 4 * i) = s.q025.row(i).transpose();
        rows.col(4 + 4 * i) = s.q975.row(i).transpose();
      }
      return std::make_pair(header, rows);
    };
    const auto [h, rows] = table(p.reduced, truth);
    io::write_table_csv(join(dir, "report_reduced_" + p.c.name + ".csv"), h, rows);
    if (probes.from_reference && !p.probes.labels.empty()) {
      const auto [hp, rp] = table(p.probes, probes.from_reference(ref));
      io::write_table_csv(join(dir, "report_physical_" + p.c.name + ".csv"), hp, rp);
    }
  }

  const VectorXd& sv = fit.basis.singular_values;
  if (sv.size() > 0) {
    MatrixXd rows(sv.size(), 3);
    const double total = sv.squaredNorm();
    double acc = 0.0;
    for (Index i = 0; i < sv.size(); ++i) {
      acc += sv[i] * sv[i];
      rows.row(i) << static_cast<double>(i + 1), sv[i], total > 0.0 ? acc / total : 1.0;
    }
    io::write_table_csv(join(dir, "report_singular_values.csv"), {"index", "singular_value", "cumulative_energy"},
                        rows);
  }

  for (std::size_t l = 0; l < fit.gp.size(); ++l) {
    const auto& modes = fit.gp[l];
    if (modes.empty()) continue;
    std::vector<std::string> header{"t"};
    MatrixXd rows(modes.front().t_est.size(), 1 + 2 * static_cast<Index>(modes.size()));
    rows.col(0) = modes.front().t_est;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      header.push_back("mode" + std::to_string(i) + "_state");
      header.push_back("mode" + std::to_string(i) + "_derivative");
      rows.col(1 + 2 * static_cast<Index>(i)) = modes[i].y_tilde;
      rows.col(2 + 2 * static_cast<Index>(i)) = modes[i].z_tilde;
    }
    io::write_table_csv(join(dir, "report_gp_" + fit.cases[l].name + ".csv"), header, rows);
  }

  if (!fit.selection.grid.empty()) {
    MatrixXd rows(static_cast<Index>(fit.selection.grid.size()), 2);
    for (std::size_t k = 0; k < fit.selection.grid.size(); ++k)
      rows.row(static_cast<Index>(k)) << fit.selection.grid[k], fit.selection.grid_errors[k];
    io::write_table_csv(join(dir, "report_selection.csv"), {"gamma", "error"}, rows);
  }

  // Posterior mean and standard deviation of every learned coefficient.
  std::ostringstream out;
  out << "row,column,mean,std,lower,upper";
  MatrixXd truth;
  if (config.benchmark == Benchmark::Seird) {
    truth.resize(1, 4);
    for (int i = 0; i < 4; ++i) truth(0, i) = dynamics::kSeirdTruth[static_cast<std::size_t>(i)];
  } else if (config.benchmark == Benchmark::Synthetic) {
    truth = synthetic_operator();
  }
  if (truth.size() > 0) out << ",truth";
  out << "\n";
  for (std::size_t i = 0; i < fit.posteriors.size(); ++i) {
    const auto& p = fit.posteriors[i];
    for (Index j = 0; j < p.mean.size(); ++j) {
      const double sd = std::sqrt(std::max(0.0, p.covariance(j, j)));
      out << i << "," << j << "," << io::format_double(p.mean[j]) << "," << io::format_double(sd) << ","
          << io::format_double(p.mean[j] - 1.96 * sd) << "," << io::format_double(p.mean[j] + 1.96 * sd);
      if (truth.size() > 0) {
        const bool inside = static_cast<Index>(i) < truth.rows() && j < truth.cols();
        out << "," << io::format_double(inside ? truth(static_cast<Index>(i), j) : std::nan(""));
      }
      out << "\n";
    }
  }
  io::write_text(join(dir, "report_coefficients.csv"), out.str());
}

void write_manifest(const std::string& dir, const ExperimentConfig& config,
                    const std::vector<std::pair<std::string, double>>& timings) {
  ensure_dir(dir);
  json seeds;
  seeds["base"] = config.seed;
  const std::vector<Case> train = training_cases(config);
  const std::vector<Case> cases = all_cases(config);
  json times = json::array(), noise = json::array(), prediction = json::array();
  const std::size_t n_vars = config.benchmark == Benchmark::Seird ? 5 : 1;
  for (std::size_t l = 0; l < train.size(); ++l) {
    json per_var = json::array();
    for (std::size_t v = 0; v < n_vars; ++v) per_var.push_back(SeedPlan::times(config.seed, l, v));
    times.push_back(per_var);
    noise.push_back(SeedPlan::noise(config.seed, l));
  }
  for (std::size_t k = 0; k < cases.size(); ++k) prediction.push_back(SeedPlan::prediction(config.seed, k));
  seeds["observation_times"] = times;
  seeds["noise"] = noise;
  seeds["selection"] = SeedPlan::selection(config.seed);
  seeds["prediction"] = prediction;
  json t = json::object();
  for (const auto& [name, seconds] : timings) t[name] = seconds;
  io::write_text(join(dir, "manifest.json"),
                 dump({{"schema", kRunSchema},
                       {"version", version()},
                       {"experiment", config.name},
                       {"benchmark", benchmark_name(config.benchmark)},
                       {"seeds", seeds},
                       {"timings_seconds", t}}));
}

void run_experiment(const ExperimentConfig& config, const std::string& dir) {
  config.validate();
  ensure_dir(dir);
  std::vector<std::pair<std::string, double>> timings;
  auto clock = std::chrono::steady_clock::now();
  auto lap = [&](const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    timings.emplace_back(name, std::chrono::duration<double>(now - clock).count());
    clock = now;
  };
  const Dataset clean = simulate(config);
  write_dataset(dir, "clean", config, clean);
  lap("simulate");
  const Dataset observed = add_noise(config, clean);
  write_dataset(dir, "observed", config, observed);
  lap("noise");
  const FitResult fit = pipeline::fit(config, observed);
  write_fit_outputs(dir, config, fit);
  lap("fit");
  timings.emplace_back("fit_gp", fit.seconds_gp);
  timings.emplace_back("fit_selection", fit.seconds_selection);
  const std::vector<CasePrediction> predictions = predict_all(config, fit);
  write_predictions(dir, predictions, config.retain_samples);
  lap("predict");
  write_report(dir, config, fit, predictions);
  lap("report");
  write_manifest(dir, config, timings);
}

LoadedRun load_run(const std::string& dir) {
  LoadedRun run;
  run.config = ExperimentConfig::from_json(io::read_text(join(dir, "config.json")));
  run.fit = fit_from_json(run.config, io::read_text(join(dir, "model.json")),
                          io::read_text(join(dir, "posterior.json")));
  return run;
}

}  // namespace bayesrom::pipeline
