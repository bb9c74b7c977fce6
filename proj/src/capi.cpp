// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/bayesrom.h"

#include <chrono>
#include <new>
#include <string>

#include "bayesrom/error.hpp"
#include "bayesrom/gp.hpp"
#include "bayesrom/inference.hpp"
#include "bayesrom/io.hpp"
#include "bayesrom/pipeline.hpp"

struct br_config {
  bayesrom::pipeline::ExperimentConfig config;
};

struct br_run {
  bayesrom::pipeline::LoadedRun run;
};

namespace {

using bayesrom::ErrorCode;
using bayesrom::pipeline::ExperimentConfig;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

thread_local std::string last_error;

static_assert(static_cast<int>(ErrorCode::Internal) == BR_INTERNAL, "status codes out of sync");

template <typename F>
br_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return BR_OK;
  } catch (const bayesrom::Error& e) {
    last_error = e.what();
    return static_cast<br_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return BR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return BR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return BR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  bayesrom::require(p != nullptr, ErrorCode::InvalidArgument, std::string(what) + " is null");
}

br_status make_config(ExperimentConfig config, br_config** out) {
  config.validate();
  *out = new br_config{std::move(config)};
  return BR_OK;
}

}  // namespace

extern "C" {

const char* br_version(void) { return bayesrom::pipeline::version(); }

const char* br_status_string(br_status status) {
  if (status == BR_OK) return "ok";
  if (status < BR_INVALID_ARGUMENT || status > BR_INTERNAL) return "unknown status";
  return bayesrom::to_string(static_cast<ErrorCode>(status));
}

const char* br_last_error(void) { return last_error.c_str(); }

int br_builtin_count(void) { return static_cast<int>(ExperimentConfig::builtin_names().size()); }

const char* br_builtin_name(int index) {
  static const std::vector<std::string> names = ExperimentConfig::builtin_names();
  if (index < 0 || index >= static_cast<int>(names.size())) return nullptr;
  return names[static_cast<std::size_t>(index)].c_str();
}

br_status br_config_builtin(const char* name, br_config** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    make_config(ExperimentConfig::builtin(name), out);
  });
}

br_status br_config_load(const char* path, br_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    make_config(ExperimentConfig::from_json(bayesrom::io::read_text(path)), out);
  });
}

br_status br_config_from_json(const char* text, br_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    make_config(ExperimentConfig::from_json(text), out);
  });
}

br_status br_config_set_seed(br_config* config, uint64_t seed) {
  return guarded([&] {
    need(config, "config");
    config->config.seed = seed;
  });
}

br_status br_config_set_samples(br_config* config, int n_samples) {
  return guarded([&] {
    need(config, "config");
    ExperimentConfig c = config->config;
    c.prediction_samples = n_samples;
    c.validate();
    config->config = c;
  });
}

br_status br_config_write(const br_config* config, const char* path) {
  return guarded([&] {
    need(config, "config");
    need(path, "path");
    bayesrom::io::write_text(path, config->config.to_json());
  });
}

void br_config_free(br_config* config) { delete config; }

br_status br_simulate(const br_config* config, const char* out_dir) {
  return guarded([&] {
    need(config, "config");
    need(out_dir, "out_dir");
    const auto data = bayesrom::pipeline::simulate(config->config);
    bayesrom::pipeline::write_dataset(out_dir, "clean", config->config, data);
  });
}

br_status br_noise(const br_config* config, const char* in_dir, const char* out_dir) {
  return guarded([&] {
    need(config, "config");
    need(in_dir, "in_dir");
    need(out_dir, "out_dir");
    const auto clean = bayesrom::pipeline::read_dataset(in_dir, "clean", config->config);
    const auto noisy = bayesrom::pipeline::add_noise(config->config, clean);
    bayesrom::pipeline::write_dataset(out_dir, "observed", config->config, noisy);
  });
}

br_status br_fit(const br_config* config, const char* data_dir, const char* prefix, const char* run_dir) {
  return guarded([&] {
    need(config, "config");
    need(data_dir, "data_dir");
    need(run_dir, "run_dir");
    const auto data = bayesrom::pipeline::read_dataset(data_dir, prefix ? prefix : "observed", config->config);
    const auto t0 = std::chrono::steady_clock::now();
    const auto fit = bayesrom::pipeline::fit(config->config, data);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bayesrom::pipeline::write_fit_outputs(run_dir, config->config, fit);
    bayesrom::pipeline::write_manifest(
        run_dir, config->config,
        {{"fit", secs}, {"fit_gp", fit.seconds_gp}, {"fit_selection", fit.seconds_selection}});
  });
}

br_status br_experiment(const br_config* config, const char* run_dir) {
  return guarded([&] {
    need(config, "config");
    need(run_dir, "run_dir");
    bayesrom::pipeline::run_experiment(config->config, run_dir);
  });
}

br_status br_run_load(const char* run_dir, br_run** out) {
  return guarded([&] {
    need(run_dir, "run_dir");
    need(out, "out");
    *out = new br_run{bayesrom::pipeline::load_run(run_dir)};
  });
}

br_status br_run_set_seed(br_run* run, uint64_t seed) {
  return guarded([&] {
    need(run, "run");
    run->run.config.seed = seed;
  });
}

br_status br_run_set_samples(br_run* run, int n_samples) {
  return guarded([&] {
    need(run, "run");
    ExperimentConfig c = run->run.config;
    c.prediction_samples = n_samples;
    c.validate();
    run->run.config = c;
  });
}

br_status br_predict(const br_run* run, const char* out_dir) {
  return guarded([&] {
    need(run, "run");
    need(out_dir, "out_dir");
    const auto& r = run->run;
    const auto predictions = bayesrom::pipeline::predict_all(r.config, r.fit);
    bayesrom::pipeline::write_predictions(out_dir, predictions, r.config.retain_samples);
  });
}

br_status br_report(const br_run* run, const char* dir) {
  return guarded([&] {
    need(run, "run");
    need(dir, "dir");
    const auto& r = run->run;
    const auto predictions = bayesrom::pipeline::read_predictions(dir, r.config);
    bayesrom::pipeline::write_report(dir, r.config, r.fit, predictions);
  });
}

void br_run_free(br_run* run) { delete run; }

br_status br_run_shape(const br_run* run, size_t* rows, size_t* width) {
  return guarded([&] {
    need(run, "run");
    const auto& posts = run->run.fit.posteriors;
    if (rows) *rows = posts.size();
    if (width) *width = posts.empty() ? 0 : static_cast<size_t>(posts.front().mean.size());
  });
}

br_status br_run_posterior(const br_run* run, size_t row, double* mean, double* covariance) {
  return guarded([&] {
    need(run, "run");
    const auto& posts = run->run.fit.posteriors;
    bayesrom::require(row < posts.size(), ErrorCode::InvalidArgument, "br_run_posterior: row out of range");
    const auto& p = posts[row];
    const Eigen::Index d = p.mean.size();
    if (mean) Eigen::Map<Eigen::VectorXd>(mean, d) = p.mean;
    if (covariance) Eigen::Map<RowMatrix>(covariance, d, d) = p.covariance;
  });
}

br_status br_run_prior(const br_run* run, double* values, size_t capacity, size_t* count) {
  return guarded([&] {
    need(run, "run");
    const Eigen::VectorXd& v = run->run.fit.selection.values;
    if (count) *count = static_cast<size_t>(v.size());
    if (values) {
      bayesrom::require(capacity >= static_cast<size_t>(v.size()), ErrorCode::InvalidArgument,
                        "br_run_prior: buffer too small");
      Eigen::Map<Eigen::VectorXd>(values, v.size()) = v;
    }
  });
}

br_status br_gp_fit(const double* t_obs, const double* y, size_t m, const double* t_est, size_t m_est,
                    double tau, double* y_tilde, double* z_tilde, double* hyper) {
  return guarded([&] {
    need(t_obs, "t_obs");
    need(y, "y");
    need(t_est, "t_est");
    const auto mi = static_cast<Eigen::Index>(m);
    const auto me = static_cast<Eigen::Index>(m_est);
    const auto e = bayesrom::gp::gp_fit(Eigen::Map<const Eigen::VectorXd>(t_obs, mi),
                                        Eigen::Map<const Eigen::VectorXd>(y, mi),
                                        Eigen::Map<const Eigen::VectorXd>(t_est, me), tau);
    if (y_tilde) Eigen::Map<Eigen::VectorXd>(y_tilde, me) = e.y_tilde;
    if (z_tilde) Eigen::Map<Eigen::VectorXd>(z_tilde, me) = e.z_tilde;
    if (hyper) {
      hyper[0] = e.hp.signal_variance;
      hyper[1] = e.hp.lengthscale;
      hyper[2] = e.hp.noise_variance;
    }
  });
}

br_status br_op_post(const double* data_matrix, size_t m, size_t d, const double* z, const double* w_sqrt,
                     const double* gamma, double* mean, double* covariance) {
  return guarded([&] {
    need(data_matrix, "data_matrix");
    need(z, "z");
    need(w_sqrt, "w_sqrt");
    need(gamma, "gamma");
    const auto mi = static_cast<Eigen::Index>(m);
    const auto di = static_cast<Eigen::Index>(d);
    bayesrom::inference::RegressionBundle b;
    b.data_matrix = Eigen::Map<const RowMatrix>(data_matrix, mi, di);
    b.z_tilde = Eigen::Map<const Eigen::VectorXd>(z, mi);
    b.w_sqrt_blocks = {Eigen::MatrixXd(Eigen::Map<const RowMatrix>(w_sqrt, mi, mi))};
    const auto post =
        bayesrom::inference::op_post(b, {Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(gamma, di))});
    if (mean) Eigen::Map<Eigen::VectorXd>(mean, di) = post.mean;
    if (covariance) Eigen::Map<RowMatrix>(covariance, di, di) = post.covariance;
  });
}

}  // extern "C"
