// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Uses only the C interface of libbayesrom.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bayesrom/bayesrom.h"

namespace {

std::string builtin_list() {
  std::string s;
  for (int i = 0; i < br_builtin_count(); ++i) s += std::string(i ? ", " : "") + br_builtin_name(i);
  return s;
}

int check(br_status s) {
  if (s != BR_OK && *br_last_error()) std::fprintf(stderr, "error: %s: %s\n", br_status_string(s), br_last_error());
  return static_cast<int>(s);
}

// Owns a br_config; --config takes a JSON file or the name of a built-in experiment.
struct Config {
  br_config* handle = nullptr;
  ~Config() { br_config_free(handle); }

  br_status open(const std::string& spec) {
    if (!std::filesystem::exists(spec))
      for (int i = 0; i < br_builtin_count(); ++i)
        if (spec == br_builtin_name(i)) return br_config_builtin(spec.c_str(), &handle);
    if (!std::filesystem::exists(spec)) {
      std::fprintf(stderr, "error: '%s' is neither a file nor a built-in experiment (%s)\n", spec.c_str(),
                   builtin_list().c_str());
      return BR_CONFIG;
    }
    return br_config_load(spec.c_str(), &handle);
  }
};

struct Run {
  br_run* handle = nullptr;
  ~Run() { br_run_free(handle); }
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;

  br_status apply(br_config* c) const {
    if (seed)
      if (br_status s = br_config_set_seed(c, *seed); s != BR_OK) return s;
    if (samples) return br_config_set_samples(c, *samples);
    return BR_OK;
  }
  br_status apply(br_run* r) const {
    if (seed)
      if (br_status s = br_run_set_seed(r, *seed); s != BR_OK) return s;
    if (samples) return br_run_set_samples(r, *samples);
    return BR_OK;
  }
};

void add_overrides(CLI::App* app, Overrides& o, bool samples) {
  app->add_option("--seed", o.seed, "Base seed (overrides the config)");
  if (samples) app->add_option("--samples", o.samples, "Posterior samples for prediction");
}


}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian operator inference for reduced models from noisy, sparse data"};
  app.set_version_flag("--version", std::string(br_version()));
  app.require_subcommand(1);

  std::string config_spec, out_dir, in_dir, data_dir, run_dir, prefix = "observed", name;
  Overrides ov;

  auto* simulate = app.add_subcommand("simulate", "Clean full-order trajectories at the observation times");
  simulate->add_option("--config", config_spec, "Config JSON or built-in name (" + builtin_list() + ")")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();
  add_overrides(simulate, ov, false);

  auto* noise = app.add_subcommand("noise", "Apply the configured observation noise");
  noise->add_option("--config", config_spec, "Config JSON or built-in name")->required();
  noise->add_option("--in", in_dir, "Directory with clean_<k>.csv")->required();
  noise->add_option("--out", out_dir, "Output directory")->required();
  add_overrides(noise, ov, false);

  auto* fit = app.add_subcommand("fit", "Learn the operator posterior from observed trajectories");
  fit->add_option("--config", config_spec, "Config JSON or built-in name")->required();
  fit->add_option("--data", data_dir, "Directory with <prefix>_<k>.csv")->required();
  fit->add_option("--prefix", prefix, "Data file prefix")->capture_default_str();
  fit->add_option("--out", out_dir, "Run directory")->required();
  add_overrides(fit, ov, false);

  auto* predict = app.add_subcommand("predict", "Sample the posterior and summarize the predictions");
  predict->add_option("--run", run_dir, "Run directory written by fit")->required();
  predict->add_option("--out", out_dir, "Output directory (default: the run directory)");
  add_overrides(predict, ov, true);

  auto* experiment = app.add_subcommand("experiment", "End-to-end named experiment");
  experiment->add_option("name", name, "Experiment (" + builtin_list() + ")")->required();
  experiment->add_option("--config", config_spec, "Config JSON replacing the built-in settings");
  experiment->add_option("--out", out_dir, "Run directory")->required();
  add_overrides(experiment, ov, true);

  auto* report = app.add_subcommand("report", "Plot-ready CSVs from a predicted run");
  report->add_option("--run", run_dir, "Run directory written by fit")->required();
  report->add_option("--out", out_dir, "Directory holding the prediction summaries (default: the run directory)");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed() || noise->parsed() || fit->parsed()) {
    Config c;
    if (int rc = check(c.open(config_spec))) return rc;
    if (int rc = check(ov.apply(c.handle))) return rc;
    if (simulate->parsed()) return check(br_simulate(c.handle, out_dir.c_str()));
    if (noise->parsed()) return check(br_noise(c.handle, in_dir.c_str(), out_dir.c_str()));
    return check(br_fit(c.handle, data_dir.c_str(), prefix.c_str(), out_dir.c_str()));
  }
  if (experiment->parsed()) {
    Config c;
    if (int rc = check(c.open(config_spec.empty() ? name : config_spec))) return rc;
    if (int rc = check(ov.apply(c.handle))) return rc;
    return check(br_experiment(c.handle, out_dir.c_str()));
  }
  Run r;
  if (int rc = check(br_run_load(run_dir.c_str(), &r.handle))) return rc;
  const std::string target = out_dir.empty() ? run_dir : out_dir;
  if (predict->parsed()) {
    if (int rc = check(ov.apply(r.handle))) return rc;
    return check(br_predict(r.handle, target.c_str()));
  }
  return check(br_report(r.handle, target.c_str()));
}
