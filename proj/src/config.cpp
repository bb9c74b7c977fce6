// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "bayesrom/error.hpp"
#include "bayesrom/pipeline.hpp"

namespace bayesrom::pipeline {

using json = nlohmann::json;
using structure::Term;

const char* benchmark_name(Benchmark b) noexcept {
  switch (b) {
    case Benchmark::Euler: return "euler";
    case Benchmark::DiffusionReaction: return "diffusion_reaction";
    case Benchmark::Seird: return "seird";
    case Benchmark::Synthetic: return "synthetic";
  }
  return "?";
}

Benchmark benchmark_from_name(const std::string& name) {
  for (Benchmark b : {Benchmark::Euler, Benchmark::DiffusionReaction, Benchmark::Seird,
                      Benchmark::Synthetic})
    if (name == benchmark_name(b)) return b;
  fail(ErrorCode::Config, "unknown benchmark '" + name + "'");
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const std::string& what) { require(ok, ErrorCode::Config, "config: " + what); };
  check(r >= 1, "r must be >= 1");
  check(m >= 2, "m must be >= 2");
  check(m_est == 0 || m_est >= 2, "m_est must be 0 (4 m) or >= 2");
  check(t_last_obs > 0.0, "t_last_obs must be > 0");
  check(t_final >= t_last_obs, "t_final must be >= t_last_obs");
  check(noise.level >= 0.0 && std::isfinite(noise.level), "noise level must be >= 0");
  check(tau > 0.0 && tau <= gp::kMaxTau, "tau must lie in (0, 1e-2]");
  check(gp_starts >= 1 && gp_max_evaluations >= 10, "gp search settings too small");
  check(phi > 0.0, "phi must be > 0");
  check(selection_samples >= 1, "selection samples must be >= 1");
  check(gamma_min > 0.0 && gamma_max >= gamma_min && gamma_count >= 1, "bad gamma grid");
  check(rom_rtol > 0.0 && rom_atol > 0.0 && fom_rtol > 0.0 && fom_atol > 0.0, "tolerances must be > 0");
  check(fom_step > 0.0, "fom_step must be > 0");
  check(prediction_samples >= 2, "prediction samples must be >= 2");
  check(prediction_times >= 2, "prediction times must be >= 2");
  switch (benchmark) {
    case Benchmark::Euler:
      check(n_x >= 6, "euler needs n_x >= 6");
      check(r <= m, "r must not exceed the snapshot count");
      break;
    case Benchmark::DiffusionReaction:
      check(n_x >= 3, "diffusion-reaction needs n_x >= 3");
      check(!train_inputs.empty(), "diffusion-reaction needs training inputs");
      break;
    case Benchmark::Seird:
      check(r == 5, "seird has r = 5 states");
      check(time_scheme != dynamics::TimeScheme::IntegerDays ||
                std::abs(t_last_obs - std::round(t_last_obs)) < 1e-9,
            "integer-day sampling needs an integer t_last_obs");
      break;
    case Benchmark::Synthetic:
      check(r == 3, "synthetic benchmark has r = 3");
      break;
  }
  if (benchmark != Benchmark::Seird) {
    check(!terms.empty(), "model structure needs at least one term");
    const bool inputs = std::find(terms.begin(), terms.end(), Term::Input) != terms.end() ||
                        std::find(terms.begin(), terms.end(), Term::Bilinear) != terms.end();
    check(!inputs || benchmark == Benchmark::DiffusionReaction,
          "input terms are only available for the diffusion-reaction benchmark");
  }
}

structure::ModelStructure ExperimentConfig::model_structure() const {
  const bool inputs = std::find(terms.begin(), terms.end(), Term::Input) != terms.end() ||
                      std::find(terms.begin(), terms.end(), Term::Bilinear) != terms.end();
  return structure::ModelStructure(terms, r, inputs ? 2 : 0);
}

selection::SelectionConfig ExperimentConfig::selection_config() const {
  selection::SelectionConfig s;
  s.phi = phi;
  s.n_samples = selection_samples;
  s.t_final = t_final;
  s.gamma_grid = selection::log_grid(gamma_min, gamma_max, gamma_count);
  s.scalar_opt_tolerance = selection_tolerance;
  s.error_norm = error_norm;
  s.seed = SeedPlan::selection(seed);
  s.blockwise = blockwise;
  s.integrator.rtol = rom_rtol;
  s.integrator.atol = rom_atol;
  return s;
}

std::vector<std::string> ExperimentConfig::builtin_names() {
  return {"euler-noisy", "euler-sparse", "heat-multi", "seird-noisy", "seird-sparse", "synthetic"};
}

ExperimentConfig ExperimentConfig::builtin(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  if (name == "euler-noisy" || name == "euler-sparse") {
    c.benchmark = Benchmark::Euler;
    c.terms = {Term::Constant, Term::Linear, Term::Quadratic};
    c.r = 6;
    c.m = name == "euler-noisy" ? 200 : 50;
    c.m_est = 400;
    c.t_last_obs = 0.06;
    c.t_final = 0.15;
    c.n_x = 100;
    c.noise.kind = dynamics::NoiseKind::RangeScaledGaussian;
    c.noise.level = name == "euler-noisy" ? 0.03 : 0.01;
    c.noise.protect_initial = true;
    c.time_scheme = dynamics::TimeScheme::Uniform;
    c.seed = 20240601;
  } else if (name == "heat-multi") {
    c.benchmark = Benchmark::DiffusionReaction;
    c.terms = {Term::Constant, Term::Linear, Term::Quadratic, Term::Input, Term::Bilinear};
    c.r = 5;
    c.m = 20;
    c.m_est = 80;
    c.t_last_obs = 1.0;
    c.t_final = 2.0;
    c.n_x = 200;
    c.noise.kind = dynamics::NoiseKind::MagnitudeScaledGaussian;
    c.noise.level = 0.05;
    c.noise.protect_initial = true;
    c.noise.protect_boundaries = true;
    c.time_scheme = dynamics::TimeScheme::Uniform;
    c.train_inputs = {{-2, 0}, {-1, -2}, {0, 1}, {1, -1}, {2, 2}};
    c.test_inputs = {{1.5, 0.5}};
    c.seed = 20240602;
  } else if (name == "seird-noisy" || name == "seird-sparse") {
    c.benchmark = Benchmark::Seird;
    c.r = 5;
    c.m = name == "seird-noisy" ? 120 : 10;
    c.m_est = 4 * c.m;
    c.t_last_obs = 119.0;
    c.t_final = 199.0;
    c.noise.kind = dynamics::NoiseKind::TruncatedNormalMagnitude;
    c.noise.level = name == "seird-noisy" ? 0.10 : 0.05;
    c.noise.protect_initial = false;
    c.time_scheme = dynamics::TimeScheme::IntegerDays;
    c.prediction_times = 200;
    c.seed = 20240603;
  } else if (name == "synthetic") {
    c.benchmark = Benchmark::Synthetic;
    c.terms = {Term::Constant, Term::Linear, Term::Quadratic};
    c.r = 3;
    c.m = 200;
    c.m_est = 200;
    c.t_last_obs = 1.0;
    c.t_final = 1.0;
    c.noise.level = 0.0;
    c.time_scheme = dynamics::TimeScheme::Uniform;
    c.seed = 20240604;
  } else {
    fail(ErrorCode::Config, "unknown experiment '" + name + "'");
  }
  c.validate();
  return c;
}

namespace {

const char* norm_name(selection::ErrorNorm n) {
  return n == selection::ErrorNorm::Frobenius ? "frobenius" : "max";
}

const char* scheme_name(dynamics::TimeScheme s) {
  return s == dynamics::TimeScheme::Uniform ? "uniform" : "integer_days";
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  require(obj.is_object(), ErrorCode::Config, "config: " + where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    require(allowed.count(it.key()) != 0, ErrorCode::Config,
            "config: unknown field '" + it.key() + "' in " + where);
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, std::string("config: field '") + key + "': " + e.what());
  }
}

std::vector<Eigen::Vector2d> read_pairs(const json& obj, const char* key) {
  std::vector<Eigen::Vector2d> out;
  if (!obj.contains(key)) return out;
  std::vector<std::vector<double>> raw;
  read_field(obj, key, raw);
  for (const auto& p : raw) {
    require(p.size() == 2, ErrorCode::Config, std::string("config: ") + key + " entries must be pairs");
    out.emplace_back(p[0], p[1]);
  }
  return out;
}

json pairs_json(const std::vector<Eigen::Vector2d>& pairs) {
  json a = json::array();
  for (const auto& p : pairs) a.push_back({p[0], p[1]});
  return a;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(j, {"schema", "name", "benchmark", "structure", "r", "m", "m_est", "t_last_obs",
                     "t_final", "n_x", "seed", "noise", "time_scheme", "gp", "selection",
                     "integrator", "fom", "train_inputs", "test_inputs", "prediction"},
                 "the top level");
  require(j.contains("schema") && j["schema"].is_number_integer() && j["schema"].get<int>() == 1,
          ErrorCode::Config, "config: \"schema\": 1 is required");
  require(j.contains("benchmark"), ErrorCode::Config, "config: benchmark is required");

  ExperimentConfig c;
  std::string bench;
  read_field(j, "benchmark", bench);
  c.benchmark = benchmark_from_name(bench);
  read_field(j, "name", c.name);
  if (j.contains("structure")) {
    std::vector<std::string> names;
    read_field(j, "structure", names);
    c.terms.clear();
    for (const auto& n : names) c.terms.push_back(structure::term_from_name(n));
  }
  read_field(j, "r", c.r);
  read_field(j, "m", c.m);
  read_field(j, "m_est", c.m_est);
  read_field(j, "t_last_obs", c.t_last_obs);
  read_field(j, "t_final", c.t_final);
  read_field(j, "n_x", c.n_x);
  read_field(j, "seed", c.seed);
  if (j.contains("time_scheme")) {
    std::string s;
    read_field(j, "time_scheme", s);
    if (s == "uniform") c.time_scheme = dynamics::TimeScheme::Uniform;
    else if (s == "integer_days") c.time_scheme = dynamics::TimeScheme::IntegerDays;
    else fail(ErrorCode::Config, "config: unknown time_scheme '" + s + "'");
  }
  if (j.contains("noise")) {
    const json& n = j["noise"];
    reject_unknown(n, {"kind", "level", "protect_initial", "protect_boundaries"}, "noise");
    std::string kind = dynamics::noise_kind_name(c.noise.kind);
    read_field(n, "kind", kind);
    c.noise.kind = dynamics::noise_kind_from_name(kind);
    read_field(n, "level", c.noise.level);
    read_field(n, "protect_initial", c.noise.protect_initial);
    read_field(n, "protect_boundaries", c.noise.protect_boundaries);
  }
  if (j.contains("gp")) {
    const json& g = j["gp"];
    reject_unknown(g, {"tau", "n_starts", "max_evaluations"}, "gp");
    read_field(g, "tau", c.tau);
    read_field(g, "n_starts", c.gp_starts);
    read_field(g, "max_evaluations", c.gp_max_evaluations);
  }
  if (j.contains("selection")) {
    const json& s = j["selection"];
    reject_unknown(s, {"phi", "n_samples", "gamma_min", "gamma_max", "gamma_count", "tolerance",
                       "error_norm", "blockwise"},
                   "selection");
    read_field(s, "phi", c.phi);
    read_field(s, "n_samples", c.selection_samples);
    read_field(s, "gamma_min", c.gamma_min);
    read_field(s, "gamma_max", c.gamma_max);
    read_field(s, "gamma_count", c.gamma_count);
    read_field(s, "tolerance", c.selection_tolerance);
    read_field(s, "blockwise", c.blockwise);
    if (s.contains("error_norm")) {
      std::string n;
      read_field(s, "error_norm", n);
      if (n == "frobenius") c.error_norm = selection::ErrorNorm::Frobenius;
      else if (n == "max") c.error_norm = selection::ErrorNorm::MaxAbs;
      else fail(ErrorCode::Config, "config: unknown error_norm '" + n + "'");
    }
  }
  if (j.contains("integrator")) {
    const json& g = j["integrator"];
    reject_unknown(g, {"rtol", "atol"}, "integrator");
    read_field(g, "rtol", c.rom_rtol);
    read_field(g, "atol", c.rom_atol);
  }
  if (j.contains("fom")) {
    const json& g = j["fom"];
    reject_unknown(g, {"rtol", "atol", "step"}, "fom");
    read_field(g, "rtol", c.fom_rtol);
    read_field(g, "atol", c.fom_atol);
    read_field(g, "step", c.fom_step);
  }
  c.train_inputs = read_pairs(j, "train_inputs");
  c.test_inputs = read_pairs(j, "test_inputs");
  if (j.contains("prediction")) {
    const json& p = j["prediction"];
    reject_unknown(p, {"samples", "n_times", "retain_samples"}, "prediction");
    read_field(p, "samples", c.prediction_samples);
    read_field(p, "n_times", c.prediction_times);
    read_field(p, "retain_samples", c.retain_samples);
  }
  c.validate();
  return c;
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["schema"] = 1;
  j["name"] = name;
  j["benchmark"] = benchmark_name(benchmark);
  json terms_j = json::array();
  for (Term t : terms) terms_j.push_back(structure::term_name(t));
  j["structure"] = terms_j;
  j["r"] = r;
  j["m"] = m;
  j["m_est"] = m_est;
  j["t_last_obs"] = t_last_obs;
  j["t_final"] = t_final;
  j["n_x"] = n_x;
  j["seed"] = seed;
  j["time_scheme"] = scheme_name(time_scheme);
  j["noise"] = {{"kind", dynamics::noise_kind_name(noise.kind)},
                {"level", noise.level},
                {"protect_initial", noise.protect_initial},
                {"protect_boundaries", noise.protect_boundaries}};
  j["gp"] = {{"tau", tau}, {"n_starts", gp_starts}, {"max_evaluations", gp_max_evaluations}};
  j["selection"] = {{"phi", phi},
                    {"n_samples", selection_samples},
                    {"gamma_min", gamma_min},
                    {"gamma_max", gamma_max},
                    {"gamma_count", gamma_count},
                    {"tolerance", selection_tolerance},
                    {"error_norm", norm_name(error_norm)},
                    {"blockwise", blockwise}};
  j["integrator"] = {{"rtol", rom_rtol}, {"atol", rom_atol}};
  j["fom"] = {{"rtol", fom_rtol}, {"atol", fom_atol}, {"step", fom_step}};
  j["train_inputs"] = pairs_json(train_inputs);
  j["test_inputs"] = pairs_json(test_inputs);
  j["prediction"] = {{"samples", prediction_samples},
                     {"n_times", prediction_times},
                     {"retain_samples", retain_samples}};
  return j.dump(2) + "\n";
}

}  // namespace bayesrom::pipeline
