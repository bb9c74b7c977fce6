// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "bayesrom/error.hpp"
#include "bayesrom/optimize.hpp"

namespace bayesrom::gp {

namespace {

void check_inputs(const Eigen::VectorXd& t_obs, const Eigen::VectorXd& y) {
  require(t_obs.size() == y.size(), ErrorCode::DimensionMismatch,
          "gp: time and data vectors differ in length");
  require(t_obs.size() >= 1, ErrorCode::InvalidArgument, "gp: no observations");
  require(t_obs.allFinite() && y.allFinite(), ErrorCode::InvalidArgument,
          "gp: non-finite observations");
}

struct Factor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  bool ok = false;
};

Factor factor_kyy(const KernelHyperparams& hp, const Eigen::VectorXd& t_obs) {
  Eigen::MatrixXd kyy = kernels::gram(t_obs, t_obs, hp);
  kyy.diagonal().array() += hp.noise_variance;
  Factor f;
  f.llt.compute(kyy);
  f.ok = f.llt.info() == Eigen::Success;
  if (f.ok) {
    const auto& l = f.llt.matrixLLT();
    f.ok = (l.diagonal().array() > 0.0).all() && l.diagonal().allFinite();
  }
  return f;
}

double nlml_from_factor(const Factor& f, const Eigen::VectorXd& y) {
  const Eigen::VectorXd alpha = f.llt.solve(y);
  const double log_det = 2.0 * f.llt.matrixLLT().diagonal().array().log().sum();
  const double m = static_cast<double>(y.size());
  return 0.5 * y.dot(alpha) + 0.5 * log_det + 0.5 * m * std::log(2.0 * std::numbers::pi);
}

}  // namespace

Eigen::VectorXd estimation_grid(const Eigen::VectorXd& t_obs, Eigen::Index m_est) {
  require(t_obs.size() >= 1, ErrorCode::InvalidArgument, "estimation_grid: no times");
  require(m_est >= 2, ErrorCode::InvalidArgument, "estimation_grid: m' must be >= 2");
  return Eigen::VectorXd::LinSpaced(m_est, t_obs.minCoeff(), t_obs.maxCoeff());
}

double neg_log_marginal_likelihood(const KernelHyperparams& hp,
                                   const Eigen::VectorXd& t_obs,
                                   const Eigen::VectorXd& y) {
  check_inputs(t_obs, y);
  require(hp.valid(), ErrorCode::InvalidArgument, "nlml: invalid hyperparameters");
  const Factor f = factor_kyy(hp, t_obs);
  require(f.ok, ErrorCode::SingularSystem, "nlml: kernel matrix is numerically singular");
  return nlml_from_factor(f, y);
}

KernelHyperparams fit_hyperparameters(const Eigen::VectorXd& t_obs,
                                      const Eigen::VectorXd& y,
                                      const FitConfig& config) {
  check_inputs(t_obs, y);
  require(config.n_starts >= 1, ErrorCode::InvalidArgument, "fit_hyperparameters: n_starts < 1");

  std::vector<double> sorted(t_obs.data(), t_obs.data() + t_obs.size());
  std::sort(sorted.begin(), sorted.end());
  const double span = sorted.back() - sorted.front();
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] > sorted[i - 1]) min_gap = std::min(min_gap, sorted[i] - sorted[i - 1]);
  const double ref_span = span > 0.0 ? span : 1.0;
  if (!std::isfinite(min_gap)) min_gap = ref_span;

  double scale = y.squaredNorm() / static_cast<double>(y.size());
  if (!(scale > 0.0)) scale = 1.0;
  const double log_scale = std::log(scale);

  std::optional<double> pinned = config.fixed_noise_variance;
  if (!pinned && config.relative_noise_variance) pinned = *config.relative_noise_variance * scale;
  const bool fixed_noise = pinned.has_value();
  const int dim = fixed_noise ? 2 : 3;
  optimize::Box box;
  box.lower.resize(dim);
  box.upper.resize(dim);
  box.lower[0] = log_scale - 12.0;
  box.upper[0] = log_scale + 12.0;
  box.lower[1] = std::log(min_gap);
  box.upper[1] = std::log(10.0 * ref_span);
  if (!fixed_noise) {
    box.lower[2] = log_scale - 16.0;
    box.upper[2] = log_scale + 4.0;
  }

  auto unpack = [&](const Eigen::VectorXd& x) {
    KernelHyperparams hp;
    hp.signal_variance = std::exp(x[0]);
    hp.lengthscale = std::exp(x[1]);
    hp.noise_variance = fixed_noise ? *pinned : std::exp(x[2]);
    return hp;
  };
  auto objective = [&](const Eigen::VectorXd& x) {
    const KernelHyperparams hp = unpack(x);
    if (!hp.valid()) return std::numeric_limits<double>::infinity();
    const Factor f = factor_kyy(hp, t_obs);
    if (!f.ok) return std::numeric_limits<double>::infinity();
    return nlml_from_factor(f, y);
  };

  optimize::NelderMeadOptions nm;
  nm.max_evaluations = config.max_evaluations_per_start;

  Eigen::VectorXd heuristic(dim);
  heuristic[0] = log_scale;
  heuristic[1] = std::log(std::clamp(ref_span / 5.0, min_gap, 10.0 * ref_span));
  if (!fixed_noise) heuristic[2] = log_scale - 6.0;

  double best_value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x = heuristic;
  for (int s = 0; s < config.n_starts; ++s) {
    Eigen::VectorXd x0 = heuristic;
    if (s > 0) {
      const Eigen::VectorXd u = optimize::halton_point(s - 1, dim);
      x0 = box.lower.array() + u.array() * (box.upper - box.lower).array();
    }
    const optimize::MinimizeResult res = optimize::nelder_mead(objective, x0, box, nm);
    if (res.value < best_value) {
      best_value = res.value;
      best_x = res.x;
    }
  }
  if (!std::isfinite(best_value)) {
    std::ostringstream msg;
    msg << "fit_hyperparameters: objective non-finite at all " << config.n_starts << " starts";
    fail(ErrorCode::SingularSystem, msg.str());
  }
  return unpack(best_x);
}

GPEstimate gp_fit_fixed(const Eigen::VectorXd& t_obs, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& t_est, const KernelHyperparams& hp,
                        double tau) {
  check_inputs(t_obs, y);
  require(tau > 0.0, ErrorCode::InvalidArgument, "gp_fit: tau must be positive");
  const kernels::KernelBlocks blocks = kernels::assemble_blocks(t_obs, t_est, hp);

  Eigen::LLT<Eigen::MatrixXd> llt(blocks.yy);
  require(llt.info() == Eigen::Success, ErrorCode::SingularSystem,
          "gp_fit: K^yy is not positive definite");

  GPEstimate est;
  est.t_est = t_est;
  est.hp = hp;
  const Eigen::VectorXd alpha = llt.solve(y);
  est.y_tilde = kernels::gram(t_est, t_obs, hp) * alpha;
  est.z_tilde = blocks.zy * alpha;

  // C = K^zy (K^yy)^-1 K^yz = V^T V with V = L^-1 K^yz.
  const Eigen::MatrixXd v = llt.matrixL().solve(blocks.zy.transpose());
  const Eigen::MatrixXd c = v.transpose() * v;
  Eigen::MatrixXd cov = blocks.zz - 0.5 * (c + c.transpose());
  cov.diagonal().array() += tau;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  require(eig.info() == Eigen::Success, ErrorCode::NonPositiveEigenvalue,
          "gp_fit: eigendecomposition failed");
  Eigen::VectorXd xi = eig.eigenvalues();
  double applied = tau;
  // Shifting by (tau' - tau) I moves every eigenvalue and keeps the eigenvectors.
  while (!(xi.minCoeff() > 0.0)) {
    const double next = applied * 10.0;
    if (next > kMaxTau * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "gp_fit: smallest eigenvalue " << xi.minCoeff()
          << " of the derivative covariance is not positive at tau=" << applied;
      fail(ErrorCode::NonPositiveEigenvalue, msg.str());
    }
    xi.array() += next - applied;
    applied = next;
  }
  est.tau = applied;
  const Eigen::MatrixXd& psi = eig.eigenvectors();
  est.w_sqrt = psi * xi.array().rsqrt().matrix().asDiagonal() * psi.transpose();
  est.w_sqrt = 0.5 * (est.w_sqrt + est.w_sqrt.transpose()).eval();
  return est;
}

GPEstimate gp_fit(const Eigen::VectorXd& t_obs, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& t_est, double tau, const FitConfig& config) {
  const KernelHyperparams hp = fit_hyperparameters(t_obs, y, config);
  return gp_fit_fixed(t_obs, y, t_est, hp, tau);
}

}  // namespace bayesrom::gp
