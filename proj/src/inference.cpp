// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/inference.hpp"

#include <random>
#include <sstream>

#include "bayesrom/error.hpp"

namespace bayesrom::inference {

PriorVariance PriorVariance::scalar(double value, Eigen::Index d) {
  require(value >= 0.0 && d >= 1, ErrorCode::InvalidArgument, "PriorVariance: need gamma >= 0, d >= 1");
  return PriorVariance{Eigen::VectorXd::Constant(d, value)};
}

Eigen::MatrixXd RegressionBundle::w_sqrt() const {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(rows(), rows());
  Eigen::Index off = 0;
  for (const auto& b : w_sqrt_blocks) {
    w.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return w;
}

void RegressionBundle::validate() const {
  require(data_matrix.rows() >= 1 && data_matrix.cols() >= 1, ErrorCode::InvalidArgument,
          "regression bundle: empty data matrix");
  require(z_tilde.size() == data_matrix.rows(), ErrorCode::DimensionMismatch,
          "regression bundle: z has wrong length");
  Eigen::Index total = 0;
  for (const auto& b : w_sqrt_blocks) {
    require(b.rows() == b.cols(), ErrorCode::DimensionMismatch,
            "regression bundle: weight block not square");
    total += b.rows();
  }
  require(total == data_matrix.rows(), ErrorCode::DimensionMismatch,
          "regression bundle: weight blocks do not cover the rows");
  require(data_matrix.allFinite() && z_tilde.allFinite(), ErrorCode::InvalidArgument,
          "regression bundle: non-finite entries");
}

PreparedRegression prepare(const RegressionBundle& bundle) {
  bundle.validate();
  const Eigen::Index d = bundle.width();
  Eigen::MatrixXd a(bundle.rows(), d);
  Eigen::VectorXd b(bundle.rows());
  Eigen::Index off = 0;
  for (const auto& w : bundle.w_sqrt_blocks) {
    const Eigen::Index n = w.rows();
    a.middleRows(off, n).noalias() = w * bundle.data_matrix.middleRows(off, n);
    b.segment(off, n).noalias() = w * bundle.z_tilde.segment(off, n);
    off += n;
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::Index k = std::min(a.rows(), d);
  PreparedRegression out;
  out.width = d;
  out.r0 = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::VectorXd qtb = qr.householderQ().adjoint() * b;
  out.c0 = qtb.head(k);
  return out;
}

OperatorPosterior op_post(const PreparedRegression& prepared, const PriorVariance& gamma) {
  const Eigen::Index d = prepared.width;
  require(gamma.gamma.size() == d, ErrorCode::DimensionMismatch,
          "op_post: prior vector length differs from d");
  require((gamma.gamma.array() >= 0.0).all() && gamma.gamma.allFinite(),
          ErrorCode::InvalidArgument, "op_post: prior entries must be finite and >= 0");
  const Eigen::Index k = prepared.r0.rows();

  Eigen::MatrixXd stacked(k + d, d);
  stacked.topRows(k) = prepared.r0;
  stacked.bottomRows(d) = gamma.gamma.asDiagonal();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + d);
  rhs.head(k) = prepared.c0;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
  if (qr.rank() < d) {
    std::ostringstream msg;
    msg << "op_post: regularized data matrix has rank " << qr.rank() << " < d=" << d;
    fail(ErrorCode::SingularSystem, msg.str());
  }
  OperatorPosterior post;
  post.mean = qr.solve(rhs);

  // stacked * P = Q R, so the Gram matrix is P R^T R P^T and
  // Sigma = (P R^-1)(P R^-1)^T.
  const Eigen::MatrixXd r = qr.matrixR().topRows(d).triangularView<Eigen::Upper>();
  Eigen::MatrixXd rinv = Eigen::MatrixXd::Identity(d, d);
  r.triangularView<Eigen::Upper>().solveInPlace(rinv);
  const Eigen::MatrixXd prinv = qr.colsPermutation() * rinv;
  post.covariance = prinv * prinv.transpose();
  post.covariance = 0.5 * (post.covariance + post.covariance.transpose()).eval();
  require(post.mean.allFinite() && post.covariance.allFinite(), ErrorCode::SingularSystem,
          "op_post: non-finite posterior moments");
  return post;
}

OperatorPosterior op_post(const RegressionBundle& bundle, const PriorVariance& gamma) {
  return op_post(prepare(bundle), gamma);
}

namespace {

template <typename Rows>
std::vector<OperatorPosterior> post_rows(const std::vector<Rows>& rows,
                                         const std::vector<PriorVariance>& gammas) {
  require(rows.size() == gammas.size(), ErrorCode::DimensionMismatch,
          "op_post_all: bundle and prior counts differ");
  std::vector<OperatorPosterior> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      out.push_back(op_post(rows[i], gammas[i]));
    } catch (const Error& e) {
      rethrow_tagged(e, "row " + std::to_string(i));
    }
  }
  return out;
}

}  // namespace

std::vector<OperatorPosterior> op_post_all(const std::vector<RegressionBundle>& bundles,
                                           const std::vector<PriorVariance>& gammas) {
  return post_rows(bundles, gammas);
}

std::vector<OperatorPosterior> op_post_all(const std::vector<PreparedRegression>& prepared,
                                           const std::vector<PriorVariance>& gammas) {
  return post_rows(prepared, gammas);
}

RegressionBundle stack_trajectories(const std::vector<RegressionBundle>& per_trajectory) {
  require(!per_trajectory.empty(), ErrorCode::InvalidArgument, "stack_trajectories: nothing to stack");
  const Eigen::Index d = per_trajectory.front().width();
  Eigen::Index rows = 0;
  for (const auto& b : per_trajectory) {
    b.validate();
    require(b.width() == d, ErrorCode::DimensionMismatch,
            "stack_trajectories: trajectories differ in operator width");
    rows += b.rows();
  }
  RegressionBundle out;
  out.data_matrix.resize(rows, d);
  out.z_tilde.resize(rows);
  Eigen::Index off = 0;
  for (const auto& b : per_trajectory) {
    out.data_matrix.middleRows(off, b.rows()) = b.data_matrix;
    out.z_tilde.segment(off, b.rows()) = b.z_tilde;
    out.w_sqrt_blocks.insert(out.w_sqrt_blocks.end(), b.w_sqrt_blocks.begin(), b.w_sqrt_blocks.end());
    off += b.rows();
  }
  return out;
}

RegressionBundle stack_modes_for_ode(const std::vector<ModeEstimate>& per_mode,
                                     const Eigen::MatrixXd& structure_rows) {
  require(!per_mode.empty(), ErrorCode::InvalidArgument, "stack_modes_for_ode: no modes");
  RegressionBundle out;
  Eigen::Index rows = 0;
  for (const auto& m : per_mode) {
    require(m.w_sqrt.rows() == m.z_tilde.size() && m.w_sqrt.cols() == m.z_tilde.size(),
            ErrorCode::DimensionMismatch, "stack_modes_for_ode: weight size differs from z");
    rows += m.z_tilde.size();
  }
  require(structure_rows.rows() == rows, ErrorCode::DimensionMismatch,
          "stack_modes_for_ode: structure rows differ from stacked derivative count");
  out.data_matrix = structure_rows;
  out.z_tilde.resize(rows);
  Eigen::Index off = 0;
  for (const auto& m : per_mode) {
    out.z_tilde.segment(off, m.z_tilde.size()) = m.z_tilde;
    out.w_sqrt_blocks.push_back(m.w_sqrt);
    off += m.z_tilde.size();
  }
  out.validate();
  return out;
}

Eigen::MatrixXd covariance_factor(const OperatorPosterior& posterior) {
  require(posterior.covariance.rows() == posterior.mean.size() &&
              posterior.covariance.cols() == posterior.mean.size(),
          ErrorCode::DimensionMismatch, "posterior: covariance shape differs from mean");
  Eigen::LLT<Eigen::MatrixXd> llt(posterior.covariance);
  require(llt.info() == Eigen::Success, ErrorCode::SingularSystem,
          "posterior: covariance is not positive definite");
  return llt.matrixL();
}

Eigen::MatrixXd sample_operator_matrix(const std::vector<OperatorPosterior>& posteriors,
                                       const std::vector<Eigen::MatrixXd>& factors,
                                       std::uint64_t seed) {
  require(!posteriors.empty() && posteriors.size() == factors.size(), ErrorCode::InvalidArgument,
          "sample_operator_matrix: need one factor per posterior");
  const Eigen::Index d = posteriors.front().mean.size();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd op(static_cast<Eigen::Index>(posteriors.size()), d);
  Eigen::VectorXd eps(d);
  for (std::size_t i = 0; i < posteriors.size(); ++i) {
    require(posteriors[i].mean.size() == d, ErrorCode::DimensionMismatch,
            "sample_operator_matrix: rows differ in width");
    for (Eigen::Index j = 0; j < d; ++j) eps[j] = normal(rng);
    op.row(static_cast<Eigen::Index>(i)) =
        (posteriors[i].mean + factors[i].triangularView<Eigen::Lower>() * eps).transpose();
  }
  return op;
}

Eigen::MatrixXd sample_operator_matrix(const std::vector<OperatorPosterior>& posteriors,
                                       std::uint64_t seed) {
  std::vector<Eigen::MatrixXd> factors;
  factors.reserve(posteriors.size());
  for (const auto& p : posteriors) factors.push_back(covariance_factor(p));
  return sample_operator_matrix(posteriors, factors, seed);
}

Eigen::MatrixXd mean_operator_matrix(const std::vector<OperatorPosterior>& posteriors) {
  require(!posteriors.empty(), ErrorCode::InvalidArgument, "mean_operator_matrix: no rows");
  Eigen::MatrixXd op(static_cast<Eigen::Index>(posteriors.size()), posteriors.front().mean.size());
  for (std::size_t i = 0; i < posteriors.size(); ++i)
    op.row(static_cast<Eigen::Index>(i)) = posteriors[i].mean.transpose();
  return op;
}

}  // namespace bayesrom::inference
