// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_INFERENCE_HPP
#define BAYESROM_INFERENCE_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bayesrom/random.hpp"

namespace bayesrom::inference {

/// Diagonal of Gamma; the prior term in the regression is ||Gamma eta||^2.
struct PriorVariance {
  Eigen::VectorXd gamma;

  static PriorVariance scalar(double value, Eigen::Index d);
};

struct OperatorPosterior {
  Eigen::VectorXd mean;        // mu
  Eigen::MatrixXd covariance;  // Sigma
};

/// Arguments of one row's generalized least-squares problem. The weight
/// square root is block diagonal and kept as its blocks; the block sizes sum
/// to the row count of `data_matrix`.
struct RegressionBundle {
  Eigen::MatrixXd data_matrix;
  Eigen::VectorXd z_tilde;
  std::vector<Eigen::MatrixXd> w_sqrt_blocks;

  Eigen::Index rows() const { return data_matrix.rows(); }
  Eigen::Index width() const { return data_matrix.cols(); }
  Eigen::MatrixXd w_sqrt() const;  // dense block-diagonal assembly
  void validate() const;
};

/// W^{1/2} D reduced once by a QR factorization, so each new Gamma only needs
/// the (d + d) x d system [R0; Gamma].
struct PreparedRegression {
  Eigen::MatrixXd r0;  // min(rows, d) x d upper trapezoidal
  Eigen::VectorXd c0;  // leading entries of Q0^T W^{1/2} z
  Eigen::Index width = 0;
};

PreparedRegression prepare(const RegressionBundle& bundle);

/// Mean from the stacked least-squares problem
///   min ||W^{1/2}(D eta - z)||^2 + ||Gamma eta||^2
/// by orthogonal factorization; Sigma = (D^T W D + Gamma^T Gamma)^-1 from the
/// triangular factor. Throws SingularSystem if the stacked matrix is rank
/// deficient.
OperatorPosterior op_post(const PreparedRegression& prepared, const PriorVariance& gamma);
OperatorPosterior op_post(const RegressionBundle& bundle, const PriorVariance& gamma);

/// Row-wise op_post; errors name the failing row.
std::vector<OperatorPosterior> op_post_all(const std::vector<RegressionBundle>& bundles,
                                           const std::vector<PriorVariance>& gammas);
std::vector<OperatorPosterior> op_post_all(const std::vector<PreparedRegression>& prepared,
                                           const std::vector<PriorVariance>& gammas);

/// Row-stacks data matrices and derivative estimates; weights become block diagonal.
RegressionBundle stack_trajectories(const std::vector<RegressionBundle>& per_trajectory);

struct ModeEstimate {
  Eigen::VectorXd z_tilde;
  Eigen::MatrixXd w_sqrt;
};

/// One bundle for a parameter vector shared by all modes. `structure_rows`
/// holds the r*m' rows mode-major: all of mode 0's rows first.
RegressionBundle stack_modes_for_ode(const std::vector<ModeEstimate>& per_mode,
                                     const Eigen::MatrixXd& structure_rows);

/// Lower Cholesky factor of Sigma; throws SingularSystem if it is not positive definite.
Eigen::MatrixXd covariance_factor(const OperatorPosterior& posterior);

/// Row i ~ N(mu_i, Sigma_i), drawn in row order from one generator.
Eigen::MatrixXd sample_operator_matrix(const std::vector<OperatorPosterior>& posteriors,
                                       std::uint64_t seed);

/// Same, reusing precomputed Cholesky factors.
Eigen::MatrixXd sample_operator_matrix(const std::vector<OperatorPosterior>& posteriors,
                                       const std::vector<Eigen::MatrixXd>& factors,
                                       std::uint64_t seed);

/// Operator matrix whose rows are the posterior means.
Eigen::MatrixXd mean_operator_matrix(const std::vector<OperatorPosterior>& posteriors);

}  // namespace bayesrom::inference

#endif  // BAYESROM_INFERENCE_HPP
