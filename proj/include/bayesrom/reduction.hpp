// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_REDUCTION_HPP
#define BAYESROM_REDUCTION_HPP

#include <vector>

#include <Eigen/Dense>

namespace bayesrom::reduction {

/// q ~ V q_hat + q_bar.
struct ReducedBasis {
  Eigen::MatrixXd V;                // N x r, orthonormal columns
  Eigen::VectorXd q_bar;            // N
  Eigen::Index r = 0;
  Eigen::VectorXd singular_values;  // all of them, nonincreasing

  Eigen::Index full_dim() const { return V.rows(); }
};

/// POD of the mean-centered snapshots. Each basis vector is oriented so its
/// largest-magnitude entry is positive. Throws RankDeficient when fewer than r
/// singular values exceed 1e-12 * sigma_max.
ReducedBasis pod_basis(const Eigen::MatrixXd& snapshots, Eigen::Index r);

/// Global basis over the column concatenation of several trajectories.
ReducedBasis pod_basis(const std::vector<Eigen::MatrixXd>& trajectories, Eigen::Index r);

/// V = I, q_bar = 0: the reduced coordinates are the full state.
ReducedBasis identity_basis(Eigen::Index n);

/// V^T (snapshots - q_bar 1^T).
Eigen::MatrixXd compress(const ReducedBasis& basis, const Eigen::MatrixXd& snapshots);

/// V reduced + q_bar 1^T.
Eigen::MatrixXd reconstruct(const ReducedBasis& basis, const Eigen::MatrixXd& reduced);

/// reconstruct(compress(snapshots)).
Eigen::MatrixXd project(const ReducedBasis& basis, const Eigen::MatrixXd& snapshots);

}  // namespace bayesrom::reduction

#endif  // BAYESROM_REDUCTION_HPP
