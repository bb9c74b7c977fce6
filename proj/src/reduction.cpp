// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/reduction.hpp"

#include <sstream>

#include "bayesrom/error.hpp"

namespace bayesrom::reduction {

ReducedBasis pod_basis(const Eigen::MatrixXd& snapshots, Eigen::Index r) {
  const Eigen::Index n = snapshots.rows();
  const Eigen::Index k = snapshots.cols();
  require(n >= 1 && k >= 1, ErrorCode::InvalidArgument, "pod_basis: empty snapshot matrix");
  require(r >= 1 && r <= std::min(n, k), ErrorCode::InvalidArgument,
          "pod_basis: r must lie in [1, min(N, snapshots)]");
  require(snapshots.allFinite(), ErrorCode::InvalidArgument, "pod_basis: non-finite snapshots");

  ReducedBasis basis;
  basis.r = r;
  basis.q_bar = snapshots.rowwise().mean();
  const Eigen::MatrixXd centered = snapshots.colwise() - basis.q_bar;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  basis.singular_values = svd.singularValues();
  const double smax = basis.singular_values.size() ? basis.singular_values[0] : 0.0;
  Eigen::Index nonzero = 0;
  for (Eigen::Index i = 0; i < basis.singular_values.size(); ++i)
    if (basis.singular_values[i] > 1e-12 * smax && smax > 0.0) ++nonzero;
  if (nonzero < r) {
    std::ostringstream msg;
    msg << "pod_basis: only " << nonzero << " nonzero singular values, r=" << r;
    fail(ErrorCode::RankDeficient, msg.str());
  }

  basis.V = svd.matrixU().leftCols(r);
  for (Eigen::Index j = 0; j < r; ++j) {
    Eigen::Index imax = 0;
    basis.V.col(j).cwiseAbs().maxCoeff(&imax);
    if (basis.V(imax, j) < 0.0) basis.V.col(j) *= -1.0;
  }
  return basis;
}

ReducedBasis pod_basis(const std::vector<Eigen::MatrixXd>& trajectories, Eigen::Index r) {
  require(!trajectories.empty(), ErrorCode::InvalidArgument, "pod_basis: no trajectories");
  const Eigen::Index n = trajectories.front().rows();
  Eigen::Index total = 0;
  for (const auto& q : trajectories) {
    require(q.rows() == n, ErrorCode::DimensionMismatch,
            "pod_basis: trajectories differ in state dimension");
    total += q.cols();
  }
  Eigen::MatrixXd all(n, total);
  Eigen::Index col = 0;
  for (const auto& q : trajectories) {
    all.middleCols(col, q.cols()) = q;
    col += q.cols();
  }
  return pod_basis(all, r);
}

ReducedBasis identity_basis(Eigen::Index n) {
  require(n >= 1, ErrorCode::InvalidArgument, "identity_basis: n must be positive");
  ReducedBasis basis;
  basis.V = Eigen::MatrixXd::Identity(n, n);
  basis.q_bar = Eigen::VectorXd::Zero(n);
  basis.r = n;
  basis.singular_values = Eigen::VectorXd::Ones(n);
  return basis;
}

Eigen::MatrixXd compress(const ReducedBasis& basis, const Eigen::MatrixXd& snapshots) {
  require(snapshots.rows() == basis.V.rows(), ErrorCode::DimensionMismatch,
          "compress: snapshot rows differ from basis dimension");
  return basis.V.transpose() * (snapshots.colwise() - basis.q_bar);
}

Eigen::MatrixXd reconstruct(const ReducedBasis& basis, const Eigen::MatrixXd& reduced) {
  require(reduced.rows() == basis.r, ErrorCode::DimensionMismatch,
          "reconstruct: reduced rows differ from r");
  return (basis.V * reduced).colwise() + basis.q_bar;
}

Eigen::MatrixXd project(const ReducedBasis& basis, const Eigen::MatrixXd& snapshots) {
  return reconstruct(basis, compress(basis, snapshots));
}

}  // namespace bayesrom::reduction
