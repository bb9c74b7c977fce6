// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <doctest.h>

#include "bayesrom/error.hpp"
#include "bayesrom/inference.hpp"

using namespace bayesrom;
using namespace bayesrom::inference;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Problem {
  RegressionBundle bundle;
  MatrixXd w;  // full weight matrix
};

Problem random_problem(Eigen::Index m, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Problem p;
  p.bundle.data_matrix.resize(m, d);
  p.bundle.z_tilde.resize(m);
  MatrixXd g(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    p.bundle.z_tilde[i] = n(rng);
    for (Eigen::Index j = 0; j < d; ++j) p.bundle.data_matrix(i, j) = n(rng);
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = n(rng);
  }
  const MatrixXd q = Eigen::HouseholderQR<MatrixXd>(g).householderQ();
  VectorXd s(m);
  for (Eigen::Index i = 0; i < m; ++i) s[i] = u(rng);
  const MatrixXd ws = q * s.asDiagonal() * q.transpose();
  p.bundle.w_sqrt_blocks = {ws};
  p.w = ws * ws;
  return p;
}

MatrixXd gram(const Problem& p, const VectorXd& gamma) {
  const MatrixXd& dm = p.bundle.data_matrix;
  return dm.transpose() * p.w * dm + MatrixXd(gamma.array().square().matrix().asDiagonal());
}

}  // namespace

TEST_CASE("identity regression") {
  RegressionBundle b;
  b.data_matrix = MatrixXd::Identity(4, 4);
  b.z_tilde = VectorXd::LinSpaced(4, 1.0, 4.0);
  b.w_sqrt_blocks = {MatrixXd::Identity(4, 4)};
  const OperatorPosterior p = op_post(b, PriorVariance::scalar(0.0, 4));
  CHECK((p.mean - b.z_tilde).norm() <= 1e-14);
  CHECK((p.covariance - MatrixXd::Identity(4, 4)).norm() <= 1e-14);
}

TEST_CASE("strong prior shrinks the mean to zero") {
  const Problem p = random_problem(12, 5, 1);
  const OperatorPosterior post = op_post(p.bundle, PriorVariance::scalar(1e8, 5));
  CHECK(post.mean.norm() <= 1e-6 * p.bundle.z_tilde.norm());
}

TEST_CASE("mean and covariance agree with the normal equations") {
  const Problem p = random_problem(12, 5, 2);
  const VectorXd gamma = VectorXd::Constant(5, 0.3);
  const OperatorPosterior post = op_post(p.bundle, {gamma});
  const MatrixXd a = gram(p, gamma);
  const MatrixXd& dm = p.bundle.data_matrix;
  const VectorXd oracle = a.fullPivLu().solve(dm.transpose() * p.w * p.bundle.z_tilde);
  CHECK((post.mean - oracle).norm() <= 1e-8 * oracle.norm());
  CHECK((post.covariance * a - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-8);
  const VectorXd via_sigma = post.covariance * dm.transpose() * p.w * p.bundle.z_tilde;
  CHECK((post.mean - via_sigma).norm() <= 1e-8 * oracle.norm());
  // Gradient of the regularized objective vanishes at the mean.
  const VectorXd grad = dm.transpose() * p.w * (dm * post.mean - p.bundle.z_tilde) +
                        gamma.array().square().matrix().asDiagonal() * post.mean;
  CHECK(grad.norm() <= 1e-8 * (dm.transpose() * p.w * p.bundle.z_tilde).norm());
  CHECK((post.covariance - post.covariance.transpose()).norm() == 0.0);
}

TEST_CASE("prepared and direct solves match") {
  const Problem p = random_problem(20, 6, 3);
  const PreparedRegression prep = prepare(p.bundle);
  const auto g = PriorVariance::scalar(0.7, 6);
  const OperatorPosterior a = op_post(prep, g);
  const OperatorPosterior b = op_post(p.bundle, g);
  CHECK(a.mean == b.mean);
  CHECK(a.covariance == b.covariance);
}

TEST_CASE("rank deficiency without a prior is an error") {
  Problem p = random_problem(10, 4, 4);
  p.bundle.data_matrix.col(3) = p.bundle.data_matrix.col(0);
  CHECK_THROWS_AS(op_post(p.bundle, PriorVariance::scalar(0.0, 4)), Error);
  try {
    op_post(p.bundle, PriorVariance::scalar(0.0, 4));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularSystem);
  }
  CHECK_NOTHROW(op_post(p.bundle, PriorVariance::scalar(1e-3, 4)));
  CHECK_THROWS_AS(op_post(p.bundle, PriorVariance::scalar(1.0, 3)), Error);
}

TEST_CASE("row-wise posteriors") {
  const Problem a = random_problem(9, 3, 5);
  const Problem b = random_problem(9, 3, 6);
  const auto g = PriorVariance::scalar(0.2, 3);
  const auto one = op_post_all(std::vector<RegressionBundle>{a.bundle}, {g});
  CHECK(one.front().mean == op_post(a.bundle, g).mean);
  const auto dup = op_post_all(std::vector<RegressionBundle>{a.bundle, a.bundle}, {g, g});
  CHECK(dup[0].mean == dup[1].mean);
  const auto ab = op_post_all(std::vector<RegressionBundle>{a.bundle, b.bundle}, {g, g});
  const auto ba = op_post_all(std::vector<RegressionBundle>{b.bundle, a.bundle}, {g, g});
  CHECK(ab[0].mean == ba[1].mean);
  CHECK(ab[1].covariance == ba[0].covariance);
  // Perturbing one row leaves the other untouched.
  Problem c = b;
  c.bundle.z_tilde[0] += 1.0;
  const auto ac = op_post_all(std::vector<RegressionBundle>{a.bundle, c.bundle}, {g, g});
  CHECK(ac[0].mean == ab[0].mean);
  CHECK(ac[0].covariance == ab[0].covariance);
}

TEST_CASE("stacking trajectories") {
  const Problem a = random_problem(8, 3, 7);
  const Problem b = random_problem(6, 3, 8);
  const RegressionBundle single = stack_trajectories({a.bundle});
  CHECK(single.data_matrix == a.bundle.data_matrix);
  CHECK(single.z_tilde == a.bundle.z_tilde);
  CHECK(single.w_sqrt() == a.bundle.w_sqrt());

  const RegressionBundle s = stack_trajectories({a.bundle, b.bundle});
  CHECK(s.rows() == 14);
  const MatrixXd w = s.w_sqrt() * s.w_sqrt();
  CHECK((w.topLeftCorner(8, 8) - a.w).norm() <= 1e-12);
  CHECK((w.bottomRightCorner(6, 6) - b.w).norm() <= 1e-12);
  CHECK(w.topRightCorner(8, 6).isZero());

  // Objective of the stack is the sum of the per-trajectory objectives.
  const VectorXd eta = VectorXd::LinSpaced(3, -1.0, 0.5);
  auto objective = [&eta](const RegressionBundle& bb) {
    return (bb.w_sqrt() * (bb.data_matrix * eta - bb.z_tilde)).squaredNorm();
  };
  CHECK(objective(s) == doctest::Approx(objective(a.bundle) + objective(b.bundle)).epsilon(1e-12));
}

TEST_CASE("shared parameters across modes") {
  const MatrixXd rows = MatrixXd::Random(10, 2);
  std::vector<ModeEstimate> one{{VectorXd::Random(10), MatrixXd::Identity(10, 10)}};
  const RegressionBundle b = stack_modes_for_ode(one, rows);
  CHECK(b.data_matrix == rows);
  CHECK(b.z_tilde == one[0].z_tilde);

  std::vector<ModeEstimate> zero{{VectorXd::Zero(5), MatrixXd::Identity(5, 5)},
                                 {VectorXd::Zero(5), 2.0 * MatrixXd::Identity(5, 5)}};
  const OperatorPosterior p = op_post(stack_modes_for_ode(zero, rows), PriorVariance::scalar(0.1, 2));
  CHECK(p.mean.isZero());
}

TEST_CASE("operator sampling") {
  OperatorPosterior tiny{VectorXd::LinSpaced(3, 1.0, 3.0), 1e-20 * MatrixXd::Identity(3, 3)};
  const MatrixXd s = sample_operator_matrix({tiny, tiny}, 4);
  CHECK((s.row(0).transpose() - tiny.mean).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(mean_operator_matrix({tiny, tiny}).row(1).transpose() == tiny.mean);

  MatrixXd l(3, 3);
  l << 1.0, 0.0, 0.0, 0.5, 0.8, 0.0, -0.3, 0.2, 0.6;
  const OperatorPosterior p{VectorXd::LinSpaced(3, -1.0, 1.0), l * l.transpose()};
  const int n = 10000;
  MatrixXd draws(3, n);
  for (int k = 0; k < n; ++k) draws.col(k) = sample_operator_matrix({p}, static_cast<std::uint64_t>(k)).row(0).transpose();
  const VectorXd mean = draws.rowwise().mean();
  const double tol = 4.0 * std::sqrt(p.covariance.diagonal().maxCoeff() / n);
  CHECK((mean - p.mean).cwiseAbs().maxCoeff() <= tol);
  const MatrixXd centered = draws.colwise() - mean;
  const MatrixXd cov = centered * centered.transpose() / (n - 1);
  CHECK((cov - p.covariance).norm() <= 0.1 * p.covariance.norm());

  CHECK(sample_operator_matrix({p}, 9) == sample_operator_matrix({p}, 9));
  CHECK(sample_operator_matrix({p}, 9) != sample_operator_matrix({p}, 10));
}
