// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <doctest.h>

#include "bayesrom/error.hpp"
#include "bayesrom/structure.hpp"

using namespace bayesrom::structure;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("compressed quadratic terms") {
  CHECK(kron_compressed(vec({1, 2})) == vec({1, 2, 4}));
  CHECK(kron_compressed(VectorXd::Zero(3)).isZero());
  VectorXd e = VectorXd::Zero(3);
  e[1] = 1.0;
  CHECK(kron_compressed(e) == vec({0, 0, 0, 1, 0, 0}));

  // Every entry of the full Kronecker product appears in the compressed form.
  const VectorXd q = vec({0.3, -1.2, 2.5});
  const VectorXd c = kron_compressed(q);
  for (Eigen::Index a = 0; a < 3; ++a)
    for (Eigen::Index b = 0; b < 3; ++b) {
      bool found = false;
      for (Eigen::Index j = 0; j < c.size(); ++j) found = found || c[j] == q[a] * q[b];
      CHECK(found);
    }
}

TEST_CASE("data vector layouts") {
  CHECK(build_data_vector(vec({1, 2}), VectorXd(), ModelStructure({Term::Constant, Term::Linear}, 2)) ==
        vec({1, 1, 2}));
  CHECK(build_data_vector(vec({1, 2}), VectorXd(),
                          ModelStructure({Term::Constant, Term::Linear, Term::Quadratic}, 2)) ==
        vec({1, 1, 2, 1, 2, 4}));
  CHECK(build_data_vector(vec({1, 2}), vec({3}), ModelStructure({Term::Linear, Term::Input, Term::Bilinear}, 2, 1)) ==
        vec({1, 2, 3, 3, 6}));
  // Term order in the declaration does not matter.
  CHECK(build_data_vector(vec({1, 2}), VectorXd(), ModelStructure({Term::Quadratic, Term::Constant}, 2)) ==
        vec({1, 1, 2, 4}));
  // u-major bilinear block.
  CHECK(build_data_vector(vec({1, 2}), vec({3, 5}), ModelStructure({Term::Bilinear}, 2, 2)) == vec({3, 6, 5, 10}));
}

TEST_CASE("widths") {
  const Eigen::Index r = 6;
  CHECK(ModelStructure({Term::Constant, Term::Linear, Term::Quadratic}, r).width() == 1 + r + r * (r + 1) / 2);
  const ModelStructure heat({Term::Constant, Term::Linear, Term::Quadratic, Term::Input, Term::Bilinear}, 5, 2);
  CHECK(operator_width(heat) == 1 + 5 + 15 + 2 + 10);
  CHECK(heat.offset(Term::Input) == 21);
  CHECK(heat.offset(Term::Bilinear) == 23);
  CHECK(ModelStructure({Term::Linear}, 3).offset(Term::Quadratic) == -1);
}

TEST_CASE("data matrix is row-wise data vectors") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  const ModelStructure s({Term::Constant, Term::Linear, Term::Quadratic, Term::Input, Term::Bilinear}, 3, 2);
  MatrixXd q(3, 7), u(2, 7);
  for (Eigen::Index j = 0; j < 7; ++j) {
    for (int i = 0; i < 3; ++i) q(i, j) = n(rng);
    for (int i = 0; i < 2; ++i) u(i, j) = n(rng);
  }
  const MatrixXd d = build_data_matrix(q, u, s);
  for (Eigen::Index j = 0; j < 7; ++j) CHECK(d.row(j).transpose() == build_data_vector(q.col(j), u.col(j), s));

  // Permuting snapshots permutes rows.
  MatrixXd qp = q, up = u;
  qp.col(0).swap(qp.col(4));
  up.col(0).swap(up.col(4));
  const MatrixXd dp = build_data_matrix(qp, up, s);
  CHECK(dp.row(0) == d.row(4));
  CHECK(dp.row(4) == d.row(0));

  const ModelStructure cq({Term::Constant, Term::Linear, Term::Quadratic}, 3);
  const MatrixXd dz = build_data_matrix(MatrixXd::Zero(3, 4), MatrixXd(), cq);
  CHECK(dz.col(0).isOnes());
  CHECK(dz.rightCols(dz.cols() - 1).isZero());
  CHECK_THROWS_AS(build_data_matrix(q, MatrixXd(), s), bayesrom::Error);
}

TEST_CASE("reduced right-hand side") {
  const ModelStructure s({Term::Constant, Term::Linear, Term::Quadratic}, 1);
  CHECK(rom_rhs(vec({1, -2, 0.5}).transpose(), vec({3}), VectorXd(), s)[0] == doctest::Approx(-0.5));
  const ModelStructure lin({Term::Constant, Term::Linear, Term::Quadratic}, 3);
  MatrixXd op = MatrixXd::Zero(3, lin.width());
  op.block(0, 1, 3, 3).setIdentity();
  const VectorXd q = vec({0.5, -1.0, 2.0});
  CHECK(rom_rhs(op, q, VectorXd(), lin) == q);
  CHECK(rom_rhs(MatrixXd::Zero(3, lin.width()), q, VectorXd(), lin).isZero());
}

TEST_CASE("term names") {
  for (Term t : {Term::Constant, Term::Linear, Term::Quadratic, Term::Input, Term::Bilinear})
    CHECK(term_from_name(term_name(t)) == t);
  CHECK_THROWS_AS(term_from_name("cubic"), bayesrom::Error);
}
