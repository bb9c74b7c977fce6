// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/structure.hpp"

#include <algorithm>
#include <array>

#include "bayesrom/error.hpp"

namespace bayesrom::structure {

namespace {
constexpr std::array<Term, 5> kOrder = {Term::Constant, Term::Linear, Term::Quadratic,
                                        Term::Input, Term::Bilinear};
}

const char* term_name(Term term) noexcept {
  switch (term) {
    case Term::Constant: return "constant";
    case Term::Linear: return "linear";
    case Term::Quadratic: return "quadratic";
    case Term::Input: return "input";
    case Term::Bilinear: return "bilinear";
  }
  return "?";
}

Term term_from_name(std::string_view name) {
  for (Term t : kOrder)
    if (name == term_name(t)) return t;
  fail(ErrorCode::Config, "unknown model term '" + std::string(name) + "'");
}

ModelStructure::ModelStructure(std::vector<Term> terms, Eigen::Index r, Eigen::Index p)
    : r_(r), p_(p) {
  require(r >= 1, ErrorCode::InvalidArgument, "ModelStructure: r must be >= 1");
  require(p >= 0, ErrorCode::InvalidArgument, "ModelStructure: p must be >= 0");
  require(!terms.empty(), ErrorCode::InvalidArgument, "ModelStructure: no terms");
  for (Term t : kOrder)
    if (std::find(terms.begin(), terms.end(), t) != terms.end()) terms_.push_back(t);
  if (needs_inputs())
    require(p >= 1, ErrorCode::InvalidArgument, "ModelStructure: input terms need p >= 1");
}

bool ModelStructure::has(Term term) const noexcept {
  return std::find(terms_.begin(), terms_.end(), term) != terms_.end();
}

Eigen::Index ModelStructure::term_width(Term term) const noexcept {
  switch (term) {
    case Term::Constant: return 1;
    case Term::Linear: return r_;
    case Term::Quadratic: return r_ * (r_ + 1) / 2;
    case Term::Input: return p_;
    case Term::Bilinear: return r_ * p_;
  }
  return 0;
}

Eigen::Index ModelStructure::offset(Term term) const noexcept {
  Eigen::Index off = 0;
  for (Term t : terms_) {
    if (t == term) return off;
    off += term_width(t);
  }
  return -1;
}

Eigen::Index ModelStructure::width() const noexcept {
  Eigen::Index d = 0;
  for (Term t : terms_) d += term_width(t);
  return d;
}

Eigen::Index operator_width(const ModelStructure& spec) { return spec.width(); }

Eigen::VectorXd kron_compressed(const Eigen::VectorXd& q) {
  const Eigen::Index r = q.size();
  Eigen::VectorXd out(r * (r + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = i; j < r; ++j) out[k++] = q[i] * q[j];
  return out;
}

namespace {

void fill_data_row(const Eigen::VectorXd& q, const Eigen::VectorXd& u, const ModelStructure& spec,
                   double* out) {
  const Eigen::Index r = spec.r();
  const Eigen::Index p = spec.p();
  Eigen::Index k = 0;
  for (Term t : spec.terms()) {
    switch (t) {
      case Term::Constant:
        out[k++] = 1.0;
        break;
      case Term::Linear:
        for (Eigen::Index i = 0; i < r; ++i) out[k++] = q[i];
        break;
      case Term::Quadratic:
        for (Eigen::Index i = 0; i < r; ++i)
          for (Eigen::Index j = i; j < r; ++j) out[k++] = q[i] * q[j];
        break;
      case Term::Input:
        for (Eigen::Index i = 0; i < p; ++i) out[k++] = u[i];
        break;
      case Term::Bilinear:
        for (Eigen::Index a = 0; a < p; ++a)
          for (Eigen::Index i = 0; i < r; ++i) out[k++] = u[a] * q[i];
        break;
    }
  }
}

void check_vector_dims(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                       const ModelStructure& spec) {
  require(q.size() == spec.r(), ErrorCode::DimensionMismatch, "data vector: state size differs from r");
  if (spec.needs_inputs()) {
    require(u.size() != 0, ErrorCode::MissingInputs, "data vector: structure needs inputs");
    require(u.size() == spec.p(), ErrorCode::DimensionMismatch, "data vector: input size differs from p");
  }
}

}  // namespace

Eigen::VectorXd build_data_vector(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                                  const ModelStructure& spec) {
  check_vector_dims(q, u, spec);
  Eigen::VectorXd out(spec.width());
  fill_data_row(q, u, spec, out.data());
  return out;
}

Eigen::MatrixXd build_data_matrix(const Eigen::MatrixXd& states, const Eigen::MatrixXd& inputs,
                                  const ModelStructure& spec) {
  require(states.rows() == spec.r(), ErrorCode::DimensionMismatch,
          "data matrix: state rows differ from r");
  if (spec.needs_inputs()) {
    require(inputs.cols() != 0, ErrorCode::MissingInputs, "data matrix: structure needs inputs");
    require(inputs.rows() == spec.p(), ErrorCode::DimensionMismatch,
            "data matrix: input rows differ from p");
    require(inputs.cols() == states.cols(), ErrorCode::DimensionMismatch,
            "data matrix: input and state column counts differ");
  }
  const Eigen::Index d = spec.width();
  // Fill row-major scratch then transpose so each row is written contiguously.
  Eigen::MatrixXd rows_t(d, states.cols());
  Eigen::VectorXd u_empty;
  for (Eigen::Index j = 0; j < states.cols(); ++j) {
    const Eigen::VectorXd q = states.col(j);
    const Eigen::VectorXd u = spec.needs_inputs() ? Eigen::VectorXd(inputs.col(j)) : u_empty;
    fill_data_row(q, u, spec, rows_t.col(j).data());
  }
  return rows_t.transpose();
}

Eigen::VectorXd rom_rhs(const Eigen::MatrixXd& op_matrix, const Eigen::VectorXd& q,
                        const Eigen::VectorXd& u, const ModelStructure& spec) {
  require(op_matrix.cols() == spec.width(), ErrorCode::DimensionMismatch,
          "rom_rhs: operator width differs from d(r,p)");
  require(op_matrix.rows() == spec.r(), ErrorCode::DimensionMismatch,
          "rom_rhs: operator rows differ from r");
  return op_matrix * build_data_vector(q, u, spec);
}

Eigen::VectorXd ReducedModel::rhs(const Eigen::MatrixXd& op_matrix, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& u) const {
  if (is_ode()) {
    require(op_matrix.rows() == 1 && op_matrix.cols() == ode_param_dim,
            ErrorCode::DimensionMismatch, "ode rhs: parameter row has wrong shape");
    return ode_structure(q, u) * op_matrix.row(0).transpose();
  }
  return rom_rhs(op_matrix, q, u, structure);
}

}  // namespace bayesrom::structure
