// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_STRUCTURE_HPP
#define BAYESROM_STRUCTURE_HPP

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace bayesrom::structure {

enum class Term { Constant, Linear, Quadratic, Input, Bilinear };

const char* term_name(Term term) noexcept;
/// "constant", "linear", "quadratic", "input", "bilinear"; throws Config otherwise.
Term term_from_name(std::string_view name);

/// Which polynomial terms the reduced model carries. Terms are stored in the
/// fixed data-vector order [Constant, Linear, Quadratic, Input, Bilinear]
/// whatever order they were given in.
class ModelStructure {
 public:
  ModelStructure() = default;
  ModelStructure(std::vector<Term> terms, Eigen::Index r, Eigen::Index p = 0);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  Eigen::Index r() const noexcept { return r_; }
  Eigen::Index p() const noexcept { return p_; }

  bool has(Term term) const noexcept;
  bool needs_inputs() const noexcept { return has(Term::Input) || has(Term::Bilinear); }
  Eigen::Index term_width(Term term) const noexcept;
  /// Column of the first entry of `term`, or -1 if absent.
  Eigen::Index offset(Term term) const noexcept;
  /// d(r, p).
  Eigen::Index width() const noexcept;

 private:
  std::vector<Term> terms_;
  Eigen::Index r_ = 0;
  Eigen::Index p_ = 0;
};

Eigen::Index operator_width(const ModelStructure& spec);

/// q_i q_j for i <= j, lexicographic; no scaling of the cross terms.
Eigen::VectorXd kron_compressed(const Eigen::VectorXd& q);

Eigen::VectorXd build_data_vector(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                                  const ModelStructure& spec);

/// Row j is build_data_vector(states[:,j], inputs[:,j]). `inputs` may be
/// empty (0 columns) when the structure has no input terms.
Eigen::MatrixXd build_data_matrix(const Eigen::MatrixXd& states, const Eigen::MatrixXd& inputs,
                                  const ModelStructure& spec);

/// op_matrix * d(q, u).
Eigen::VectorXd rom_rhs(const Eigen::MatrixXd& op_matrix, const Eigen::VectorXd& q,
                        const Eigen::VectorXd& u, const ModelStructure& spec);

/// S(q, u): maps a shared parameter vector to dq/dt.
using OdeStructureFn =
    std::function<Eigen::MatrixXd(const Eigen::VectorXd& q, const Eigen::VectorXd& u)>;

/// The right-hand-side family a sampled operator matrix plugs into: a
/// polynomial ROM (one operator row per mode) or, when `ode_structure` is
/// set, dq/dt = S(q, u) o with a single parameter row o.
struct ReducedModel {
  ModelStructure structure;
  OdeStructureFn ode_structure;
  Eigen::Index ode_state_dim = 0;
  Eigen::Index ode_param_dim = 0;

  bool is_ode() const noexcept { return static_cast<bool>(ode_structure); }
  Eigen::Index state_dim() const noexcept { return is_ode() ? ode_state_dim : structure.r(); }
  /// Number of independent operator rows in the posterior.
  Eigen::Index rows() const noexcept { return is_ode() ? 1 : structure.r(); }
  Eigen::Index width() const noexcept { return is_ode() ? ode_param_dim : structure.width(); }
  bool needs_inputs() const noexcept { return !is_ode() && structure.needs_inputs(); }

  Eigen::VectorXd rhs(const Eigen::MatrixXd& op_matrix, const Eigen::VectorXd& q,
                      const Eigen::VectorXd& u) const;
};

}  // namespace bayesrom::structure

#endif  // BAYESROM_STRUCTURE_HPP
