// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_MODELS_HPP
#define BAYESROM_MODELS_HPP

#include <array>

#include <Eigen/Dense>

namespace bayesrom::dynamics {

// ---------------------------------------------------------------- Euler ----
// Conservative state [rho; rho v; rho e], each block n_x entries on the
// periodic grid x_j = 2 j / n_x over [0, 2).

inline constexpr double kEulerGamma = 1.4;
inline constexpr double kEulerLength = 2.0;

Eigen::VectorXd euler_grid(int n_x);

/// -(F_j - F_{j-1}) / dx for the flux F = [rho v, rho v^2 + p, (rho e + p) v].
/// Throws NonphysicalState if any density is not positive.
Eigen::VectorXd euler_fom_rhs(const Eigen::VectorXd& q, double gamma_heat = kEulerGamma);

/// Periodic cubic spline through (x_k, values_k) with period `period`.
class PeriodicSpline {
 public:
  PeriodicSpline(const Eigen::VectorXd& knots, const Eigen::VectorXd& values, double period);
  double operator()(double x) const;
  double derivative(double x) const;

 private:
  Eigen::VectorXd x_, y_, m_;  // m_: second derivatives at the knots
  double period_;
  Eigen::Index locate(double& x) const;
};

/// Density and velocity splined through the three tabulated points, p = 1e5.
Eigen::VectorXd euler_initial_condition(int n_x, double gamma_heat = kEulerGamma);

/// (rho, rho v, rho e) -> (v, p, 1/rho), column by column. No scaling.
Eigen::MatrixXd lift_euler(const Eigen::MatrixXd& conservative, double gamma_heat = kEulerGamma);
Eigen::MatrixXd unlift_euler(const Eigen::MatrixXd& lifted, double gamma_heat = kEulerGamma);

/// Divides each of `n_blocks` equal row blocks by its own scale.
struct BlockScaling {
  Eigen::VectorXd scales;

  /// Scale = max |entry| of each block (1 if the block is zero).
  static BlockScaling max_abs(const Eigen::MatrixXd& data, int n_blocks);
  static BlockScaling identity(int n_blocks);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& data) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& data) const;
};

// ----------------------------------------------------------------- Heat ----
// Nodes x_j = j / (n_x - 1); the FOM state holds the n_x - 2 interior values,
// with q(0) = 0 and q(1) = 1 imposed.

inline constexpr double kHeatMu = 0.005;

Eigen::VectorXd heat_grid(int n_x);

double heat_source(double x, double t, double a, double b);

/// Time-dependent input components (a sin 2 pi t, b sin 4 pi t).
Eigen::Vector2d heat_input(double t, double a, double b);

double heat_initial(double x);

/// Central second differences with the boundary values folded in, minus s^3,
/// plus the source. `s` holds interior values only.
Eigen::VectorXd heat_fom_rhs(const Eigen::VectorXd& s, double t, int n_x, double mu, double a,
                             double b);

/// Interior state -> full nodal profile including the boundary values.
Eigen::VectorXd heat_with_boundary(const Eigen::VectorXd& interior);

/// Rows [s; s .* s].
Eigen::MatrixXd lift_heat(const Eigen::MatrixXd& s);

// ---------------------------------------------------------------- SEIRD ----

inline constexpr std::array<double, 4> kSeirdTruth = {0.25, 0.1, 0.095, 0.0025};
inline constexpr std::array<double, 5> kSeirdInitial = {0.994, 0.005, 0.001, 0.0, 0.0};

/// 5 x 4 matrix S(q) with dq/dt = S(q) o, o = (beta, delta, (1-alpha)gamma, alpha rho).
Eigen::MatrixXd seird_structure(const Eigen::VectorXd& q);
Eigen::VectorXd seird_rhs(const Eigen::VectorXd& q, const Eigen::VectorXd& params);

}  // namespace bayesrom::dynamics

#endif  // BAYESROM_MODELS_HPP
