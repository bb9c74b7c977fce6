// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/models.hpp"

#include <cmath>
#include <numbers>

#include "bayesrom/error.hpp"

namespace bayesrom::dynamics {

Eigen::VectorXd euler_grid(int n_x) {
  require(n_x >= 3, ErrorCode::InvalidArgument, "euler_grid: n_x must be >= 3");
  Eigen::VectorXd x(n_x);
  for (int j = 0; j < n_x; ++j) x[j] = kEulerLength * j / n_x;
  return x;
}

Eigen::VectorXd euler_fom_rhs(const Eigen::VectorXd& q, double gamma_heat) {
  require(q.size() % 3 == 0 && q.size() >= 9, ErrorCode::DimensionMismatch,
          "euler_fom_rhs: state must hold three blocks of n_x >= 3");
  const Eigen::Index n = q.size() / 3;
  const double dx = kEulerLength / static_cast<double>(n);
  const auto rho = q.segment(0, n).array();
  const auto mom = q.segment(n, n).array();
  const auto ener = q.segment(2 * n, n).array();
  require((rho > 0.0).all(), ErrorCode::NonphysicalState, "euler_fom_rhs: non-positive density");

  const Eigen::ArrayXd v = mom / rho;
  const Eigen::ArrayXd p = (gamma_heat - 1.0) * (ener - 0.5 * mom * v);
  Eigen::ArrayXXd flux(n, 3);
  flux.col(0) = mom;
  flux.col(1) = mom * v + p;
  flux.col(2) = (ener + p) * v;

  Eigen::VectorXd dq(3 * n);
  for (int b = 0; b < 3; ++b) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index jm = (j == 0) ? n - 1 : j - 1;
      dq[b * n + j] = -(flux(j, b) - flux(jm, b)) / dx;
    }
  }
  return dq;
}

PeriodicSpline::PeriodicSpline(const Eigen::VectorXd& knots, const Eigen::VectorXd& values,
                               double period)
    : x_(knots), y_(values), period_(period) {
  const Eigen::Index n = knots.size();
  require(n >= 3 && values.size() == n, ErrorCode::InvalidArgument,
          "PeriodicSpline: need >= 3 knots with matching values");
  require(period > knots[n - 1] - knots[0], ErrorCode::InvalidArgument,
          "PeriodicSpline: period shorter than knot span");
  auto gap = [&](Eigen::Index i) {  // interval from knot i to knot i+1 (cyclic)
    return i + 1 < n ? x_[i + 1] - x_[i] : x_[0] + period_ - x_[n - 1];
  };
  // Cyclic tridiagonal system for the knot second derivatives.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index im = (i + n - 1) % n;
    const Eigen::Index ip = (i + 1) % n;
    const double hm = gap(im);
    const double hp = gap(i);
    a(i, im) += hm / 6.0;
    a(i, i) += (hm + hp) / 3.0;
    a(i, ip) += hp / 6.0;
    rhs[i] = (y_[ip] - y_[i]) / hp - (y_[i] - y_[im]) / hm;
  }
  m_ = a.partialPivLu().solve(rhs);
}

Eigen::Index PeriodicSpline::locate(double& x) const {
  x = x_[0] + std::fmod(x - x_[0], period_);
  if (x < x_[0]) x += period_;
  Eigen::Index i = x_.size() - 1;
  for (Eigen::Index k = 0; k + 1 < x_.size(); ++k)
    if (x < x_[k + 1]) {
      i = k;
      break;
    }
  return i;
}

double PeriodicSpline::operator()(double x) const {
  const Eigen::Index n = x_.size();
  const Eigen::Index i = locate(x);
  const Eigen::Index ip = (i + 1) % n;
  const double xr = i + 1 < n ? x_[i + 1] : x_[0] + period_;
  const double h = xr - x_[i];
  const double a = (xr - x) / h;
  const double b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[ip] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[ip]) * h * h / 6.0;
}

double PeriodicSpline::derivative(double x) const {
  const Eigen::Index n = x_.size();
  const Eigen::Index i = locate(x);
  const Eigen::Index ip = (i + 1) % n;
  const double xr = i + 1 < n ? x_[i + 1] : x_[0] + period_;
  const double h = xr - x_[i];
  const double a = (xr - x) / h;
  const double b = (x - x_[i]) / h;
  return (y_[ip] - y_[i]) / h + (-(3 * a * a - 1) * m_[i] + (3 * b * b - 1) * m_[ip]) * h / 6.0;
}

Eigen::VectorXd euler_initial_condition(int n_x, double gamma_heat) {
  require(n_x >= 6, ErrorCode::InvalidArgument, "euler_initial_condition: n_x must be >= 6");
  const Eigen::Vector3d knots(0.0, 2.0 / 3.0, 4.0 / 3.0);
  const PeriodicSpline rho(knots, Eigen::Vector3d(22.0, 20.0, 24.0), kEulerLength);
  const PeriodicSpline vel(knots, Eigen::Vector3d(95.0, 105.0, 100.0), kEulerLength);
  const double pressure = 1e5;
  const Eigen::VectorXd x = euler_grid(n_x);
  Eigen::VectorXd q(3 * n_x);
  for (int j = 0; j < n_x; ++j) {
    const double r = rho(x[j]);
    const double v = vel(x[j]);
    q[j] = r;
    q[n_x + j] = r * v;
    q[2 * n_x + j] = pressure / (gamma_heat - 1.0) + 0.5 * r * v * v;
  }
  return q;
}

Eigen::MatrixXd lift_euler(const Eigen::MatrixXd& conservative, double gamma_heat) {
  require(conservative.rows() % 3 == 0, ErrorCode::DimensionMismatch,
          "lift_euler: rows must hold three blocks");
  const Eigen::Index n = conservative.rows() / 3;
  const auto rho = conservative.topRows(n).array();
  require((rho > 0.0).all(), ErrorCode::NonphysicalState, "lift_euler: non-positive density");
  const auto mom = conservative.middleRows(n, n).array();
  const auto ener = conservative.bottomRows(n).array();
  Eigen::MatrixXd out(conservative.rows(), conservative.cols());
  const Eigen::ArrayXXd v = mom / rho;
  out.topRows(n) = v.matrix();
  out.middleRows(n, n) = ((gamma_heat - 1.0) * (ener - 0.5 * mom * v)).matrix();
  out.bottomRows(n) = rho.inverse().matrix();
  return out;
}

Eigen::MatrixXd unlift_euler(const Eigen::MatrixXd& lifted, double gamma_heat) {
  require(lifted.rows() % 3 == 0, ErrorCode::DimensionMismatch,
          "unlift_euler: rows must hold three blocks");
  const Eigen::Index n = lifted.rows() / 3;
  const auto v = lifted.topRows(n).array();
  const auto p = lifted.middleRows(n, n).array();
  const auto zeta = lifted.bottomRows(n).array();
  require((zeta > 0.0).all(), ErrorCode::NonphysicalState, "unlift_euler: non-positive specific volume");
  Eigen::MatrixXd out(lifted.rows(), lifted.cols());
  const Eigen::ArrayXXd rho = zeta.inverse();
  out.topRows(n) = rho.matrix();
  out.middleRows(n, n) = (rho * v).matrix();
  out.bottomRows(n) = (p / (gamma_heat - 1.0) + 0.5 * rho * v * v).matrix();
  return out;
}

BlockScaling BlockScaling::max_abs(const Eigen::MatrixXd& data, int n_blocks) {
  require(n_blocks >= 1 && data.rows() % n_blocks == 0, ErrorCode::DimensionMismatch,
          "BlockScaling: rows not divisible into blocks");
  const Eigen::Index n = data.rows() / n_blocks;
  BlockScaling s;
  s.scales.resize(n_blocks);
  for (int b = 0; b < n_blocks; ++b) {
    const double m = data.middleRows(b * n, n).cwiseAbs().maxCoeff();
    s.scales[b] = m > 0.0 ? m : 1.0;
  }
  return s;
}

BlockScaling BlockScaling::identity(int n_blocks) {
  return BlockScaling{Eigen::VectorXd::Ones(n_blocks)};
}

Eigen::MatrixXd BlockScaling::apply(const Eigen::MatrixXd& data) const {
  const Eigen::Index nb = scales.size();
  require(nb >= 1 && data.rows() % nb == 0, ErrorCode::DimensionMismatch,
          "BlockScaling: rows not divisible into blocks");
  const Eigen::Index n = data.rows() / nb;
  Eigen::MatrixXd out = data;
  for (Eigen::Index b = 0; b < nb; ++b) out.middleRows(b * n, n) /= scales[b];
  return out;
}

Eigen::MatrixXd BlockScaling::invert(const Eigen::MatrixXd& data) const {
  const Eigen::Index nb = scales.size();
  require(nb >= 1 && data.rows() % nb == 0, ErrorCode::DimensionMismatch,
          "BlockScaling: rows not divisible into blocks");
  const Eigen::Index n = data.rows() / nb;
  Eigen::MatrixXd out = data;
  for (Eigen::Index b = 0; b < nb; ++b) out.middleRows(b * n, n) *= scales[b];
  return out;
}

Eigen::VectorXd heat_grid(int n_x) {
  require(n_x >= 3, ErrorCode::InvalidArgument, "heat_grid: n_x must be >= 3");
  return Eigen::VectorXd::LinSpaced(n_x, 0.0, 1.0);
}

double heat_source(double x, double t, double a, double b) {
  const double pi = std::numbers::pi;
  return a * std::sin(2.0 * pi * t) / (1.0 + 100.0 * (x - 0.25) * (x - 0.25)) +
         b * std::sin(4.0 * pi * t) / (1.0 + 100.0 * (x - 0.75) * (x - 0.75));
}

Eigen::Vector2d heat_input(double t, double a, double b) {
  const double pi = std::numbers::pi;
  return {a * std::sin(2.0 * pi * t), b * std::sin(4.0 * pi * t)};
}

double heat_initial(double x) {
  return x * (1.0 - x) * (6.0 * (1.0 - x) * (1.0 - x) * std::exp(-x) - 10.0 * std::exp(x) * std::sin(x / 6.0)) + x;
}

Eigen::VectorXd heat_fom_rhs(const Eigen::VectorXd& s, double t, int n_x, double mu, double a,
                             double b) {
  require(n_x >= 3 && s.size() == n_x - 2, ErrorCode::DimensionMismatch,
          "heat_fom_rhs: state must hold the n_x - 2 interior values");
  const Eigen::Index n = s.size();
  const double dx = 1.0 / (n_x - 1);
  const double inv_dx2 = 1.0 / (dx * dx);
  Eigen::VectorXd ds(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double left = i == 0 ? 0.0 : s[i - 1];
    const double right = i + 1 == n ? 1.0 : s[i + 1];
    const double x = (i + 1) * dx;
    ds[i] = mu * (left - 2.0 * s[i] + right) * inv_dx2 - s[i] * s[i] * s[i] + heat_source(x, t, a, b);
  }
  return ds;
}

Eigen::VectorXd heat_with_boundary(const Eigen::VectorXd& interior) {
  Eigen::VectorXd full(interior.size() + 2);
  full[0] = 0.0;
  full.segment(1, interior.size()) = interior;
  full[interior.size() + 1] = 1.0;
  return full;
}

Eigen::MatrixXd lift_heat(const Eigen::MatrixXd& s) {
  Eigen::MatrixXd out(2 * s.rows(), s.cols());
  out.topRows(s.rows()) = s;
  out.bottomRows(s.rows()) = s.array().square().matrix();
  return out;
}

Eigen::MatrixXd seird_structure(const Eigen::VectorXd& q) {
  require(q.size() == 5, ErrorCode::DimensionMismatch, "seird_structure: state must have 5 entries");
  const double s = q[0], e = q[1], i = q[2];
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 4);
  m(0, 0) = -s * i;
  m(1, 0) = s * i;
  m(1, 1) = -e;
  m(2, 1) = e;
  m(2, 2) = -i;
  m(2, 3) = -i;
  m(3, 2) = i;
  m(4, 3) = i;
  return m;
}

Eigen::VectorXd seird_rhs(const Eigen::VectorXd& q, const Eigen::VectorXd& params) {
  require(params.size() == 4, ErrorCode::DimensionMismatch, "seird_rhs: need 4 parameters");
  return seird_structure(q) * params;
}

}  // namespace bayesrom::dynamics
