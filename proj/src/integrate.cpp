// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bayesrom/error.hpp"

namespace bayesrom::dynamics {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output (Hairer, Norsett & Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

void check_request(const Eigen::VectorXd& q0, double t0, double t1,
                   const Eigen::VectorXd& output_times) {
  require(t1 >= t0, ErrorCode::InvalidArgument, "integrate: t1 < t0");
  require(q0.size() >= 1 && q0.allFinite(), ErrorCode::InvalidArgument,
          "integrate: initial state empty or non-finite");
  const double slack = 1e-12 * std::max(1.0, std::abs(t1));
  for (Eigen::Index k = 0; k < output_times.size(); ++k) {
    require(output_times[k] >= t0 - slack && output_times[k] <= t1 + slack,
            ErrorCode::InvalidArgument, "integrate: output time outside the span");
    if (k > 0)
      require(output_times[k] >= output_times[k - 1], ErrorCode::InvalidArgument,
              "integrate: output times must be nondecreasing");
  }
}

Trajectory make_output(const Eigen::VectorXd& output_times, Eigen::Index n) {
  Trajectory out;
  out.times = output_times;
  out.states = Eigen::MatrixXd::Constant(n, output_times.size(),
                                         std::numeric_limits<double>::quiet_NaN());
  return out;
}

bool exceeds(const Eigen::VectorXd& q, double bound) {
  return !(q.cwiseAbs().maxCoeff() <= bound);
}

double rms_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0, const Eigen::VectorXd& y1,
                double atol, double rtol) {
  const Eigen::ArrayXd scale = atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array();
  return std::sqrt((err.array() / scale).square().mean());
}

}  // namespace

Trajectory integrate_rk45(const RhsFn& rhs, const Eigen::VectorXd& q0, double t0, double t1,
                          const Eigen::VectorXd& output_times, const Rk45Options& options,
                          IntegrationStats* stats) {
  check_request(q0, t0, t1, output_times);
  require(options.rtol > 0.0 && options.atol > 0.0, ErrorCode::InvalidArgument,
          "integrate_rk45: tolerances must be positive");
  IntegrationStats local;
  IntegrationStats& st = stats ? *stats : local;
  st = IntegrationStats{};

  const Eigen::Index n = q0.size();
  Trajectory out = make_output(output_times, n);
  Eigen::Index next_out = 0;
  const Eigen::Index n_out = output_times.size();

  double t = t0;
  Eigen::VectorXd y = q0;
  Eigen::VectorXd k1 = rhs(t, y);
  ++st.rhs_evaluations;
  require(k1.size() == n, ErrorCode::DimensionMismatch, "integrate_rk45: rhs returned wrong size");
  if (!k1.allFinite()) fail(ErrorCode::StepSizeUnderflow, "integrate_rk45: rhs non-finite at t0");

  while (next_out < n_out && output_times[next_out] <= t0) out.states.col(next_out++) = y;
  st.t_reached = t;
  if (exceeds(y, options.max_abs_bound)) {
    st.bound_exceeded = true;
    return out;
  }
  if (t1 == t0) return out;

  const bool fixed = options.fixed_step > 0.0;
  double h;
  if (fixed) {
    h = options.fixed_step;
  } else if (options.first_step > 0.0) {
    h = options.first_step;
  } else {
    // Initial step heuristic (Hairer, Norsett & Wanner).
    const Eigen::ArrayXd sc = options.atol + options.rtol * y.cwiseAbs().array();
    const double dn0 = std::sqrt((y.array() / sc).square().mean());
    const double dn1 = std::sqrt((k1.array() / sc).square().mean());
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h0 = std::min(h0, t1 - t0);
    const Eigen::VectorXd y1 = y + h0 * k1;
    const Eigen::VectorXd f1 = rhs(t + h0, y1);
    ++st.rhs_evaluations;
    const double dn2 = std::sqrt(((f1 - k1).array() / sc).square().mean()) / h0;
    const double h1 = (std::max(dn1, dn2) <= 1e-15)
                          ? std::max(1e-6, h0 * 1e-3)
                          : std::pow(0.01 / std::max(dn1, dn2), 1.0 / 5.0);
    h = std::min(100.0 * h0, h1);
    if (!std::isfinite(h) || h <= 0.0) h = 1e-6 * (t1 - t0);
  }
  h = std::min({h, options.max_step, t1 - t0});

  Eigen::VectorXd k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  bool last_rejected = false;
  while (t < t1) {
    if (st.steps + st.rejected >= options.max_steps) {
      std::ostringstream msg;
      msg << "integrate_rk45: step limit reached at t=" << t;
      fail(ErrorCode::StepSizeUnderflow, msg.str());
    }
    const double min_h = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < min_h && !fixed) {
      std::ostringstream msg;
      msg << "integrate_rk45: step size underflow at t=" << t;
      fail(ErrorCode::StepSizeUnderflow, msg.str());
    }
    bool final_step = false;
    if (t + h >= t1 || (fixed && t + h > t1 - 1e-12 * std::abs(t1))) {
      h = t1 - t;
      final_step = true;
    }

    ytmp = y + h * a21 * k1;
    k2 = rhs(t + c2 * h, ytmp);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    k3 = rhs(t + c3 * h, ytmp);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    k4 = rhs(t + c4 * h, ytmp);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    k5 = rhs(t + c5 * h, ytmp);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    k6 = rhs(t + h, ytmp);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    k7 = rhs(t + h, ynew);
    st.rhs_evaluations += 6;

    const bool finite = ynew.allFinite() && k7.allFinite();
    double err_norm = 0.0;
    if (!fixed) {
      if (finite) {
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        err_norm = rms_norm(err, y, ynew, options.atol, options.rtol);
      } else {
        err_norm = std::numeric_limits<double>::infinity();
      }
      if (!(err_norm <= 1.0)) {
        ++st.rejected;
        const double factor =
            std::isfinite(err_norm) ? std::max(0.2, 0.9 * std::pow(err_norm, -0.2)) : 0.2;
        h *= std::min(1.0, factor);
        last_rejected = true;
        continue;
      }
    } else if (!finite) {
      fail(ErrorCode::StepSizeUnderflow, "integrate_rk45: non-finite state in fixed-step mode");
    }

    // Accepted step: emit dense output for times in (t, t + h].
    const double t_new = final_step ? t1 : t + h;
    if (next_out < n_out && output_times[next_out] <= t_new) {
      const Eigen::VectorXd ydiff = ynew - y;
      const Eigen::VectorXd bspl = h * k1 - ydiff;
      const Eigen::VectorXd rc4 = ydiff - h * k7 - bspl;
      const Eigen::VectorXd rc5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      while (next_out < n_out && output_times[next_out] <= t_new) {
        const double theta = std::clamp((output_times[next_out] - t) / h, 0.0, 1.0);
        const double theta1 = 1.0 - theta;
        out.states.col(next_out++) =
            y + theta * (ydiff + theta1 * (bspl + theta * (rc4 + theta1 * rc5)));
      }
    }
    ++st.steps;
    t = t_new;
    y = ynew;
    k1 = k7;
    st.t_reached = t;
    if (exceeds(y, options.max_abs_bound)) {
      st.bound_exceeded = true;
      return out;
    }
    if (final_step) break;
    if (!fixed) {
      double factor = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 10.0;
      factor = std::clamp(factor, 0.2, last_rejected ? 1.0 : 10.0);
      h = std::min(h * factor, options.max_step);
      last_rejected = false;
    }
  }
  while (next_out < n_out) out.states.col(next_out++) = y;
  return out;
}

Trajectory integrate_implicit(const RhsFn& rhs, const Eigen::VectorXd& q0, double t0, double t1,
                              const Eigen::VectorXd& output_times, const ImplicitOptions& options,
                              IntegrationStats* stats) {
  check_request(q0, t0, t1, output_times);
  require(options.step > 0.0, ErrorCode::InvalidArgument, "integrate_implicit: step must be positive");
  IntegrationStats local;
  IntegrationStats& st = stats ? *stats : local;
  st = IntegrationStats{};

  const Eigen::Index n = q0.size();
  Trajectory out = make_output(output_times, n);
  Eigen::Index next_out = 0;
  const Eigen::Index n_out = output_times.size();

  double t = t0;
  Eigen::VectorXd y = q0;
  Eigen::VectorXd f = rhs(t, y);
  ++st.rhs_evaluations;
  require(f.size() == n, ErrorCode::DimensionMismatch, "integrate_implicit: rhs returned wrong size");
  while (next_out < n_out && output_times[next_out] <= t0) out.states.col(next_out++) = y;
  st.t_reached = t;
  if (exceeds(y, options.max_abs_bound)) {
    st.bound_exceeded = true;
    return out;
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  bool have_jacobian = false;
  double jac_h = 0.0;

  auto refresh_jacobian = [&](double tt, const Eigen::VectorXd& x, const Eigen::VectorXd& fx,
                              double h) {
    Eigen::MatrixXd jac(n, n);
    Eigen::VectorXd xp = x;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dx = options.fd_relative_step * std::max(1.0, std::abs(x[j]));
      xp[j] = x[j] + dx;
      jac.col(j) = (rhs(tt, xp) - fx) / dx;
      xp[j] = x[j];
    }
    st.rhs_evaluations += n;
    ++st.jacobian_updates;
    Eigen::MatrixXd g = -0.5 * h * jac;
    g.diagonal().array() += 1.0;
    lu.compute(g);
    have_jacobian = true;
    jac_h = h;
  };

  // Solves x - y - h/2 (f + rhs(t+h, x)) = 0 starting from an explicit guess.
  auto newton = [&](double h, Eigen::VectorXd& x, Eigen::VectorXd& fx) -> bool {
    const double t_new = t + h;
    x = y + h * f;
    fx = rhs(t_new, x);
    ++st.rhs_evaluations;
    if (!x.allFinite() || !fx.allFinite()) {
      x = y;
      fx = rhs(t_new, x);
      ++st.rhs_evaluations;
    }
    Eigen::VectorXd res = x - y - 0.5 * h * (f + fx);
    double res_norm = res.norm();
    for (int it = 0; it < options.max_newton_iterations; ++it) {
      const Eigen::VectorXd delta = lu.solve(-res);
      if (!delta.allFinite()) return false;
      double lambda = 1.0;
      Eigen::VectorXd x_try, f_try, r_try;
      double r_try_norm = std::numeric_limits<double>::infinity();
      for (int damp = 0; damp < 6; ++damp) {
        x_try = x + lambda * delta;
        f_try = rhs(t_new, x_try);
        ++st.rhs_evaluations;
        r_try = x_try - y - 0.5 * h * (f + f_try);
        r_try_norm = r_try.norm();
        if (std::isfinite(r_try_norm) && (r_try_norm < res_norm || damp == 5)) break;
        lambda *= 0.5;
      }
      if (!std::isfinite(r_try_norm)) return false;
      const double step_norm = (lambda * delta).norm();
      x = x_try;
      fx = f_try;
      res = r_try;
      res_norm = r_try_norm;
      if (step_norm <= options.newton_tol * (1.0 + x.norm())) return true;
    }
    return false;
  };

  const long n_steps = std::max(1L, static_cast<long>(std::ceil((t1 - t0) / options.step - 1e-9)));
  Eigen::VectorXd x(n), fx(n);
  for (long s = 0; s < n_steps; ++s) {
    const double t_new = (s + 1 == n_steps) ? t1 : t0 + (s + 1) * options.step;
    const double h = t_new - t;
    if (!have_jacobian || std::abs(h - jac_h) > 1e-12 * std::abs(h)) refresh_jacobian(t, y, f, h);
    bool ok = newton(h, x, fx);
    if (!ok) {
      refresh_jacobian(t, y, f, h);
      ok = newton(h, x, fx);
    }
    if (!ok) {
      std::ostringstream msg;
      msg << "integrate_implicit: Newton failed to converge at t=" << t_new;
      fail(ErrorCode::NewtonDivergence, msg.str());
    }
    while (next_out < n_out && output_times[next_out] <= t_new) {
      const double theta = std::clamp((output_times[next_out] - t) / h, 0.0, 1.0);
      const double h00 = (1 + 2 * theta) * (1 - theta) * (1 - theta);
      const double h10 = theta * (1 - theta) * (1 - theta);
      const double h01 = theta * theta * (3 - 2 * theta);
      const double h11 = theta * theta * (theta - 1);
      out.states.col(next_out++) = h00 * y + h10 * h * f + h01 * x + h11 * h * fx;
    }
    ++st.steps;
    t = t_new;
    y = x;
    f = fx;
    st.t_reached = t;
    if (exceeds(y, options.max_abs_bound)) {
      st.bound_exceeded = true;
      return out;
    }
  }
  while (next_out < n_out) out.states.col(next_out++) = y;
  return out;
}

}  // namespace bayesrom::dynamics
