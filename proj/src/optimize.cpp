// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "bayesrom/error.hpp"

namespace bayesrom::optimize {

Eigen::VectorXd Box::clamp(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

MinimizeResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x0, const Box& box,
                           const NelderMeadOptions& options) {
  const Eigen::Index n = x0.size();
  require(n > 0 && box.lower.size() == n && box.upper.size() == n,
          ErrorCode::DimensionMismatch, "nelder_mead: box/start dimension mismatch");
  const Eigen::VectorXd width = (box.upper - box.lower).cwiseMax(1e-300);

  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> pts(n + 1);
  std::vector<double> vals(n + 1);
  pts[0] = box.clamp(x0);
  vals[0] = eval(pts[0]);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd p = pts[0];
    const double step = options.initial_step * width[i];
    p[i] += (p[i] + step <= box.upper[i]) ? step : -step;
    pts[i + 1] = box.clamp(p);
    vals[i + 1] = eval(pts[i + 1]);
  }

  std::vector<int> order(n + 1);
  bool converged = false;
  while (evals < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order.front();
    const int worst = order.back();
    const int second = order[n - 1];

    double diameter = 0.0;
    for (Eigen::Index i = 0; i <= n; ++i)
      diameter = std::max(diameter,
                          ((pts[i] - pts[best]).array() / width.array()).abs().maxCoeff());
    const double spread = vals[worst] - vals[best];
    if (std::isfinite(spread) && spread <= options.f_tolerance * (1.0 + std::abs(vals[best])) &&
        diameter <= options.x_tolerance * 1e3) {
      converged = true;
      break;
    }
    if (diameter <= options.x_tolerance) {
      converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = box.clamp(centroid + (centroid - pts[worst]));
    const double fr = eval(xr);
    if (fr < vals[best]) {
      const Eigen::VectorXd xe = box.clamp(centroid + 2.0 * (centroid - pts[worst]));
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                       : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      vals[i] = eval(pts[i]);
    }
  }

  const auto it = std::min_element(vals.begin(), vals.end());
  MinimizeResult result;
  result.x = pts[static_cast<std::size_t>(it - vals.begin())];
  result.value = *it;
  result.evaluations = evals;
  result.converged = converged;
  return result;
}

namespace {
double radical_inverse(int index, int base) {
  double inv = 1.0 / base;
  double frac = inv;
  double out = 0.0;
  while (index > 0) {
    out += (index % base) * frac;
    index /= base;
    frac *= inv;
  }
  return out;
}
}  // namespace

Eigen::VectorXd halton_point(int index, int dim) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  require(dim > 0 && dim <= 10, ErrorCode::InvalidArgument, "halton_point: dim must be in [1,10]");
  Eigen::VectorXd p(dim);
  for (int d = 0; d < dim; ++d) p[d] = radical_inverse(index + 1, kPrimes[d]);
  return p;
}

}  // namespace bayesrom::optimize
