// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "bayesrom/error.hpp"
#include "bayesrom/random.hpp"

namespace bayesrom::dynamics {

const char* noise_kind_name(NoiseKind kind) noexcept {
  switch (kind) {
    case NoiseKind::RangeScaledGaussian: return "range_scaled_gaussian";
    case NoiseKind::MagnitudeScaledGaussian: return "magnitude_scaled_gaussian";
    case NoiseKind::TruncatedNormalMagnitude: return "truncated_normal_magnitude";
  }
  return "?";
}

NoiseKind noise_kind_from_name(std::string_view name) {
  for (NoiseKind k : {NoiseKind::RangeScaledGaussian, NoiseKind::MagnitudeScaledGaussian,
                      NoiseKind::TruncatedNormalMagnitude})
    if (name == noise_kind_name(k)) return k;
  fail(ErrorCode::Config, "unknown noise kind '" + std::string(name) + "'");
}

void NoiseSpec::validate() const {
  require(std::isfinite(level) && level >= 0.0, ErrorCode::InvalidArgument,
          "noise: level must be finite and >= 0");
}

Eigen::MatrixXd add_noise(const Eigen::MatrixXd& clean, const NoiseSpec& spec, int n_blocks) {
  spec.validate();
  require(n_blocks >= 1 && clean.rows() % n_blocks == 0, ErrorCode::DimensionMismatch,
          "add_noise: rows not divisible into variable blocks");
  Eigen::MatrixXd out = clean;
  if (spec.level == 0.0) return out;

  const Eigen::Index block = clean.rows() / n_blocks;
  Eigen::VectorXd block_std(n_blocks);
  for (int b = 0; b < n_blocks; ++b) {
    const auto rows = clean.middleRows(b * block, block);
    block_std[b] = spec.level * (rows.maxCoeff() - rows.minCoeff());
  }

  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = spec.protect_initial ? 1 : 0; j < clean.cols(); ++j) {
    for (Eigen::Index i = 0; i < clean.rows(); ++i) {
      const Eigen::Index in_block = i % block;
      if (spec.protect_boundaries && (in_block == 0 || in_block == block - 1)) continue;
      const double y = clean(i, j);
      switch (spec.kind) {
        case NoiseKind::RangeScaledGaussian:
          out(i, j) = y + block_std[i / block] * normal(rng);
          break;
        case NoiseKind::MagnitudeScaledGaussian:
          out(i, j) = y + spec.level * std::abs(y) * normal(rng);
          break;
        case NoiseKind::TruncatedNormalMagnitude: {
          const double sd = spec.level * std::abs(y);
          if (sd == 0.0) {
            out(i, j) = std::clamp(y, 0.0, 1.0);
            break;
          }
          double draw = y;
          bool accepted = false;
          for (int attempt = 0; attempt < 10000 && !accepted; ++attempt) {
            draw = y + sd * normal(rng);
            accepted = draw >= 0.0 && draw <= 1.0;
          }
          out(i, j) = accepted ? draw : std::clamp(y, 0.0, 1.0);
          break;
        }
      }
    }
  }
  return out;
}

Eigen::VectorXd sample_observation_times(int m, double t_last, TimeScheme scheme,
                                         std::uint64_t seed) {
  require(m >= 2, ErrorCode::InvalidArgument, "sample_observation_times: m must be >= 2");
  require(t_last > 0.0, ErrorCode::InvalidArgument, "sample_observation_times: t_last must be > 0");
  Rng rng(seed);
  Eigen::VectorXd t(m);
  t[0] = 0.0;
  t[m - 1] = t_last;
  if (scheme == TimeScheme::Uniform) {
    std::uniform_real_distribution<double> unif(0.0, t_last);
    std::vector<double> interior;
    while (static_cast<int>(interior.size()) < m - 2) {
      const double v = unif(rng);
      if (v <= 0.0 || v >= t_last) continue;
      if (std::find(interior.begin(), interior.end(), v) != interior.end()) continue;
      interior.push_back(v);
    }
    std::sort(interior.begin(), interior.end());
    for (int k = 0; k < m - 2; ++k) t[k + 1] = interior[k];
    return t;
  }
  const double rounded = std::round(t_last);
  require(std::abs(rounded - t_last) < 1e-9, ErrorCode::InvalidArgument,
          "sample_observation_times: integer-day scheme needs an integer t_last");
  const long last = static_cast<long>(rounded);
  require(m <= last + 1, ErrorCode::InvalidArgument,
          "sample_observation_times: more observations than available days");
  std::vector<long> days(static_cast<std::size_t>(std::max(0L, last - 1)));
  for (long d = 1; d < last; ++d) days[static_cast<std::size_t>(d - 1)] = d;
  // Partial Fisher-Yates: the first m - 2 entries become the chosen days.
  for (int k = 0; k < m - 2; ++k) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k), days.size() - 1);
    std::swap(days[static_cast<std::size_t>(k)], days[pick(rng)]);
  }
  std::sort(days.begin(), days.begin() + (m - 2));
  for (int k = 0; k < m - 2; ++k) t[k + 1] = static_cast<double>(days[static_cast<std::size_t>(k)]);
  return t;
}

}  // namespace bayesrom::dynamics
