// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_NOISE_HPP
#define BAYESROM_NOISE_HPP

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace bayesrom::dynamics {

enum class NoiseKind { RangeScaledGaussian, MagnitudeScaledGaussian, TruncatedNormalMagnitude };

const char* noise_kind_name(NoiseKind kind) noexcept;
NoiseKind noise_kind_from_name(std::string_view name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::RangeScaledGaussian;
  double level = 0.0;  // xi
  std::uint64_t seed = 0;
  bool protect_initial = false;     // leave column 0 untouched
  bool protect_boundaries = false;  // leave the first and last row of each block untouched

  void validate() const;
};

/// Adds noise to a clean state matrix (rows = variables, columns = times).
/// The rows split into `n_blocks` equal variable blocks; the range-scaled
/// kind uses one standard deviation per block, xi * (max - min).
Eigen::MatrixXd add_noise(const Eigen::MatrixXd& clean, const NoiseSpec& spec, int n_blocks = 1);

enum class TimeScheme { Uniform, IntegerDays };

/// Uniform: 0, t_last and m - 2 sorted uniform draws in between.
/// IntegerDays: m distinct integers from [0, t_last] including both ends.
Eigen::VectorXd sample_observation_times(int m, double t_last, TimeScheme scheme,
                                         std::uint64_t seed);

}  // namespace bayesrom::dynamics

#endif  // BAYESROM_NOISE_HPP
