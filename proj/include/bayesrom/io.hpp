// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BAYESROM_IO_HPP
#define BAYESROM_IO_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bayesrom/integrate.hpp"

namespace bayesrom::io {

/// %.17g, with "nan" / "inf" / "-inf" spelled out.
std::string format_double(double v);

/// Header `t,<label1>,...`, one row per time; missing entries are written as nan.
void write_trajectory_csv(const std::string& path, const dynamics::Trajectory& traj);
dynamics::Trajectory read_trajectory_csv(const std::string& path);

/// Generic numeric table with a header row.
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const Eigen::MatrixXd& rows);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace bayesrom::io

#endif  // BAYESROM_IO_HPP
