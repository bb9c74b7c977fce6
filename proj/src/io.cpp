// Copyright 2026 The bayesrom Authors
// SPDX-License-Identifier: Apache-2.0

#include "bayesrom/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bayesrom/error.hpp"

namespace bayesrom::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& path) {
  if (s == "nan" || s == "NaN") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(end != s.c_str() && *end == '\0', ErrorCode::Io, path + ": bad number '" + s + "'");
  return v;
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::Io, "cannot open " + path + " for writing");
  f << text;
  require(static_cast<bool>(f), ErrorCode::Io, "write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const Eigen::MatrixXd& rows) {
  require(static_cast<Eigen::Index>(header.size()) == rows.cols(), ErrorCode::DimensionMismatch,
          "write_table_csv: header size differs from column count");
  std::string out;
  for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
  out += '\n';
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      if (j) out += ',';
      out += format_double(rows(i, j));
    }
    out += '\n';
  }
  write_text(path, out);
}

void write_trajectory_csv(const std::string& path, const dynamics::Trajectory& traj) {
  require(traj.states.cols() == traj.times.size(), ErrorCode::DimensionMismatch,
          "write_trajectory_csv: time count differs from state columns");
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 0; i < traj.states.rows(); ++i)
    header.push_back(static_cast<std::size_t>(i) < traj.labels.size() ? traj.labels[i]
                                                                       : "q" + std::to_string(i));
  Eigen::MatrixXd rows(traj.times.size(), traj.states.rows() + 1);
  rows.col(0) = traj.times;
  rows.rightCols(traj.states.rows()) = traj.states.transpose();
  write_table_csv(path, header, rows);
}

dynamics::Trajectory read_trajectory_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::Io, path + ": empty file");
  std::vector<std::string> header = split_csv(line);
  require(!header.empty() && header[0] == "t", ErrorCode::Io, path + ": header must start with t");
  dynamics::Trajectory traj;
  traj.labels.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    require(cells.size() == header.size(), ErrorCode::Io, path + ": ragged row");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c, path));
    rows.push_back(std::move(row));
  }
  const Eigen::Index n = static_cast<Eigen::Index>(traj.labels.size());
  traj.times.resize(static_cast<Eigen::Index>(rows.size()));
  traj.states.resize(n, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    traj.times[static_cast<Eigen::Index>(k)] = rows[k][0];
    for (Eigen::Index i = 0; i < n; ++i)
      traj.states(i, static_cast<Eigen::Index>(k)) = rows[k][static_cast<std::size_t>(i) + 1];
  }
  return traj;
}

}  // namespace bayesrom::io
