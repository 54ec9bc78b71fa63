#pragma once

// Process, filesystem, and CSV helpers for tests that drive the CLI binary.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace support {

#ifndef AQP_CLI_PATH
#error "AQP_CLI_PATH must point at the CLI binary"
#endif

inline const char* cli_path() { return AQP_CLI_PATH; }

// Runs the CLI with the given argument string inside dir; returns the exit
// code. stdout/stderr land in out.txt / err.txt inside dir.
inline int run_cli(const std::filesystem::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" + std::string(cli_path()) + "' " +
                          args + " > out.txt 2> err.txt";
  const int rc = std::system(cmd.c_str());
  if (rc == -1 || !WIFEXITED(rc)) {
    throw std::runtime_error("failed to run: " + cmd);
  }
  return WEXITSTATUS(rc);
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::current_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  f << text;
}

struct MetricsCsv {
  std::vector<double> proficiency;
  std::vector<double> hit_rate;
  std::vector<double> cost_adaptive;
  std::vector<double> cost_baseline;
};

inline MetricsCsv parse_metrics_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(f, line) ||
      line != "window,proficiency,hit_rate,cost_adaptive,cost_baseline") {
    throw std::runtime_error("unexpected CSV header in " + path.string());
  }
  MetricsCsv csv;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(row, cell, ',')) {
      cells.push_back(std::strtod(cell.c_str(), nullptr));
    }
    if (cells.size() != 5) throw std::runtime_error("bad CSV row: " + line);
    csv.proficiency.push_back(cells[1]);
    csv.hit_rate.push_back(cells[2]);
    csv.cost_adaptive.push_back(cells[3]);
    csv.cost_baseline.push_back(cells[4]);
  }
  return csv;
}

inline double least_squares_slope(const std::vector<double>& ys) {
  const std::size_t n = ys.size();
  if (n < 2) throw std::runtime_error("slope needs at least two points");
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += static_cast<double>(i);
    ym += ys[i];
  }
  xm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (static_cast<double>(i) - xm) * (ys[i] - ym);
    den += (static_cast<double>(i) - xm) * (static_cast<double>(i) - xm);
  }
  return num / den;
}

}  // namespace support
