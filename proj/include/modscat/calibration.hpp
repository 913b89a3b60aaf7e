#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace modscat {

constexpr std::uint64_t kCalibrationSeed = 20240611;
constexpr std::size_t kCalibrationSuiteSize = 1000;

/// Frozen constants of the inequality checks.
struct Calibration {
  int version = 1;
  std::uint64_t seed = kCalibrationSeed;
  std::size_t suite_size = kCalibrationSuiteSize;
  double interp_1_2 = 0.0;
  double interp_1_3 = 0.0;
  double interp_2_3 = 0.0;
  std::array<double, 4> source{};

  double interpolation(int j, int k) const;
};

/// Values compiled into the library (mirrors data/calibration.txt).
const Calibration& frozen_calibration();

/// Max ratios over the calibration suite.
Calibration run_calibration(std::uint64_t seed = kCalibrationSeed, std::size_t suite_size = kCalibrationSuiteSize);

void write_calibration(std::ostream& os, const Calibration& c);
Calibration read_calibration(std::istream& is);
Calibration read_calibration_file(const std::string& path);

}  // namespace modscat
