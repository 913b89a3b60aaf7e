// Regenerates the frozen inequality constants:
//   modscat_calibrate > data/calibration.txt
#include "modscat/calibration.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Calibrate the constants of the inequality checks"};
  std::uint64_t seed = modscat::kCalibrationSeed;
  std::size_t size = modscat::kCalibrationSuiteSize;
  app.add_option("--seed", seed, "suite seed");
  app.add_option("--size", size, "number of suite fields");
  CLI11_PARSE(app, argc, argv);
  modscat::write_calibration(std::cout, modscat::run_calibration(seed, size));
  return 0;
}
