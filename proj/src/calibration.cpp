#include "modscat/calibration.hpp"

#include "modscat/analysis.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace modscat {

double Calibration::interpolation(int j, int k) const {
  if (j == 1 && k == 2) return interp_1_2;
  if (j == 1 && k == 3) return interp_1_3;
  if (j == 2 && k == 3) return interp_2_3;
  throw std::invalid_argument("no calibrated constant for this (j,k)");
}

const Calibration& frozen_calibration() {
  // Keep in sync with data/calibration.txt (checked by the test suite).
  static const Calibration c = [] {
    Calibration x;
    x.interp_1_2 = 0.74642573481230579;
    x.interp_1_3 = 0.55635610009155378;
    x.interp_2_3 = 0.78580086048304998;
    x.source = {1.0000000000000009, 4.5998779157163154, 14.21705415644119, 19.978106675170327};
    return x;
  }();
  return c;
}

Calibration run_calibration(std::uint64_t seed, std::size_t suite_size) {
  Calibration c;
  c.seed = seed;
  c.suite_size = suite_size;
  for (const auto& sample : random_field_suite(suite_grid(), seed, suite_size, true)) {
    auto ratio = [&](int j, int k) {
      const auto [lhs, rhs] = interpolation_sides(sample.field, j, k);
      return rhs > 0.0 ? lhs / rhs : 0.0;
    };
    c.interp_1_2 = std::max(c.interp_1_2, ratio(1, 2));
    c.interp_1_3 = std::max(c.interp_1_3, ratio(1, 3));
    c.interp_2_3 = std::max(c.interp_2_3, ratio(2, 3));
    const auto r = source_bound_ratios(sample.field, sample.s, 1.0, 1.0);
    for (int k = 0; k < 4; ++k) c.source[k] = std::max(c.source[k], r[k]);
  }
  return c;
}

void write_calibration(std::ostream& os, const Calibration& c) {
  os << "# frozen constants for the inequality checks; regenerate with modscat_calibrate\n";
  os << "version = " << c.version << '\n';
  os << "seed = " << c.seed << '\n';
  os << "suite_size = " << c.suite_size << '\n';
  os << std::setprecision(17);
  os << "interp_1_2 = " << c.interp_1_2 << '\n';
  os << "interp_1_3 = " << c.interp_1_3 << '\n';
  os << "interp_2_3 = " << c.interp_2_3 << '\n';
  for (int k = 0; k < 4; ++k) os << "source_" << k << " = " << c.source[k] << '\n';
}

Calibration read_calibration(std::istream& is) {
  std::map<std::string, std::string> kv;
  for (std::string line; std::getline(is, line);) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto num = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("calibration file lacks '" + key + "'");
    return std::stod(it->second);
  };
  Calibration c;
  c.version = static_cast<int>(num("version"));
  c.seed = static_cast<std::uint64_t>(std::stoull(kv.at("seed")));
  c.suite_size = static_cast<std::size_t>(num("suite_size"));
  c.interp_1_2 = num("interp_1_2");
  c.interp_1_3 = num("interp_1_3");
  c.interp_2_3 = num("interp_2_3");
  for (int k = 0; k < 4; ++k) c.source[k] = num("source_" + std::to_string(k));
  return c;
}

Calibration read_calibration_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open calibration file " + path);
  return read_calibration(in);
}

}  // namespace modscat
