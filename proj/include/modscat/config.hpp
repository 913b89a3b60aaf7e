#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace modscat {

/// Invalid or unknown configuration entry (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every knob of the four workflows. Text form: `key = value` lines grouped
/// under [section] headers; '#' starts a comment.
struct RunConfig {
  // [physics]
  double beta = 0.2;
  double gamma = 0.1;
  double epsilon = 0.05;
  // [grid]
  double half_length = 40.0;
  std::size_t n = 1024;
  // [profile]
  std::string a = "gaussian(0.3, 2, 0)";
  std::string b = "zero";
  std::string f = "gaussian(1, 1, 0)";
  bool quintic_phase = false;
  // [forward]
  double t_start = 1.0;
  double t_end = 500.0;
  double dt = 0.01;
  std::size_t snapshots = 400;
  double fit_lo = 5.0;
  double fit_hi = 250.0;
  std::size_t write_snapshots = 20;
  // [backward]
  double t_min = 10.0;
  double T_max = 1000.0;
  double backward_dt = 2e-3;
  int max_iters = 30;
  double tol = 1e-9;
  int order = 0;
  std::size_t backward_snapshots = 400;
  double backward_fit_lo = 20.0;
  double backward_fit_hi = 500.0;
  // [expand]
  int expand_order = 2;
  int truncation = 0;  // 0: order + 3
  double expand_s_lo = 10.0;
  double expand_s_hi = 1000.0;
  std::size_t expand_samples = 40;
  // [verify]
  std::size_t suite_size = 1000;
  double verify_dt = 0.025;
  bool closed_loop = true;
  double closed_loop_dt = 0.01;
  // [run]
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  int effective_truncation(int order_n) const { return truncation > 0 ? truncation : order_n + 3; }

  /// Range checks; throws ConfigError naming the key.
  void validate() const;
};

RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);
/// Fully resolved text form; parse_config(write_config(c)) reproduces c.
void write_config(std::ostream& os, const RunConfig& c);

}  // namespace modscat
