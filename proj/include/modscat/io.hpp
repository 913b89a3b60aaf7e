#pragma once

#include "modscat/analysis.hpp"
#include "modscat/duhamel.hpp"
#include "modscat/scatter.hpp"
#include "modscat/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace modscat {

/// Nested key-value text: "[section]" headers followed by "key = value" lines.
/// Numbers use 17 significant digits so that output is reproducible byte for byte.
class KvWriter {
 public:
  explicit KvWriter(std::ostream& os);
  void section(const std::string& name);
  void put(const std::string& key, double v);
  void put(const std::string& key, long long v);
  void put(const std::string& key, int v) { put(key, static_cast<long long>(v)); }
  void put(const std::string& key, std::size_t v) { put(key, static_cast<long long>(v)); }
  void put(const std::string& key, bool v);
  void put(const std::string& key, const std::string& v);
  void put(const std::string& key, const char* v) { put(key, std::string(v)); }
  void put(const std::string& prefix, const RateFit& fit);
  void put(const InequalityReport& r);

 private:
  std::ostream& os_;
  bool first_ = true;
};

std::string format_double(double v);

/// Blocks "s <value>" followed by "y re im" rows, one block per snapshot.
void write_profile_trajectory(std::ostream& os, const std::vector<ProfileState>& traj);
void write_profile_trajectory(std::ostream& os, const std::vector<double>& s, const std::vector<ComplexField>& V);
/// Same layout with "t" headers and "x re im" rows.
void write_physical_trajectory(std::ostream& os, const std::vector<PhysicalState>& traj);

/// Header "y a b mask", one row per grid point.
void write_extracted(std::ostream& os, const ExtractedData& x);

/// Header "k diff_sup weighted_diff_sup contraction_ratio bound_ratio_max energy_ratio_max derivative_energy_ratio_max".
void write_iteration_log(std::ostream& os, const IterationLog& log);

/// Header "<x> <value>".
void write_samples(std::ostream& os, const std::string& x_name, const std::string& v_name,
                   const std::vector<std::pair<double, double>>& samples);

/// Writes `content` to dir/name, creating dir if needed.
void write_text_file(const std::string& dir, const std::string& name, const std::string& content);

}  // namespace modscat
