#include "modscat/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace modscat {

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

KvWriter::KvWriter(std::ostream& os) : os_(os) {}

void KvWriter::section(const std::string& name) {
  if (!first_) os_ << '\n';
  first_ = false;
  os_ << '[' << name << "]\n";
}

void KvWriter::put(const std::string& key, double v) { os_ << key << " = " << format_double(v) << '\n'; }
void KvWriter::put(const std::string& key, long long v) { os_ << key << " = " << v << '\n'; }
void KvWriter::put(const std::string& key, bool v) { os_ << key << " = " << (v ? "true" : "false") << '\n'; }
void KvWriter::put(const std::string& key, const std::string& v) { os_ << key << " = " << v << '\n'; }

void KvWriter::put(const std::string& prefix, const RateFit& fit) {
  put(prefix + ".degenerate", fit.degenerate);
  if (fit.degenerate) return;
  put(prefix + ".exponent", fit.exponent);
  put(prefix + ".log_power", fit.log_power);
  put(prefix + ".residual_rms", fit.residual_rms);
  put(prefix + ".samples", fit.samples);
}

void KvWriter::put(const InequalityReport& r) {
  put(r.name + ".lhs", r.lhs);
  put(r.name + ".rhs", r.rhs);
  put(r.name + ".margin", r.margin);
  put(r.name + ".satisfied", r.satisfied);
}

namespace {

void block(std::ostream& os, const char* tag, const char* coord, double t, const ComplexField& v) {
  os << tag << ' ' << format_double(t) << '\n' << coord << " re im\n";
  for (std::size_t i = 0; i < v.size(); ++i) {
    os << format_double(v.grid.point(i)) << ' ' << format_double(v[i].real()) << ' '
       << format_double(v[i].imag()) << '\n';
  }
}

}  // namespace

void write_profile_trajectory(std::ostream& os, const std::vector<ProfileState>& traj) {
  for (const auto& st : traj) block(os, "s", "y", st.s, st.V);
}

void write_profile_trajectory(std::ostream& os, const std::vector<double>& s, const std::vector<ComplexField>& V) {
  if (s.size() != V.size()) throw std::invalid_argument("trajectory times and fields differ in length");
  for (std::size_t q = 0; q < s.size(); ++q) block(os, "s", "y", s[q], V[q]);
}

void write_physical_trajectory(std::ostream& os, const std::vector<PhysicalState>& traj) {
  for (const auto& st : traj) block(os, "t", "x", st.t, st.v);
}

void write_extracted(std::ostream& os, const ExtractedData& x) {
  os << "y a b mask\n";
  for (std::size_t i = 0; i < x.a.size(); ++i) {
    os << format_double(x.a.grid.point(i)) << ' ' << format_double(x.a[i]) << ' ' << format_double(x.b[i]) << ' '
       << (x.mask[i] ? 1 : 0) << '\n';
  }
}

void write_iteration_log(std::ostream& os, const IterationLog& log) {
  os << "k diff_sup weighted_diff_sup contraction_ratio bound_ratio_max energy_ratio_max "
        "derivative_energy_ratio_max\n";
  for (const auto& r : log.records) {
    os << r.k << ' ' << format_double(r.diff_sup) << ' ' << format_double(r.weighted_diff_sup) << ' '
       << format_double(r.contraction_ratio) << ' ' << format_double(r.bound_ratio_max) << ' '
       << format_double(r.energy_ratio_max) << ' ' << format_double(r.derivative_energy_ratio_max) << '\n';
  }
}

void write_samples(std::ostream& os, const std::string& x_name, const std::string& v_name,
                   const std::vector<std::pair<double, double>>& samples) {
  os << x_name << ' ' << v_name << '\n';
  for (const auto& [x, v] : samples) os << format_double(x) << ' ' << format_double(v) << '\n';
}

void write_text_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace modscat
