#include "modscat/config.hpp"

#include "modscat/ansatz.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace modscat {

namespace {

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t"));
  const auto e = s.find_last_not_of(" \t\r");
  s.erase(e == std::string::npos ? 0 : e + 1);
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(x)) {
    throw ConfigError("key '" + key + "': expected a finite number, got '" + v + "'");
  }
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

Setter dbl(double RunConfig::*m) {
  return [m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = to_double(k, v); };
}
Setter sz(std::size_t RunConfig::*m) {
  return [m](RunConfig& c, const std::string& k, const std::string& v) {
    const long long x = to_int(k, v);
    if (x < 0) throw ConfigError("key '" + k + "' must be non-negative");
    c.*m = static_cast<std::size_t>(x);
  };
}
Setter integer(int RunConfig::*m) {
  return [m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = static_cast<int>(to_int(k, v)); };
}
Setter str(std::string RunConfig::*m) {
  return [m](RunConfig& c, const std::string&, const std::string& v) { c.*m = v; };
}
Setter boolean(bool RunConfig::*m) {
  return [m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = to_bool(k, v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"physics.beta", dbl(&RunConfig::beta)},
      {"physics.gamma", dbl(&RunConfig::gamma)},
      {"physics.epsilon", dbl(&RunConfig::epsilon)},
      {"grid.half_length", dbl(&RunConfig::half_length)},
      {"grid.n", sz(&RunConfig::n)},
      {"profile.a", str(&RunConfig::a)},
      {"profile.b", str(&RunConfig::b)},
      {"profile.f", str(&RunConfig::f)},
      {"profile.quintic_phase", boolean(&RunConfig::quintic_phase)},
      {"forward.t_start", dbl(&RunConfig::t_start)},
      {"forward.t_end", dbl(&RunConfig::t_end)},
      {"forward.dt", dbl(&RunConfig::dt)},
      {"forward.snapshots", sz(&RunConfig::snapshots)},
      {"forward.fit_lo", dbl(&RunConfig::fit_lo)},
      {"forward.fit_hi", dbl(&RunConfig::fit_hi)},
      {"forward.write_snapshots", sz(&RunConfig::write_snapshots)},
      {"backward.t_min", dbl(&RunConfig::t_min)},
      {"backward.T_max", dbl(&RunConfig::T_max)},
      {"backward.dt", dbl(&RunConfig::backward_dt)},
      {"backward.max_iters", integer(&RunConfig::max_iters)},
      {"backward.tol", dbl(&RunConfig::tol)},
      {"backward.order", integer(&RunConfig::order)},
      {"backward.snapshots", sz(&RunConfig::backward_snapshots)},
      {"backward.fit_lo", dbl(&RunConfig::backward_fit_lo)},
      {"backward.fit_hi", dbl(&RunConfig::backward_fit_hi)},
      {"expand.order", integer(&RunConfig::expand_order)},
      {"expand.truncation", integer(&RunConfig::truncation)},
      {"expand.s_lo", dbl(&RunConfig::expand_s_lo)},
      {"expand.s_hi", dbl(&RunConfig::expand_s_hi)},
      {"expand.samples", sz(&RunConfig::expand_samples)},
      {"verify.suite_size", sz(&RunConfig::suite_size)},
      {"verify.dt", dbl(&RunConfig::verify_dt)},
      {"verify.closed_loop", boolean(&RunConfig::closed_loop)},
      {"verify.closed_loop_dt", dbl(&RunConfig::closed_loop_dt)},
      {"run.seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const long long x = to_int(k, v);
         if (x < 0) throw ConfigError("key '" + k + "' must be non-negative");
         c.seed = static_cast<std::uint64_t>(x);
       }},
      {"run.out_dir", str(&RunConfig::out_dir)},
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("key '" + key + "': " + what);
}

}  // namespace

void RunConfig::validate() const {
  require(std::isfinite(beta), "physics.beta", "must be finite");
  require(std::isfinite(gamma), "physics.gamma", "must be finite");
  require(epsilon >= 0.0, "physics.epsilon", "must be >= 0");
  require(half_length > 0.0, "grid.half_length", "must be positive");
  require(n >= 16 && (n & (n - 1)) == 0, "grid.n", "must be a power of two >= 16");
  for (const auto& [key, text] : {std::pair{"profile.a", a}, {"profile.b", b}, {"profile.f", f}}) {
    try {
      parse_preset(text);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("key '") + key + "': " + e.what());
    }
  }
  require(t_start > 0.0, "forward.t_start", "must be positive");
  require(t_end > t_start, "forward.t_end", "must exceed forward.t_start");
  require(dt > 0.0 && dt <= 0.1, "forward.dt", "must lie in (0, 0.1]");
  require(snapshots >= 2, "forward.snapshots", "must be >= 2");
  require(fit_lo >= 1.0, "forward.fit_lo", "must be >= 1");
  require(fit_hi >= fit_lo * std::pow(10.0, 1.5) * (1 - 1e-12), "forward.fit_hi",
          "must be at least 10^1.5 times forward.fit_lo");
  require(t_min > 0.0, "backward.t_min", "must be positive");
  require(T_max > t_min, "backward.T_max", "must exceed backward.t_min");
  require(backward_dt > 0.0 && backward_dt <= 0.1, "backward.dt", "must lie in (0, 0.1]");
  require(max_iters >= 1, "backward.max_iters", "must be >= 1");
  require(tol > 0.0, "backward.tol", "must be positive");
  require(order >= 0 && order <= 6, "backward.order", "must lie in [0, 6]");
  require(backward_snapshots >= 4, "backward.snapshots", "must be >= 4");
  require(backward_fit_lo >= 1.0, "backward.fit_lo", "must be >= 1");
  require(backward_fit_hi >= backward_fit_lo * std::pow(10.0, 1.35) * (1 - 1e-12), "backward.fit_hi",
          "must be at least 10^1.35 times backward.fit_lo");
  require(expand_order >= 0 && expand_order <= 6, "expand.order", "must lie in [0, 6]");
  require(truncation >= 0, "expand.truncation", "must be >= 0");
  require(truncation == 0 || truncation >= std::max(order, expand_order) + 2, "expand.truncation",
          "must be 0 (automatic) or at least order + 2");
  require(expand_s_lo >= 1.0, "expand.s_lo", "must be >= 1");
  require(expand_s_hi >= expand_s_lo * std::pow(10.0, 1.5) * (1 - 1e-12), "expand.s_hi",
          "must be at least 10^1.5 times expand.s_lo");
  require(expand_samples >= 8, "expand.samples", "must be >= 8");
  require(suite_size >= 1, "verify.suite_size", "must be >= 1");
  require(verify_dt > 0.0 && verify_dt <= 0.1, "verify.dt", "must lie in (0, 0.1]");
  require(closed_loop_dt > 0.0 && closed_loop_dt <= 0.1, "verify.closed_loop_dt", "must lie in (0, 0.1]");
  require(!out_dir.empty(), "run.out_dir", "must not be empty");
}

RunConfig parse_config(std::istream& is) {
  RunConfig c;
  std::string section;
  int lineno = 0;
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end()) throw ConfigError("unknown configuration key '" + full + "'");
    it->second(c, full, trim(line.substr(eq + 1)));
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& os, const RunConfig& c) {
  std::ostringstream o;
  o << std::setprecision(17) << std::boolalpha;
  o << "[physics]\nbeta = " << c.beta << "\ngamma = " << c.gamma << "\nepsilon = " << c.epsilon << "\n\n";
  o << "[grid]\nhalf_length = " << c.half_length << "\nn = " << c.n << "\n\n";
  o << "[profile]\na = " << c.a << "\nb = " << c.b << "\nf = " << c.f << "\nquintic_phase = " << c.quintic_phase
    << "\n\n";
  o << "[forward]\nt_start = " << c.t_start << "\nt_end = " << c.t_end << "\ndt = " << c.dt
    << "\nsnapshots = " << c.snapshots << "\nfit_lo = " << c.fit_lo << "\nfit_hi = " << c.fit_hi
    << "\nwrite_snapshots = " << c.write_snapshots << "\n\n";
  o << "[backward]\nt_min = " << c.t_min << "\nT_max = " << c.T_max << "\ndt = " << c.backward_dt
    << "\nmax_iters = " << c.max_iters << "\ntol = " << c.tol << "\norder = " << c.order
    << "\nsnapshots = " << c.backward_snapshots << "\nfit_lo = " << c.backward_fit_lo
    << "\nfit_hi = " << c.backward_fit_hi << "\n\n";
  o << "[expand]\norder = " << c.expand_order << "\ntruncation = " << c.truncation << "\ns_lo = " << c.expand_s_lo
    << "\ns_hi = " << c.expand_s_hi << "\nsamples = " << c.expand_samples << "\n\n";
  o << "[verify]\nsuite_size = " << c.suite_size << "\ndt = " << c.verify_dt << "\nclosed_loop = " << c.closed_loop
    << "\nclosed_loop_dt = " << c.closed_loop_dt << "\n\n";
  o << "[run]\nseed = " << c.seed << "\nout_dir = " << c.out_dir << "\n";
  os << o.str();
}

}  // namespace modscat
