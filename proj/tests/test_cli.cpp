#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path p = fs::temp_directory_path() / ("modscat_cli_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr
};

Result run_cli(const std::string& args, const std::string& tag) {
  const fs::path log = scratch() / (tag + ".log");
  const std::string cmd = std::string("\"") + MODSCAT_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = slurp(log);
  return r;
}

fs::path write_cfg(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / (name + ".cfg");
  std::ofstream(p) << text;
  return p;
}

/// "section.key" -> value from a summary or report file.
std::map<std::string, std::string> read_kv(const fs::path& p) {
  std::map<std::string, std::string> out;
  std::ifstream in(p);
  std::string section;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) out[section + "." + line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

double num(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  REQUIRE_MESSAGE(it != kv.end(), "missing key ", key);
  return std::stod(it->second);
}

std::string out_dir(const std::string& tag) { return (scratch() / tag).string(); }

const char* kSmallBackward = R"(
[physics]
beta = 0.2
gamma = 0.1
[grid]
half_length = 40
n = 512
[profile]
a = gaussian(0.3, 2, 0)
b = zero
[backward]
t_min = 10
T_max = 1000
dt = 0.01
fit_lo = 20
fit_hi = 500
)";

const char* kQuickVerify = R"(
[physics]
beta = 0.2
gamma = 0.1
epsilon = 0.05
[grid]
n = 512
[verify]
suite_size = 200
closed_loop = false
)";

}  // namespace

TEST_CASE("cli: zero initial data exits cleanly") {
  const auto cfg = write_cfg("zero", "[physics]\nepsilon = 0\n[grid]\nn = 256\n[forward]\nt_end = 200\n");
  const Result r = run_cli("forward --config " + cfg.string() + " --out " + out_dir("zero"), "zero");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto kv = read_kv(fs::path(out_dir("zero")) / "summary.txt");
  CHECK(kv.at("forward.degenerate") == "true");
  std::ifstream ext(fs::path(out_dir("zero")) / "extracted.txt");
  std::string header;
  std::getline(ext, header);
  CHECK(header == "y a b mask");
  double y, a, b;
  int m;
  while (ext >> y >> a >> b >> m) CHECK(a == 0.0);
}

TEST_CASE("cli: malformed configuration key") {
  const auto cfg = write_cfg("badkey", "[physics]\nbeta = 1\nbetta = 2\n");
  const Result r = run_cli("forward --config " + cfg.string() + " --out " + out_dir("badkey"), "badkey");
  CHECK(r.code == 2);
  CHECK(r.output.find("physics.betta") != std::string::npos);

  const auto bad_value = write_cfg("badvalue", "[grid]\nn = 1000\n");
  const Result v = run_cli("forward --config " + bad_value.string(), "badvalue");
  CHECK(v.code == 2);
  CHECK(v.output.find("grid.n") != std::string::npos);
}

TEST_CASE("cli: argument errors") {
  CHECK(run_cli("", "noargs").code == 2);
  CHECK(run_cli("sideways", "unknown").code == 2);
  CHECK(run_cli("forward --config /nonexistent/x.cfg", "missing").code == 2);
  CHECK(run_cli("verify --jobs 0", "jobs0").code == 2);
}

TEST_CASE("cli: forward small data reports the modulus rate") {
  const std::string cfg = std::string(MODSCAT_SOURCE_DIR) + "/configs/forward_small_data.cfg";
  const Result r = run_cli("forward --config " + cfg + " --out " + out_dir("fwd"), "fwd");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto kv = read_kv(fs::path(out_dir("fwd")) / "summary.txt");
  const double m = num(kv, "rates.rate_modulus.exponent");
  CHECK(m >= -1.3);
  CHECK(m <= -0.7);
  CHECK(num(kv, "rates.residual.exponent") <= -1.2);
  for (const char* f : {"trajectory.txt", "extracted.txt", "residual.txt", "config.resolved.cfg"}) {
    CHECK(fs::exists(fs::path(out_dir("fwd")) / f));
  }
}

TEST_CASE("cli: output is deterministic and the resolved config reproduces the run") {
  const std::string cfg = std::string(MODSCAT_SOURCE_DIR) + "/configs/forward_small_data.cfg";
  const auto first = fs::path(out_dir("det1")), second = fs::path(out_dir("det2")), third = fs::path(out_dir("det3"));
  REQUIRE(run_cli("forward --config " + cfg + " --out " + first.string(), "det1").code == 0);
  REQUIRE(run_cli("forward --config " + cfg + " --out " + second.string() + " --jobs 3", "det2").code == 0);
  REQUIRE(run_cli("forward --config " + (first / "config.resolved.cfg").string() + " --out " + third.string(), "det3")
              .code == 0);
  for (const char* f : {"trajectory.txt", "extracted.txt", "residual.txt", "summary.txt"}) {
    const std::string a = slurp(first / f);
    CHECK_FALSE(a.empty());
    CHECK_MESSAGE(a == slurp(second / f), f);
    CHECK_MESSAGE(a == slurp(third / f), f);
  }
}

TEST_CASE("cli: backward with zero data is degenerate") {
  std::string text = kSmallBackward;
  text.replace(text.find("gaussian(0.3, 2, 0)"), 19, "zero");
  const auto cfg = write_cfg("bwd0", text);
  const Result r = run_cli("backward --config " + cfg.string() + " --out " + out_dir("bwd0"), "bwd0");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto kv = read_kv(fs::path(out_dir("bwd0")) / "summary.txt");
  CHECK(kv.at("backward.converged") == "true");
  CHECK(kv.at("rates.decay.degenerate") == "true");
}

TEST_CASE("cli: backward small data decays like (1 + ln t)^2 / t") {
  const auto cfg = write_cfg("bwd", kSmallBackward);
  const Result r = run_cli("backward --config " + cfg.string() + " --out " + out_dir("bwd"), "bwd");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto kv = read_kv(fs::path(out_dir("bwd")) / "summary.txt");
  CHECK(kv.at("backward.converged") == "true");
  CHECK(num(kv, "rates.decay.exponent") <= -0.85);
  CHECK(num(kv, "rates.decay.log_power") <= 2);
  for (const char* f : {"w_trajectory.txt", "iterations.txt", "decay.txt", "config.resolved.cfg"}) {
    CHECK(fs::exists(fs::path(out_dir("bwd")) / f));
  }
}

TEST_CASE("cli: backward with strong coupling fails numerically") {
  const auto cfg = write_cfg("bwd5", R"(
[physics]
beta = 5
gamma = 1
[grid]
n = 256
[profile]
a = gaussian(1, 2, 0)
[backward]
t_min = 1
T_max = 100
dt = 0.01
max_iters = 8
snapshots = 100
fit_lo = 2
fit_hi = 50
)");
  const Result r = run_cli("backward --config " + cfg.string() + " --out " + out_dir("bwd5"), "bwd5");
  CHECK(r.code == 3);
  CHECK(r.output.find("error") != std::string::npos);
}

TEST_CASE("cli: expand residual ladder") {
  const std::string base = "[physics]\nbeta = 1\ngamma = 0.5\n[grid]\nn = 512\n[profile]\na = gaussian(0.5, 2, 0)\n";
  const auto one = write_cfg("exp1", base + "[expand]\norder = 1\n");
  REQUIRE(run_cli("expand --config " + one.string() + " --out " + out_dir("exp1"), "exp1").code == 0);
  std::ifstream t1(fs::path(out_dir("exp1")) / "residual_rates.txt");
  std::string header;
  std::getline(t1, header);
  CHECK(header == "n exponent log_power residual_rms degenerate");
  std::vector<double> exps;
  int n, q, deg;
  double m, rms;
  while (t1 >> n >> m >> q >> rms >> deg) {
    CHECK(deg == 0);
    exps.push_back(m);
  }
  REQUIRE(exps.size() == 2);
  CHECK(exps[0] == doctest::Approx(-2.0).epsilon(0.15));
  CHECK(exps[1] == doctest::Approx(-3.0).epsilon(0.1));
  CHECK(fs::exists(fs::path(out_dir("exp1")) / "series_1.txt"));

  const auto zero_order = write_cfg("exp0", base + "[expand]\norder = 0\n");
  REQUIRE(run_cli("expand --config " + zero_order.string() + " --out " + out_dir("exp0"), "exp0").code == 0);
  std::ifstream t0(fs::path(out_dir("exp0")) / "residual_rates.txt");
  std::getline(t0, header);
  int rows = 0;
  while (t0 >> n >> m >> q >> rms >> deg) ++rows;
  CHECK(rows == 1);

  const auto zero_data = write_cfg("expz", "[grid]\nn = 256\n[profile]\na = zero\n[expand]\norder = 2\n");
  REQUIRE(run_cli("expand --config " + zero_data.string() + " --out " + out_dir("expz"), "expz").code == 0);
  std::ifstream tz(fs::path(out_dir("expz")) / "residual_rates.txt");
  std::getline(tz, header);
  rows = 0;
  while (tz >> n >> m >> q >> rms >> deg) {
    CHECK(deg == 1);
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("cli: verify step-halving ratio at a coarse step") {
  const auto cfg = write_cfg("vcoarse", std::string(kQuickVerify) + "dt = 0.05\n");
  const Result r = run_cli("verify --config " + cfg.string() + " --out " + out_dir("vcoarse") + " --jobs 4", "vcoarse");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto kv = read_kv(fs::path(out_dir("vcoarse")) / "reports.txt");
  CHECK(num(kv, "energy_identity_order.ratio") == doctest::Approx(4.0).epsilon(0.25));
  CHECK(num(kv, "energy_identity_order.dt") == 0.05);
}

TEST_CASE("cli: verify verdicts do not depend on the seed, output does not depend on jobs") {
  const auto cfg = write_cfg("vseed", kQuickVerify);
  const fs::path a = out_dir("vseed1"), b = out_dir("vseed2"), c = out_dir("vseed3");
  const Result ra = run_cli("verify --config " + cfg.string() + " --out " + a.string() + " --seed 1", "vseed1");
  const Result rb = run_cli("verify --config " + cfg.string() + " --out " + b.string() + " --seed 977", "vseed2");
  const Result rc =
      run_cli("verify --config " + cfg.string() + " --out " + c.string() + " --seed 1 --jobs 4", "vseed3");
  CHECK_MESSAGE(ra.code == 0, ra.output);
  CHECK(rb.code == ra.code);
  auto verdicts = [](const fs::path& dir) {
    std::map<std::string, std::string> v;
    for (const auto& [k, val] : read_kv(dir / "summary.txt")) {
      if (k.rfind("verdicts.", 0) == 0) v[k] = val;
    }
    return v;
  };
  CHECK_FALSE(verdicts(a).empty());
  CHECK(verdicts(a) == verdicts(b));
  CHECK(slurp(a / "reports.txt") != slurp(b / "reports.txt"));
  CHECK(slurp(a / "reports.txt") == slurp(c / "reports.txt"));
  CHECK(slurp(a / "summary.txt") == slurp(c / "summary.txt"));
}
