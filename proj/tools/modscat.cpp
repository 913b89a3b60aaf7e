#include "modscat/config.hpp"
#include "modscat/duhamel.hpp"
#include "modscat/series.hpp"
#include "modscat/workflows.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

using namespace modscat;

int run(int (*cmd)(const RunConfig&, const RunOptions&, std::ostream&), const std::string& config_path,
        const std::optional<std::string>& out, const std::optional<std::uint64_t>& seed, unsigned jobs) {
  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (out) cfg.out_dir = *out;
    if (seed) cfg.seed = *seed;
    cfg.validate();
    return cmd(cfg, RunOptions{jobs}, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConvergenceFailure& e) {
    std::cerr << "error: " << e.what() << "\n  contraction ratios:";
    for (const auto& r : e.log().records) std::cerr << ' ' << r.contraction_ratio;
    std::cerr << '\n';
    return kExitNumerical;
  } catch (const NumericalFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SeriesContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modified scattering for 1D cubic-quintic NLS: forward, backward, expansion and verification runs"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;

  struct Entry {
    const char* name;
    const char* help;
    int (*cmd)(const RunConfig&, const RunOptions&, std::ostream&);
  };
  const Entry entries[] = {
      {"forward", "march small data forward and extract the scattering data", cmd_forward},
      {"backward", "construct the solution with prescribed asymptotics", cmd_backward},
      {"expand", "build the asymptotic expansion and its residual rates", cmd_expand},
      {"verify", "run the inequality, identity and closed-loop checks", cmd_verify},
  };
  int (*chosen)(const RunConfig&, const RunOptions&, std::ostream&) = nullptr;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides run.out_dir)");
    sub->add_option("--jobs", jobs, "worker threads for independent sub-runs")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed of the random suites (overrides run.seed)");
    sub->callback([&chosen, cmd = e.cmd] { chosen = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  return run(chosen, config_path, out, seed, jobs);
}
