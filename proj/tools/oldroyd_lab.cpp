// oldroyd_lab: command-line driver for the linear and nonlinear experiments.
//
//   oldroyd_lab <command> [--config FILE] [--set section.key=value ...]
//               [--out DIR] [--threads N] [--seed S]
//
// Commands: validate-green, linear-decay, simulate, sweep-mu, green-table.
// Exit codes: 0 ok, 1 configuration error, 2 assertion failure, 3 blow-up.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oldroyd/config.hpp"
#include "oldroyd/errors.hpp"
#include "oldroyd/experiments.hpp"

namespace {

using oldroyd::Config;
using oldroyd::RunRecord;

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out;
  int threads = 1;
  long long seed = -1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.sets, "Override a key: section.key=value (repeatable)");
  cmd->add_option("--out", c.out, "Output root (default $OLDROYD_RUNS_DIR or ./runs)");
  cmd->add_option("--threads", c.threads, "Parallel jobs for sweeps")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "Override init.seed")->check(CLI::NonNegativeNumber);
}

Config resolve(const Common& c) {
  Config cfg = c.config_path.empty() ? Config() : Config::load(c.config_path);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw oldroyd::ConfigError("--set expects section.key=value");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
  if (c.seed >= 0) cfg.set("init.seed", std::to_string(c.seed));
  return cfg;
}

oldroyd::CommandOptions options(const Common& c) {
  oldroyd::CommandOptions o;
  if (!c.out.empty()) {
    o.out_root = c.out;
  } else if (const char* env = std::getenv("OLDROYD_RUNS_DIR"); env && *env) {
    o.out_root = env;
  }
  o.threads = c.threads;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oldroyd-B spectral lab"};
  app.require_subcommand(1);
  Common common;
  using Fn = RunRecord (*)(const Config&, const oldroyd::CommandOptions&);
  const std::vector<std::pair<std::string, std::pair<std::string, Fn>>> commands = {
      {"validate-green", {"Compare closed-form Green functions with an RK4 oracle",
                          oldroyd::cmd_validate_green}},
      {"linear-decay", {"Fit linear decay rates and lower-bound ratios", oldroyd::cmd_linear_decay}},
      {"simulate", {"Run the nonlinear solver with monitors", oldroyd::cmd_simulate}},
      {"sweep-mu", {"Vanishing stress-diffusion sweep", oldroyd::cmd_sweep_mu}},
      {"green-table", {"Tabulate G1, G2, G3 and the eigenvalues", oldroyd::cmd_green_table}},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, info] : commands) {
    CLI::App* sub = app.add_subcommand(name, info.first);
    add_common(sub, common);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : oldroyd::kExitConfig;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      const Config cfg = resolve(common);
      const RunRecord rec = commands[i].second.second(cfg, options(common));
      std::cout << rec.run_id << " " << rec.status << "\n" << rec.dir.string() << "\n";
      return rec.exit_code;
    } catch (const oldroyd::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return oldroyd::kExitConfig;
    } catch (const oldroyd::InvalidInput& e) {
      std::cerr << "invalid input: " << e.what() << "\n";
      return oldroyd::kExitConfig;
    } catch (const oldroyd::QuadratureError& e) {
      std::cerr << "quadrature failed: " << e.what() << " (achieved " << e.achieved() << ")\n";
      return oldroyd::kExitAssertion;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return oldroyd::kExitConfig;
    }
  }
  return oldroyd::kExitConfig;
}
